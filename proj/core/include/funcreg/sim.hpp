#ifndef FUNCREG_SIM_HPP
#define FUNCREG_SIM_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "funcreg/curve.hpp"

namespace funcreg {

enum class SimModel { a, b, c, d };

SimModel parse_sim_model(const std::string& tag);
std::string sim_model_name(SimModel model);

struct SimConfig {
    SimModel model = SimModel::a;
    int grid_size = 50;
    int n_train = 30;
    int n_valid = 50;
    int n_test = 50;
    int reps = 50;
    double noise_sd = 1.0;
    std::uint64_t seed = 0;
};

enum class DataRole { train, valid, test };

/// Deterministic per-curve engine keyed by (seed, rep, role, curve index)
/// through a splitmix64 chain; reps and curves are independent streams.
std::mt19937_64 substream(std::uint64_t seed, int rep, DataRole role, int curve);

/// Discrete standard Brownian motion observed at the grid points, with a
/// Uniform[0,5] starting value: x(t_0) = U, then one N(0,1) increment per
/// grid step (the random walk cumsum(N(0,1)) relabeled onto [0,1]). The
/// unit-variance steps are what make the nonlinear responses (x^2, |x|)
/// genuinely nonlinear: paths swing several units and cross zero.
Curve gen_brownian(std::mt19937_64& rng, const Grid& grid);

/// Clean response for one covariate curve:
///   a: y(t) = int |t-s| x(s) ds       b: y(t) = int |t-s| x^2(s) ds
///   c: y(t) = sin(2 pi t) x(t)        d: y(t) = cos(pi t) |x(t)|
Curve apply_model(SimModel model, const Curve& x);

struct SimDataset {
    CurveSet xs;
    CurveSet ys_noisy;
    CurveSet ys_clean;
};

SimDataset gen_dataset(const SimConfig& config, DataRole role, int rep_index);

struct BenchmarkRow {
    SimModel model;
    std::string estimator;
    double mean_mse_clean = 0.0;
    double mean_mse_noisy = 0.0;
    double se = 0.0; // standard error of the clean-target MSE across reps
    double relative_to_rkhs = 0.0;
    int failures = 0;
};

struct RepDetail {
    int rep;
    std::string estimator;
    double mse_clean;
    double mse_noisy;
    double selected_parameter; // lambda or bandwidth
    bool failed;
};

struct BenchmarkReport {
    std::vector<BenchmarkRow> rows;
    std::vector<RepDetail> details;
};

/// One rep: fit five estimators on train, select lambda/bandwidth by
/// validation MSE, evaluate test MSE against clean (and noisy) responses.
/// Aggregates across reps; relative column normalized by the rkhs row.
/// `threads` caps worker count (0 = hardware concurrency); results are
/// identical for any thread count.
BenchmarkReport run_benchmark(const SimConfig& config, int threads = 0);

extern const char* const kEstimatorNames[5]; // rkhs, rkhs-mod, linear, nw, nw-oracle

} // namespace funcreg

#endif
