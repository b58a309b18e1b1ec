#include "funcreg/sim.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "funcreg/kernel.hpp"
#include "funcreg/linear_model.hpp"
#include "funcreg/nadaraya_watson.hpp"
#include "funcreg/parallel.hpp"
#include "funcreg/rkhs.hpp"

namespace funcreg {

const char* const kEstimatorNames[5] = {"rkhs", "rkhs-mod", "linear", "nw",
                                        "nw-oracle"};

SimModel parse_sim_model(const std::string& tag) {
    if (tag == "a") return SimModel::a;
    if (tag == "b") return SimModel::b;
    if (tag == "c") return SimModel::c;
    if (tag == "d") return SimModel::d;
    throw InvalidInput("unknown simulation model '" + tag + "' (expected a|b|c|d)");
}

std::string sim_model_name(SimModel model) {
    switch (model) {
        case SimModel::a: return "a";
        case SimModel::b: return "b";
        case SimModel::c: return "c";
        case SimModel::d: return "d";
    }
    return "?";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace

std::mt19937_64 substream(std::uint64_t seed, int rep, DataRole role, int curve) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (static_cast<std::uint64_t>(rep) + 1));
    h = splitmix64(h ^ (static_cast<std::uint64_t>(role) + 0x100));
    h = splitmix64(h ^ (static_cast<std::uint64_t>(curve) + 0x10000));
    return std::mt19937_64(h);
}

Curve gen_brownian(std::mt19937_64& rng, const Grid& grid) {
    std::uniform_real_distribution<double> start(0.0, 5.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int T = grid.size();
    Eigen::VectorXd values(T);
    values(0) = start(rng);
    for (int l = 1; l < T; ++l) values(l) = values(l - 1) + gauss(rng);
    return Curve(grid, std::move(values));
}

Curve apply_model(SimModel model, const Curve& x) {
    const Grid& grid = x.grid();
    const int T = grid.size();
    Eigen::VectorXd y(T);
    switch (model) {
        case SimModel::a:
        case SimModel::b: {
            Eigen::VectorXd integrand =
                model == SimModel::a ? x.values()
                                     : x.values().array().square().matrix();
            for (int l = 0; l < T; ++l) {
                Eigen::VectorXd weighted(T);
                for (int m = 0; m < T; ++m)
                    weighted(m) = std::abs(grid[l] - grid[m]) * integrand(m);
                y(l) = trapezoid_integral(weighted, grid);
            }
            break;
        }
        case SimModel::c:
            for (int l = 0; l < T; ++l)
                y(l) = std::sin(2.0 * std::numbers::pi * grid[l]) * x.values()(l);
            break;
        case SimModel::d:
            for (int l = 0; l < T; ++l)
                y(l) = std::cos(std::numbers::pi * grid[l]) * std::abs(x.values()(l));
            break;
    }
    return Curve(grid, std::move(y));
}

SimDataset gen_dataset(const SimConfig& config, DataRole role, int rep_index) {
    if (config.grid_size < 2 || config.noise_sd < 0.0)
        throw InvalidInput("invalid simulation config");
    int count = 0;
    switch (role) {
        case DataRole::train: count = config.n_train; break;
        case DataRole::valid: count = config.n_valid; break;
        case DataRole::test: count = config.n_test; break;
    }
    if (count < 1) throw InvalidInput("invalid simulation config");
    const Grid grid = Grid::equispaced(config.grid_size);
    const int T = grid.size();
    Eigen::MatrixXd xs(count, T), clean(count, T), noisy(count, T);
    for (int i = 0; i < count; ++i) {
        auto rng = substream(config.seed, rep_index, role, i);
        const Curve x = gen_brownian(rng, grid);
        const Curve y = apply_model(config.model, x);
        xs.row(i) = x.values().transpose();
        clean.row(i) = y.values().transpose();
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int l = 0; l < T; ++l)
            noisy(i, l) = clean(i, l) + config.noise_sd * gauss(rng);
    }
    return SimDataset{CurveSet(grid, std::move(xs)), CurveSet(grid, std::move(noisy)),
                      CurveSet(grid, std::move(clean))};
}

namespace {

struct RepResult {
    // Indexed like kEstimatorNames.
    double mse_clean[5];
    double mse_noisy[5];
    double parameter[5];
    bool failed[5];
};

// Validation-selected RKHS fit of one variant; returns test errors.
void run_rkhs_variant(const SimDataset& train, const SimDataset& valid,
                      const SimDataset& test, double sigma, double sigma_prime,
                      PenaltyVariant variant, const std::vector<double>& lgrid,
                      const Eigen::MatrixXd& grid_k, RepResult& out, int slot) {
    const OperatorKernel kern(sigma);
    const Eigen::MatrixXd valid_cross = cross_gram(valid.xs, train.xs, kern);
    const Eigen::MatrixXd test_cross = cross_gram(test.xs, train.xs, kern);
    RkhsSolver solver(train.xs, train.ys_noisy, sigma, sigma_prime, variant);
    double best_mse = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd best_bk;
    double best_lambda = 0.0;
    for (double lambda : lgrid) {
        Eigen::MatrixXd bk;
        try {
            bk = solver.fit(lambda).coefficients() * grid_k;
        } catch (const NumericalError&) {
            continue;
        }
        const double mse = (valid_cross * bk - valid.ys_noisy.values()).squaredNorm();
        if (mse < best_mse) {
            best_mse = mse;
            best_bk = std::move(bk);
            best_lambda = lambda;
        }
    }
    if (!best_bk.size()) throw NumericalError("rkhs fit failed at every lambda");
    const Eigen::MatrixXd pred = test_cross * best_bk;
    const double denom = static_cast<double>(test.xs.size()) * test.xs.grid().size();
    out.mse_clean[slot] = (pred - test.ys_clean.values()).squaredNorm() / denom;
    out.mse_noisy[slot] = (pred - test.ys_noisy.values()).squaredNorm() / denom;
    out.parameter[slot] = best_lambda;
}

void run_linear(const SimDataset& train, const SimDataset& valid,
                const SimDataset& test, const std::vector<double>& lgrid,
                RepResult& out) {
    const BsplineBasis basis = BsplineBasis::cubic(10);
    double best_mse = std::numeric_limits<double>::infinity();
    std::optional<LinearModel> best;
    double best_lambda = 0.0;
    for (double lambda : lgrid) {
        try {
            LinearModel model = linear_fit(train.xs, train.ys_noisy, basis, lambda);
            const double mse =
                mean_squared_error(model.predict(valid.xs), valid.ys_noisy);
            if (mse < best_mse) {
                best_mse = mse;
                best = std::move(model);
                best_lambda = lambda;
            }
        } catch (const NumericalError&) {
            continue;
        }
    }
    if (!best) throw NumericalError("linear fit failed at every penalty");
    const CurveSet pred = best->predict(test.xs);
    out.mse_clean[2] = mean_squared_error(pred, test.ys_clean);
    out.mse_noisy[2] = mean_squared_error(pred, test.ys_noisy);
    out.parameter[2] = best_lambda;
}

void run_nw(const SimDataset& train, const SimDataset& valid, const SimDataset& test,
            double sigma, bool oracle, RepResult& out, int slot) {
    std::vector<double> h_grid;
    for (double f : log_lambda_grid(0.02, 3.0, 25)) h_grid.push_back(f * sigma);
    const CurveSet& responses = oracle ? train.ys_clean : train.ys_noisy;
    const double h =
        nw_bandwidth_search(train.xs, responses, valid.xs, valid.ys_noisy, h_grid);
    const NwModel model(train.xs, responses, h);
    const CurveSet pred = model.predict(test.xs);
    out.mse_clean[slot] = mean_squared_error(pred, test.ys_clean);
    out.mse_noisy[slot] = mean_squared_error(pred, test.ys_noisy);
    out.parameter[slot] = h;
}

RepResult run_rep(const SimConfig& config, int rep) {
    RepResult out{};
    for (int e = 0; e < 5; ++e) out.failed[e] = true;
    const SimDataset train = gen_dataset(config, DataRole::train, rep);
    const SimDataset valid = gen_dataset(config, DataRole::valid, rep);
    const SimDataset test = gen_dataset(config, DataRole::test, rep);
    const double sigma = default_sigma(train.xs);
    const double sigma_prime = default_sigma_prime(train.xs.grid());
    const std::vector<double> lgrid = log_lambda_grid();
    const Eigen::MatrixXd grid_k =
        grid_gram(train.xs.grid(), ScalarKernel(sigma_prime));

    try {
        run_rkhs_variant(train, valid, test, sigma, sigma_prime,
                         PenaltyVariant::standard, lgrid, grid_k, out, 0);
        out.failed[0] = false;
    } catch (const NumericalError&) {}
    try {
        run_rkhs_variant(train, valid, test, sigma, sigma_prime,
                         PenaltyVariant::modified, lgrid, grid_k, out, 1);
        out.failed[1] = false;
    } catch (const NumericalError&) {}
    try {
        run_linear(train, valid, test, lgrid, out);
        out.failed[2] = false;
    } catch (const NumericalError&) {}
    try {
        run_nw(train, valid, test, sigma, false, out, 3);
        out.failed[3] = false;
    } catch (const NumericalError&) {}
    try {
        run_nw(train, valid, test, sigma, true, out, 4);
        out.failed[4] = false;
    } catch (const NumericalError&) {}
    return out;
}

} // namespace

BenchmarkReport run_benchmark(const SimConfig& config, int threads) {
    if (config.reps < 1) throw InvalidInput("reps must be >= 1");
    std::vector<RepResult> results(static_cast<std::size_t>(config.reps));
    parallel_for(config.reps, threads,
                 [&](int rep) { results[static_cast<std::size_t>(rep)] = run_rep(config, rep); });

    BenchmarkReport report;
    double rkhs_mean = 0.0;
    for (int e = 0; e < 5; ++e) {
        BenchmarkRow row;
        row.model = config.model;
        row.estimator = kEstimatorNames[e];
        double sum_clean = 0.0, sum_noisy = 0.0, sum_sq = 0.0;
        int count = 0;
        for (const auto& r : results) {
            if (r.failed[e]) {
                ++row.failures;
                continue;
            }
            sum_clean += r.mse_clean[e];
            sum_noisy += r.mse_noisy[e];
            sum_sq += r.mse_clean[e] * r.mse_clean[e];
            ++count;
        }
        if (count > 0) {
            row.mean_mse_clean = sum_clean / count;
            row.mean_mse_noisy = sum_noisy / count;
            if (count > 1) {
                const double var =
                    (sum_sq - count * row.mean_mse_clean * row.mean_mse_clean) /
                    (count - 1);
                row.se = std::sqrt(std::max(var, 0.0) / count);
            }
        }
        if (e == 0) rkhs_mean = row.mean_mse_clean;
        row.relative_to_rkhs =
            rkhs_mean > 0.0 ? row.mean_mse_clean / rkhs_mean : 0.0;
        report.rows.push_back(std::move(row));
    }
    for (int rep = 0; rep < config.reps; ++rep) {
        const auto& r = results[static_cast<std::size_t>(rep)];
        for (int e = 0; e < 5; ++e)
            report.details.push_back(RepDetail{rep, kEstimatorNames[e],
                                               r.mse_clean[e], r.mse_noisy[e],
                                               r.parameter[e], r.failed[e]});
    }
    return report;
}

} // namespace funcreg
