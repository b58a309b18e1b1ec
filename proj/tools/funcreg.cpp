// funcreg: curve-on-curve regression toolkit CLI.
// Subcommands: fit, predict, simulate, gcv-scan, weather-loo.
// Exit codes: 0 success, 2 input/validation error, 3 numerical failure.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "funcreg/csv.hpp"
#include "funcreg/kernel.hpp"
#include "funcreg/linear_model.hpp"
#include "funcreg/model_io.hpp"
#include "funcreg/nadaraya_watson.hpp"
#include "funcreg/parallel.hpp"
#include "funcreg/rkhs.hpp"
#include "funcreg/sim.hpp"
#include "funcreg/weather.hpp"

namespace {

using namespace funcreg;

std::string timestamp_comment(bool deterministic) {
    if (deterministic) return {};
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string("# generated ") + buf + "\n";
}

struct FitOptions {
    std::string x_path, y_path, estimator = "rkhs", out_path, report_path;
    double lambda = -1.0;
    bool use_gcv = false;
    double sigma = 0.0, sigma_prime = 0.0, bandwidth = 0.0;
};

int cmd_fit(const FitOptions& opt) {
    const CurveSet xs = read_curve_set_csv(opt.x_path);
    const CurveSet ys = read_curve_set_csv(opt.y_path);
    nlohmann::json report;
    report["estimator"] = opt.estimator;
    std::optional<AnyModel> model;

    if (opt.estimator == "rkhs" || opt.estimator == "rkhs-mod") {
        const PenaltyVariant variant = opt.estimator == "rkhs"
                                           ? PenaltyVariant::standard
                                           : PenaltyVariant::modified;
        const double sigma = opt.sigma > 0.0 ? opt.sigma : default_sigma(xs);
        const double sigma_prime =
            opt.sigma_prime > 0.0 ? opt.sigma_prime : default_sigma_prime(xs.grid());
        double lambda = opt.lambda;
        if (opt.use_gcv) {
            const GcvCurve curve =
                gcv_select(xs, ys, sigma, sigma_prime, log_lambda_grid(), variant);
            lambda = curve.lambdas[static_cast<std::size_t>(curve.argmin_index)];
            report["gcv"] = {{"lambdas", curve.lambdas},
                             {"scores", curve.scores},
                             {"argmin_index", curve.argmin_index},
                             {"note", "V(lambda) normalized by N = n*T"}};
        } else if (!(lambda > 0.0)) {
            throw InvalidInput("lambda must be positive (or pass --gcv)");
        }
        RkhsModel fitted = fit(xs, ys, sigma, sigma_prime, lambda, variant);
        const GramPair grams = make_grams(xs, sigma, sigma_prime);
        report["lambda"] = lambda;
        report["sigma"] = sigma;
        report["sigma_prime"] = sigma_prime;
        report["objective"] = objective(ys.values(), grams.covariate, grams.grid,
                                        fitted.coefficients(), lambda, variant);
        model = std::move(fitted);
    } else if (opt.estimator == "nw") {
        if (opt.use_gcv) throw InvalidInput("--gcv applies to rkhs estimators only");
        const double h = opt.bandwidth > 0.0 ? opt.bandwidth : default_sigma(xs);
        NwModel fitted(xs, ys, h);
        report["bandwidth"] = h;
        report["training_mse"] = mean_squared_error(fitted.predict(xs), ys);
        model = std::move(fitted);
    } else if (opt.estimator == "linear") {
        if (opt.use_gcv) throw InvalidInput("--gcv applies to rkhs estimators only");
        if (!(opt.lambda >= 0.0))
            throw InvalidInput("the linear estimator needs --lambda >= 0");
        const BsplineBasis basis = BsplineBasis::cubic(10);
        LinearModel fitted = linear_fit(xs, ys, basis, opt.lambda);
        report["lambda"] = opt.lambda;
        report["objective"] =
            linear_objective(xs, ys, basis, fitted.alpha_coeffs(),
                             fitted.beta_coeffs(), opt.lambda);
        model = std::move(fitted);
    } else {
        throw InvalidInput("unknown estimator '" + opt.estimator +
                           "' (expected rkhs|rkhs-mod|nw|linear)");
    }

    save_model(*model, opt.out_path);
    const std::string report_path =
        opt.report_path.empty() ? opt.out_path + ".report.json" : opt.report_path;
    write_file_atomic(report_path, report.dump(2) + "\n");
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& x_path,
                const std::string& out_path, bool deterministic) {
    const AnyModel model = load_model(model_path);
    const CurveTable input = read_curve_table_csv(x_path);
    if (!(input.grid == model_grid(model)))
        throw InvalidInput("input grid does not match the model grid");
    std::ostringstream out;
    out << timestamp_comment(deterministic);
    const Grid& grid = model_grid(model);
    for (int l = 0; l < grid.size(); ++l)
        out << (l ? "," : "") << format_double(grid[l]);
    out << '\n';
    for (Eigen::Index i = 0; i < input.values.rows(); ++i) {
        const Curve pred =
            predict_any(model, Curve(input.grid, input.values.row(i).transpose()));
        for (int l = 0; l < grid.size(); ++l)
            out << (l ? "," : "") << format_double(pred.values()(l));
        out << '\n';
    }
    write_file_atomic(out_path, out.str());
    return 0;
}

struct SimulateOptions {
    std::string model = "a";
    SimConfig config;
    std::string out_path = "benchmark_report.csv";
    std::string per_rep_path;
    bool deterministic = false;
};

int cmd_simulate(const SimulateOptions& opt) {
    std::vector<SimModel> models;
    if (opt.model == "all")
        models = {SimModel::a, SimModel::b, SimModel::c, SimModel::d};
    else
        models = {parse_sim_model(opt.model)};

    std::ostringstream out, detail;
    out << timestamp_comment(opt.deterministic);
    out << "model,estimator,mean_mse_clean,mean_mse_noisy,se,relative_to_rkhs,failures\n";
    detail << timestamp_comment(opt.deterministic);
    detail << "model,rep,estimator,mse_clean,mse_noisy,selected_parameter,failed\n";
    for (SimModel m : models) {
        SimConfig config = opt.config;
        config.model = m;
        const BenchmarkReport report = run_benchmark(config);
        for (const auto& row : report.rows) {
            out << sim_model_name(row.model) << ',' << row.estimator << ','
                << format_double(row.mean_mse_clean) << ','
                << format_double(row.mean_mse_noisy) << ',' << format_double(row.se)
                << ',' << format_double(row.relative_to_rkhs) << ',' << row.failures
                << '\n';
        }
        for (const auto& d : report.details) {
            detail << sim_model_name(m) << ',' << d.rep << ',' << d.estimator << ','
                   << format_double(d.mse_clean) << ',' << format_double(d.mse_noisy)
                   << ',' << format_double(d.selected_parameter) << ','
                   << (d.failed ? 1 : 0) << '\n';
        }
    }
    write_file_atomic(opt.out_path, out.str());
    if (!opt.per_rep_path.empty()) write_file_atomic(opt.per_rep_path, detail.str());
    return 0;
}

struct GcvScanOptions {
    std::string x_path, y_path, valid_x_path, valid_y_path, out_path = "gcv.csv";
    double lambda_min = 1e-4, lambda_max = 1e3;
    int lambda_count = 25;
    double sigma = 0.0, sigma_prime = 0.0;
    bool deterministic = false;
};

int cmd_gcv_scan(const GcvScanOptions& opt) {
    const CurveSet xs = read_curve_set_csv(opt.x_path);
    const CurveSet ys = read_curve_set_csv(opt.y_path);
    const double sigma = opt.sigma > 0.0 ? opt.sigma : default_sigma(xs);
    const double sigma_prime =
        opt.sigma_prime > 0.0 ? opt.sigma_prime : default_sigma_prime(xs.grid());
    const std::vector<double> grid =
        log_lambda_grid(opt.lambda_min, opt.lambda_max, opt.lambda_count);
    const GcvCurve curve = gcv_select(xs, ys, sigma, sigma_prime, grid);

    const bool with_valid = !opt.valid_x_path.empty();
    std::optional<CurveSet> valid_x, valid_y;
    if (with_valid) {
        valid_x = read_curve_set_csv(opt.valid_x_path);
        valid_y = read_curve_set_csv(opt.valid_y_path);
    }

    std::ostringstream out;
    out << timestamp_comment(opt.deterministic);
    out << "# V(lambda) normalized by N = n*T (argmin unchanged)\n";
    out << "lambda,gcv" << (with_valid ? ",validation_mse" : "") << '\n';
    RkhsSolver solver(xs, ys, sigma, sigma_prime);
    for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
        out << format_double(curve.lambdas[i]) << ','
            << format_double(curve.scores[i]);
        if (with_valid) {
            const RkhsModel model = solver.fit(curve.lambdas[i]);
            out << ',' << format_double(
                            mean_squared_error(model.predict(*valid_x), *valid_y));
        }
        out << '\n';
    }
    write_file_atomic(opt.out_path, out.str());
    return 0;
}

struct WeatherOptions {
    std::string temp_path, precip_path, out_dir = ".", estimator = "rkhs";
    double precip_offset = 0.05;
    bool deterministic = false;
};

int cmd_weather_loo(const WeatherOptions& opt) {
    if (opt.estimator != "rkhs")
        throw InvalidInput("weather-loo supports only --estimator rkhs");
    const WeatherDataset dataset = load_weather(opt.temp_path, opt.precip_path);
    const LooResult result = leave_one_out(dataset, opt.precip_offset);
    std::filesystem::create_directories(opt.out_dir);

    std::ostringstream summary;
    summary << timestamp_comment(opt.deterministic);
    summary << "station,lambda_selected,mse\n";
    for (const auto& fold : result.folds) {
        if (fold.failed) {
            summary << fold.station_id << ",failed,failed\n";
            std::cerr << "fold " << fold.station_id << " failed: " << fold.error
                      << '\n';
            continue;
        }
        summary << fold.station_id << ',' << format_double(fold.lambda) << ','
                << format_double(fold.mse) << '\n';
        std::ostringstream pred;
        pred << timestamp_comment(opt.deterministic);
        pred << "t,observed_log_precip,predicted_log_precip\n";
        for (int l = 0; l < dataset.weekly_grid.size(); ++l)
            pred << format_double(dataset.weekly_grid[l]) << ','
                 << format_double(fold.observed[static_cast<std::size_t>(l)]) << ','
                 << format_double(fold.predicted[static_cast<std::size_t>(l)]) << '\n';
        write_file_atomic(opt.out_dir + "/predictions_" + fold.station_id + ".csv",
                          pred.str());
    }
    write_file_atomic(opt.out_dir + "/loo_summary.csv", summary.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Curve-on-curve regression toolkit"};
    app.require_subcommand(1);

    FitOptions fit_opt;
    auto* fit_cmd = app.add_subcommand("fit", "Fit an estimator to curve data");
    fit_cmd->add_option("--x", fit_opt.x_path, "Covariate curve-set CSV")->required();
    fit_cmd->add_option("--y", fit_opt.y_path, "Response curve-set CSV")->required();
    fit_cmd->add_option("--estimator", fit_opt.estimator, "rkhs|rkhs-mod|nw|linear");
    fit_cmd->add_option("--lambda", fit_opt.lambda, "Smoothing parameter");
    fit_cmd->add_flag("--gcv", fit_opt.use_gcv, "Select lambda by GCV");
    fit_cmd->add_option("--sigma", fit_opt.sigma, "Covariate kernel bandwidth");
    fit_cmd->add_option("--sigma-prime", fit_opt.sigma_prime, "Grid kernel bandwidth");
    fit_cmd->add_option("--bandwidth", fit_opt.bandwidth, "N-W bandwidth");
    fit_cmd->add_option("--out", fit_opt.out_path, "Model JSON output")->required();
    fit_cmd->add_option("--report", fit_opt.report_path, "Fit report JSON output");

    std::string pr_model, pr_x, pr_out;
    bool pr_det = false;
    auto* predict_cmd = app.add_subcommand("predict", "Predict response curves");
    predict_cmd->add_option("--model", pr_model, "Model JSON")->required();
    predict_cmd->add_option("--x", pr_x, "Covariate curve-set CSV")->required();
    predict_cmd->add_option("--out", pr_out, "Predictions CSV")->required();
    predict_cmd->add_flag("--deterministic", pr_det, "Suppress timestamp comment");

    SimulateOptions sim_opt;
    auto* sim_cmd = app.add_subcommand("simulate", "Run the benchmark study");
    sim_cmd->add_option("--model", sim_opt.model, "a|b|c|d|all");
    sim_cmd->add_option("--reps", sim_opt.config.reps, "Monte Carlo repetitions");
    sim_cmd->add_option("--seed", sim_opt.config.seed, "RNG seed");
    sim_cmd->add_option("--n-train", sim_opt.config.n_train, "Training curves");
    sim_cmd->add_option("--n-valid", sim_opt.config.n_valid, "Validation curves");
    sim_cmd->add_option("--n-test", sim_opt.config.n_test, "Test curves");
    sim_cmd->add_option("--grid-size", sim_opt.config.grid_size, "Grid points");
    sim_cmd->add_option("--noise-sd", sim_opt.config.noise_sd, "Noise SD");
    sim_cmd->add_option("--out", sim_opt.out_path, "Report CSV path");
    sim_cmd->add_option("--per-rep", sim_opt.per_rep_path, "Per-rep detail CSV");
    sim_cmd->add_flag("--deterministic", sim_opt.deterministic,
                      "Suppress timestamp comment");

    GcvScanOptions gcv_opt;
    auto* gcv_cmd = app.add_subcommand("gcv-scan", "Scan V(lambda) over a log grid");
    gcv_cmd->add_option("--x", gcv_opt.x_path, "Covariate curve-set CSV")->required();
    gcv_cmd->add_option("--y", gcv_opt.y_path, "Response curve-set CSV")->required();
    gcv_cmd->add_option("--valid-x", gcv_opt.valid_x_path, "Validation covariates");
    gcv_cmd->add_option("--valid-y", gcv_opt.valid_y_path, "Validation responses");
    gcv_cmd->add_option("--lambda-min", gcv_opt.lambda_min, "Grid lower end");
    gcv_cmd->add_option("--lambda-max", gcv_opt.lambda_max, "Grid upper end");
    gcv_cmd->add_option("--lambda-count", gcv_opt.lambda_count, "Grid size");
    gcv_cmd->add_option("--sigma", gcv_opt.sigma, "Covariate kernel bandwidth");
    gcv_cmd->add_option("--sigma-prime", gcv_opt.sigma_prime, "Grid kernel bandwidth");
    gcv_cmd->add_option("--out", gcv_opt.out_path, "Scan CSV path");
    gcv_cmd->add_flag("--deterministic", gcv_opt.deterministic,
                      "Suppress timestamp comment");

    WeatherOptions weather_opt;
    auto* weather_cmd =
        app.add_subcommand("weather-loo", "Leave-one-out weather prediction");
    weather_cmd->add_option("--temp", weather_opt.temp_path, "Temperature CSV")
        ->required();
    weather_cmd->add_option("--precip", weather_opt.precip_path, "Precipitation CSV")
        ->required();
    weather_cmd->add_option("--precip-offset", weather_opt.precip_offset,
                            "Replacement for zero precipitation (mm)");
    weather_cmd->add_option("--estimator", weather_opt.estimator, "Estimator");
    weather_cmd->add_option("--out-dir", weather_opt.out_dir, "Output directory");
    weather_cmd->add_flag("--deterministic", weather_opt.deterministic,
                          "Suppress timestamp comment");

    try {
        app.parse(argc, argv);
        if (*fit_cmd) return cmd_fit(fit_opt);
        if (*predict_cmd) return cmd_predict(pr_model, pr_x, pr_out, pr_det);
        if (*sim_cmd) {
            if (sim_opt.model != "all") parse_sim_model(sim_opt.model);
            return cmd_simulate(sim_opt);
        }
        if (*gcv_cmd) {
            if (gcv_opt.valid_x_path.empty() != gcv_opt.valid_y_path.empty())
                throw funcreg::InvalidInput(
                    "--valid-x and --valid-y must be given together");
            return cmd_gcv_scan(gcv_opt);
        }
        if (*weather_cmd) return cmd_weather_loo(weather_opt);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const funcreg::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const funcreg::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
