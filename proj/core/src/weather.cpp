#include "funcreg/weather.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "funcreg/kernel.hpp"
#include "funcreg/parallel.hpp"
#include "funcreg/rkhs.hpp"

namespace funcreg {

namespace {

constexpr int kDaysPerYear = 365;
constexpr int kWeeklyPoints = 53;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, const std::string& path, int row,
                  int col) {
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v))
        throw InvalidInput(path + ": non-numeric cell at row " +
                           std::to_string(row) + ", column " + std::to_string(col));
    return v;
}

struct DailyTable {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> rows;
};

DailyTable load_daily_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput(path + ": empty file");
    const auto header = split_csv_line(line);
    if (header.size() != kDaysPerYear + 1 || header[0] != "station")
        throw InvalidInput(path + ": header must be station,d1,...,d365");
    DailyTable table;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != kDaysPerYear + 1)
            throw InvalidInput(path + ": row " + std::to_string(row) + " has " +
                               std::to_string(cells.size()) + " columns, expected " +
                               std::to_string(kDaysPerYear + 1));
        std::vector<double> values(kDaysPerYear);
        for (int d = 0; d < kDaysPerYear; ++d)
            values[static_cast<std::size_t>(d)] =
                parse_cell(cells[static_cast<std::size_t>(d + 1)], path, row, d + 2);
        table.ids.push_back(cells[0]);
        table.rows.push_back(std::move(values));
    }
    return table;
}

} // namespace

std::vector<double> weekly_subsample(const std::vector<double>& daily) {
    if (daily.size() != kDaysPerYear)
        throw InvalidInput("weekly_subsample expects exactly 365 values");
    std::vector<double> weekly(kWeeklyPoints);
    for (int k = 0; k < kWeeklyPoints; ++k)
        weekly[static_cast<std::size_t>(k)] = daily[static_cast<std::size_t>(7 * k)];
    return weekly;
}

std::vector<double> log_precip_transform(const std::vector<double>& values,
                                         double offset) {
    if (!(offset > 0.0)) throw InvalidInput("precip offset must be positive");
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 0.0)
            throw InvalidInput("precipitation values must be nonnegative");
        out[i] = std::log(values[i] > 0.0 ? values[i] : offset);
    }
    return out;
}

WeatherDataset load_weather(const std::string& temp_path,
                            const std::string& precip_path) {
    const DailyTable temp = load_daily_csv(temp_path);
    const DailyTable precip = load_daily_csv(precip_path);
    std::unordered_map<std::string, std::size_t> precip_index;
    for (std::size_t i = 0; i < precip.ids.size(); ++i)
        precip_index[precip.ids[i]] = i;

    WeatherDataset dataset;
    for (std::size_t i = 0; i < temp.ids.size(); ++i) {
        const auto it = precip_index.find(temp.ids[i]);
        if (it == precip_index.end())
            throw InvalidInput("station '" + temp.ids[i] +
                               "' missing from " + precip_path);
        const auto& p = precip.rows[it->second];
        for (std::size_t d = 0; d < p.size(); ++d)
            if (p[d] < 0.0)
                throw InvalidInput(precip_path + ": negative precipitation for station '" +
                                   temp.ids[i] + "' at day " + std::to_string(d + 1));
        dataset.stations.push_back(
            StationSeries{temp.ids[i], temp.rows[i], p});
    }
    if (dataset.stations.size() < 2)
        throw InvalidInput("weather dataset needs at least 2 stations");
    if (precip.ids.size() != temp.ids.size())
        throw InvalidInput("station sets differ between temperature and precipitation files");
    return dataset;
}

CurveSet WeatherDataset::temperature_curves() const {
    Eigen::MatrixXd values(static_cast<Eigen::Index>(stations.size()), kWeeklyPoints);
    for (std::size_t i = 0; i < stations.size(); ++i) {
        const auto weekly = weekly_subsample(stations[i].daily_temp);
        for (int l = 0; l < kWeeklyPoints; ++l)
            values(static_cast<Eigen::Index>(i), l) = weekly[static_cast<std::size_t>(l)];
    }
    return CurveSet(weekly_grid, std::move(values));
}

CurveSet WeatherDataset::log_precip_curves(double offset) const {
    Eigen::MatrixXd values(static_cast<Eigen::Index>(stations.size()), kWeeklyPoints);
    for (std::size_t i = 0; i < stations.size(); ++i) {
        const auto weekly =
            log_precip_transform(weekly_subsample(stations[i].daily_precip), offset);
        for (int l = 0; l < kWeeklyPoints; ++l)
            values(static_cast<Eigen::Index>(i), l) = weekly[static_cast<std::size_t>(l)];
    }
    return CurveSet(weekly_grid, std::move(values));
}

LooResult leave_one_out(const WeatherDataset& dataset, double precip_offset,
                        int threads) {
    const int n = static_cast<int>(dataset.stations.size());
    if (n < 3) throw InvalidInput("leave-one-out needs at least 3 stations");
    const CurveSet temps = dataset.temperature_curves();
    const CurveSet precips = dataset.log_precip_curves(precip_offset);
    const int T = dataset.weekly_grid.size();

    LooResult result;
    result.folds.resize(static_cast<std::size_t>(n));
    parallel_for(n, threads, [&](int hold) {
        LooFold& fold = result.folds[static_cast<std::size_t>(hold)];
        fold.station_id = dataset.stations[static_cast<std::size_t>(hold)].station_id;
        const Curve observed = precips.curve(hold);
        fold.observed.assign(observed.values().data(), observed.values().data() + T);
        try {
            Eigen::MatrixXd train_x(n - 1, T), train_y(n - 1, T);
            int r = 0;
            for (int i = 0; i < n; ++i) {
                if (i == hold) continue;
                train_x.row(r) = temps.values().row(i);
                train_y.row(r) = precips.values().row(i);
                ++r;
            }
            const CurveSet xs(dataset.weekly_grid, std::move(train_x));
            const CurveSet ys(dataset.weekly_grid, std::move(train_y));
            const double sigma = default_sigma(xs);
            const double sigma_prime = default_sigma_prime(dataset.weekly_grid);
            const GcvCurve gcv =
                gcv_select(xs, ys, sigma, sigma_prime, log_lambda_grid());
            fold.lambda = gcv.lambdas[static_cast<std::size_t>(gcv.argmin_index)];
            const RkhsModel model = fit(xs, ys, sigma, sigma_prime, fold.lambda);
            const Curve pred = model.predict(temps.curve(hold));
            fold.predicted.assign(pred.values().data(), pred.values().data() + T);
            fold.mse = (pred.values() - observed.values()).squaredNorm() / T;
        } catch (const std::exception& e) {
            fold.failed = true;
            fold.error = e.what();
        }
    });
    return result;
}

} // namespace funcreg
