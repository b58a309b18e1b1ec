#ifndef FUNCREG_WEATHER_HPP
#define FUNCREG_WEATHER_HPP

#include <string>
#include <vector>

#include "funcreg/curve.hpp"

namespace funcreg {

/// One station-year of daily measurements.
struct StationSeries {
    std::string station_id;
    std::vector<double> daily_temp;   // 365 values, degrees C
    std::vector<double> daily_precip; // 365 values, mm, >= 0
};

/// Validated station collection with the shared 53-point weekly grid.
struct WeatherDataset {
    std::vector<StationSeries> stations;
    Grid weekly_grid = Grid::equispaced(53);

    /// Weekly-subsampled temperature curves, one per station.
    CurveSet temperature_curves() const;
    /// Weekly-subsampled, log-transformed precipitation curves.
    CurveSet log_precip_curves(double offset) const;
};

/// Two CSVs with header `station,d1,...,d365`; stations ordered as in the
/// temperature file, matched by id in the precipitation file.
WeatherDataset load_weather(const std::string& temp_path,
                            const std::string& precip_path);

/// Values at day indices 1, 8, ..., 365 (1-based), exactly 53 samples.
std::vector<double> weekly_subsample(const std::vector<double>& daily);

/// ln(v) with zeros replaced by the offset before the log.
std::vector<double> log_precip_transform(const std::vector<double>& values,
                                         double offset);

struct LooFold {
    std::string station_id;
    double lambda = 0.0;
    double mse = 0.0;
    bool failed = false;
    std::string error;
    std::vector<double> predicted; // 53 values; empty on failure
    std::vector<double> observed;
};

struct LooResult {
    std::vector<LooFold> folds;
};

/// Hold out each station, fit temperature -> log precip on the rest with
/// GCV-selected lambda, predict the held-out curve. Folds run concurrently.
LooResult leave_one_out(const WeatherDataset& dataset, double precip_offset,
                        int threads = 0);

} // namespace funcreg

#endif
