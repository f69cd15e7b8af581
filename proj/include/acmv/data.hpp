// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "acmv/graph.hpp"
#include "acmv/grid.hpp"

namespace acmv {

/// Robust affine scaling x' = (x - Q1) / (Q3 - Q1).
class Scaler {
 public:
  Scaler() = default;
  Scaler(double q1, double q3);

  bool fitted() const noexcept { return fitted_; }
  double q1() const;
  double q3() const;

  double scale(double x) const;
  double unscale(double x) const;
  Eigen::VectorXd scale(const Eigen::VectorXd& x) const;
  Eigen::VectorXd unscale(const Eigen::VectorXd& x) const;

 private:
  void require_fitted() const;

  double q1_ = 0.0;
  double q3_ = 1.0;
  bool fitted_ = false;
};

/// Percentile p in [0, 100] of sorted data, linear interpolation between
/// closest ranks (rank = p / 100 * (n - 1)).
double linear_percentile(std::span<const double> sorted, double p);

/// Quartile scaler over arbitrary values. Throws NumericError when Q1 == Q3.
Scaler fit_quartile_scaler(std::span<const double> values);

/// The training portion of a chronological split. Only this type can be
/// used to fit the pipeline scaler.
struct TrainSplit {
  std::vector<SeriesWindow> windows;
};

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct DatasetSplits {
  TrainSplit train;
  std::vector<SeriesWindow> val;
  std::vector<SeriesWindow> test;
};

/// Contiguous train / val / test blocks in time order.
DatasetSplits chronological_split(std::vector<SeriesWindow> windows,
                                  const SplitFractions& fractions);

/// Quartiles of every distinct frame (by time index) in the training windows.
Scaler fit_scaler(const TrainSplit& train);

SeriesWindow scale_window(const SeriesWindow& window, const Scaler& scaler);
std::vector<SeriesWindow> scale_windows(std::span<const SeriesWindow> windows,
                                        const Scaler& scaler);

struct GeneratorConfig {
  int rows = 8;
  int cols = 10;
  double cell_size_m = 500.0;
  int poi_categories = 6;
  int transport_lines = 5;
  int days = 60;
  int hubs = 3;

  double base_amplitude = 300.0;  // residential field mean, persons
  double hub_amplitude = 1500.0;  // midday visitor peak at the heaviest hub
  double rush_amplitude = 700.0;  // rush-hour peak at a station
  double noise = 1.0;             // scales every stochastic term

  double rain_damping = 0.6;    // multiplier on POI visits when rainy
  double cloudy_damping = 0.9;  // multiplier on POI visits when cloudy
  double holiday_poi_factor = 0.5;
  int holiday_period = 7;       // every n-th day is a holiday
  double weather_persistence = 0.92;
  int station_spacing = 2;      // cells between stations along a line
};

/// Throws ConfigError on out-of-range generator settings.
void validate(const GeneratorConfig& config);

/// A synthetic city: geometry, facilities, transport and T hourly frames.
struct CityScenario {
  GridSpec grid{1, 1};
  std::vector<std::vector<int>> poi_counts;      // N x |C|
  std::vector<TransportProfile> transport;       // N x M
  std::vector<PopulationFrame> series;           // T frames
  std::vector<ContextRecord> contexts;           // T records
  std::vector<int> hubs;                         // commercial hub regions
  std::uint64_t seed = 0;
  GeneratorConfig config;

  int intervals() const noexcept { return static_cast<int>(series.size()); }
  /// Regions holding at least one station.
  std::vector<int> station_regions() const;
};

/// Deterministic in (config, seed).
CityScenario generate_city(const GeneratorConfig& config, std::uint64_t seed);

/// Scenario bundle layout: series.csv, contexts.csv, poi.csv, transport.csv,
/// regions.csv and grid.json.
void save_scenario(const CityScenario& scenario, const std::filesystem::path& dir);
CityScenario load_scenario(const std::filesystem::path& dir);

inline constexpr const char* kScenarioFiles[] = {"series.csv", "contexts.csv", "poi.csv",
                                                 "transport.csv", "regions.csv",
                                                 "grid.json"};

}  // namespace acmv
