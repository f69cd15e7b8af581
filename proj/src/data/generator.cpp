// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "acmv/data.hpp"
#include "acmv/errors.hpp"
#include "acmv/nn/init.hpp"

namespace acmv {
namespace {

enum Stream : std::uint64_t {
  kBaseStream = 1,
  kPoiStream,
  kHubStream,
  kLineStream,
  kWeatherStream,
  kFieldNoiseStream,
  kVisitNoiseStream,
  kRushNoiseStream,
  kCountNoiseStream,
};

constexpr double kFieldRho = 0.9;
constexpr double kFieldScale = 0.08;
constexpr double kVisitRho = 0.95;
constexpr double kVisitSd = 0.25;
constexpr double kHubSd = 0.1;
constexpr double kLineRho = 0.8;
constexpr double kLineSd = 0.3;

class Source {
 public:
  explicit Source(std::uint64_t seed) : rng_(seed) {}
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  int below(int n) { return std::min(n - 1, static_cast<int>(unit() * n)); }
  double normal() {
    const double u1 = 1.0 - unit();
    const double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  nn::Rng rng_;
};

/// Stationary AR(1) with unit marginal variance.
class Ar1 {
 public:
  explicit Ar1(double rho) : rho_(rho), innovation_(std::sqrt(1.0 - rho * rho)) {}
  double step(Source& src) {
    state_ = started_ ? rho_ * state_ + innovation_ * src.normal() : src.normal();
    started_ = true;
    return state_;
  }

 private:
  double rho_;
  double innovation_;
  double state_ = 0.0;
  bool started_ = false;
};

double bump(double h, double center, double width) {
  const double d = (h - center) / width;
  return std::exp(-0.5 * d * d);
}

double visit_profile(int hour) {
  return hour >= 8 && hour <= 22 ? bump(hour, 13.5, 3.0) : 0.0;
}

double rush_profile(int hour) { return bump(hour, 8.0, 1.0) + bump(hour, 18.0, 1.0); }

double daytime(int hour) { return bump(hour, 13.0, 4.0); }

}  // namespace

void validate(const GeneratorConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("generator: ") + what);
  };
  require(c.rows >= 1 && c.cols >= 1, "rows and cols must be at least 1");
  require(c.cell_size_m > 0.0, "cell_size_m must be positive");
  require(c.poi_categories >= 2, "poi_categories must be at least 2");
  require(c.transport_lines >= 0, "transport_lines must be nonnegative");
  require(c.days >= 1, "days must be at least 1");
  require(c.hubs >= 0 && c.hubs <= c.rows * c.cols, "hubs must lie in [0, regions]");
  require(c.base_amplitude >= 0.0 && c.hub_amplitude >= 0.0 && c.rush_amplitude >= 0.0,
          "amplitudes must be nonnegative");
  require(c.noise >= 0.0, "noise must be nonnegative");
  require(c.rain_damping >= 0.0 && c.rain_damping <= 1.0, "rain_damping must lie in [0, 1]");
  require(c.cloudy_damping >= 0.0 && c.cloudy_damping <= 1.0,
          "cloudy_damping must lie in [0, 1]");
  require(c.holiday_poi_factor >= 0.0, "holiday_poi_factor must be nonnegative");
  require(c.holiday_period >= 1, "holiday_period must be at least 1");
  require(c.weather_persistence >= 0.0 && c.weather_persistence < 1.0,
          "weather_persistence must lie in [0, 1)");
  require(c.station_spacing >= 1, "station_spacing must be at least 1");
}

namespace {

/// Ordered cells of one straight line across the grid.
std::vector<int> line_path(const GridSpec& grid, int orientation, Source& src) {
  std::vector<int> path;
  const int rows = grid.rows();
  const int cols = grid.cols();
  if (orientation == 0) {
    const int r = src.below(rows);
    for (int c = 0; c < cols; ++c) path.push_back(r * cols + c);
  } else if (orientation == 1) {
    const int c = src.below(cols);
    for (int r = 0; r < rows; ++r) path.push_back(r * cols + c);
  } else {
    // diagonal from a random cell on the top edge, heading left or right
    const int dir = src.unit() < 0.5 ? 1 : -1;
    int c = src.below(cols);
    for (int r = 0; r < rows && c >= 0 && c < cols; ++r, c += dir) path.push_back(r * cols + c);
    if (path.size() < 2) {
      path.clear();
      for (int r = 0; r < rows; ++r) path.push_back(r * cols + std::min(r, cols - 1));
    }
  }
  return path;
}

}  // namespace

std::vector<int> CityScenario::station_regions() const {
  std::vector<int> out;
  for (std::size_t n = 0; n < transport.size(); ++n) {
    for (int flag : transport[n].lines) {
      if (flag != 0) {
        out.push_back(static_cast<int>(n));
        break;
      }
    }
  }
  return out;
}

CityScenario generate_city(const GeneratorConfig& config, std::uint64_t seed) {
  validate(config);
  CityScenario scn;
  scn.grid = GridSpec(config.rows, config.cols, config.cell_size_m);
  scn.seed = seed;
  scn.config = config;
  const int n = scn.grid.node_count();
  const int cats = config.poi_categories;
  const int lines = config.transport_lines;
  const int steps = config.days * kHoursPerDay;
  const int commercial = 1;
  const int transit = cats - 1;
  const double cell = config.cell_size_m;

  // Spatially smooth base field with mean 1.
  Eigen::VectorXd field = Eigen::VectorXd::Ones(n);
  {
    Source src(nn::mix_seed(seed, kBaseStream));
    const int centers = 4;
    for (int k = 0; k < centers; ++k) {
      const double cx = src.uniform(0.0, (config.cols - 1) * cell);
      const double cy = src.uniform(0.0, (config.rows - 1) * cell);
      const double height = src.uniform(-0.5, 1.0);
      const double width = 2.0 * cell;
      for (int r = 0; r < n; ++r) {
        const Point p = region_centroid(RegionId{r}, scn.grid);
        field[r] += height * bump(std::hypot(p.x - cx, p.y - cy), 0.0, width);
      }
    }
    field = field.cwiseMax(0.2);
    field /= field.mean();
  }

  // Hubs.
  {
    Source src(nn::mix_seed(seed, kHubStream));
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) order[r] = r;
    for (int i = 0; i < config.hubs; ++i) {
      const int j = i + src.below(n - i);
      std::swap(order[i], order[j]);
    }
    scn.hubs.assign(order.begin(), order.begin() + config.hubs);
    std::sort(scn.hubs.begin(), scn.hubs.end());
  }

  // Transport lines: stations every `station_spacing` cells along each path.
  scn.transport.assign(static_cast<std::size_t>(n),
                       TransportProfile{std::vector<int>(static_cast<std::size_t>(lines), 0)});
  std::vector<std::vector<int>> stations(static_cast<std::size_t>(lines));
  {
    Source src(nn::mix_seed(seed, kLineStream));
    for (int m = 0; m < lines; ++m) {
      const auto path = line_path(scn.grid, m % 3, src);
      const int offset = src.below(config.station_spacing);
      for (std::size_t k = static_cast<std::size_t>(offset); k < path.size();
           k += static_cast<std::size_t>(config.station_spacing)) {
        stations[m].push_back(path[k]);
        scn.transport[path[k]].lines[m] = 1;
      }
    }
  }

  // POI counts.
  scn.poi_counts.assign(static_cast<std::size_t>(n), std::vector<int>(cats, 0));
  {
    Source src(nn::mix_seed(seed, kPoiStream));
    for (int r = 0; r < n; ++r) {
      auto& row = scn.poi_counts[r];
      row[0] = 5 + src.below(11);
      for (int c = 1; c < cats; ++c) row[c] = src.below(5);
      if (cats > 2) row[transit] = 0;
    }
    for (int h : scn.hubs) scn.poi_counts[h][commercial] += 40 + src.below(41);
    if (cats > 2) {
      for (int r = 0; r < n; ++r) {
        for (int flag : scn.transport[r].lines) {
          if (flag != 0) scn.poi_counts[r][transit] += 3 + src.below(4);
        }
      }
    }
  }
  Eigen::VectorXd mass(n);
  {
    int heaviest = 1;
    for (int r = 0; r < n; ++r) heaviest = std::max(heaviest, scn.poi_counts[r][commercial]);
    for (int r = 0; r < n; ++r) mass[r] = static_cast<double>(scn.poi_counts[r][commercial]) / heaviest;
  }

  // Spatial smoothing operator for the persistent noise field, rows scaled
  // to unit output variance.
  Eigen::MatrixXd smooth(n, n);
  for (int a = 0; a < n; ++a) {
    const Point pa = region_centroid(RegionId{a}, scn.grid);
    for (int b = 0; b < n; ++b) {
      const Point pb = region_centroid(RegionId{b}, scn.grid);
      smooth(a, b) = bump(std::hypot(pa.x - pb.x, pa.y - pb.y), 0.0, 1.5 * cell);
    }
    smooth.row(a) /= smooth.row(a).norm();
  }

  // Calendar and weather.
  scn.contexts.resize(static_cast<std::size_t>(steps));
  {
    Source src(nn::mix_seed(seed, kWeatherStream));
    const double target[] = {0.5, 0.3, 0.2};
    auto draw = [&] {
      const double u = src.unit();
      return u < target[0] ? Weather::sunny
                           : (u < target[0] + target[1] ? Weather::cloudy : Weather::rainy);
    };
    Weather w = draw();
    for (int t = 0; t < steps; ++t) {
      if (t > 0 && src.unit() >= config.weather_persistence) w = draw();
      const int day = t / kHoursPerDay;
      scn.contexts[t] = ContextRecord{t % kHoursPerDay, w,
                                      day % config.holiday_period == config.holiday_period - 1};
    }
  }

  Source field_src(nn::mix_seed(seed, kFieldNoiseStream));
  Source visit_src(nn::mix_seed(seed, kVisitNoiseStream));
  Source rush_src(nn::mix_seed(seed, kRushNoiseStream));
  Source count_src(nn::mix_seed(seed, kCountNoiseStream));

  Eigen::VectorXd eps = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd eta(n);
  Ar1 city_visits(kVisitRho);
  std::vector<Ar1> hub_visits(static_cast<std::size_t>(n), Ar1(kVisitRho));
  std::vector<Ar1> line_state(static_cast<std::size_t>(lines), Ar1(kLineRho));
  std::vector<std::vector<double>> line_history(static_cast<std::size_t>(lines));

  scn.series.resize(static_cast<std::size_t>(steps));
  for (int t = 0; t < steps; ++t) {
    const ContextRecord& ctx = scn.contexts[t];
    const bool business = !ctx.holiday;
    const int h = ctx.hour;

    for (int r = 0; r < n; ++r) eta[r] = field_src.normal();
    eps = t == 0 ? Eigen::VectorXd(smooth * eta)
                 : Eigen::VectorXd(kFieldRho * eps +
                                   std::sqrt(1.0 - kFieldRho * kFieldRho) * (smooth * eta));

    const double city = city_visits.step(visit_src);
    double damping = 1.0;
    if (ctx.weather == Weather::rainy) damping = config.rain_damping;
    if (ctx.weather == Weather::cloudy) damping = config.cloudy_damping;
    const double visit_level =
        config.hub_amplitude * visit_profile(h) * damping *
        (business ? 1.0 : config.holiday_poi_factor);

    for (int m = 0; m < lines; ++m) line_history[m].push_back(line_state[m].step(rush_src));

    Eigen::VectorXd mean(n);
    const double resident_share = 1.0 - (business ? 0.25 : 0.1) * daytime(h);
    for (int r = 0; r < n; ++r) {
      const double base = config.base_amplitude * field[r];
      double hub_noise = 0.0;
      if (std::binary_search(scn.hubs.begin(), scn.hubs.end(), r)) {
        hub_noise = kHubSd * hub_visits[r].step(visit_src);
      }
      const double visits =
          visit_level * mass[r] * std::max(0.0, 1.0 + config.noise * (kVisitSd * city + hub_noise));
      mean[r] = base * resident_share + visits + config.noise * kFieldScale * base * eps[r];
    }
    if (business) {
      const double rush = config.rush_amplitude * rush_profile(h);
      for (int m = 0; m < lines; ++m) {
        for (std::size_t k = 0; k < stations[m].size(); ++k) {
          // downstream stations see the line's fluctuation later
          const int lag = static_cast<int>(k / 2);
          const double u = line_history[m][static_cast<std::size_t>(std::max(0, t - lag))];
          mean[stations[m][k]] += rush * std::max(0.0, 1.0 + config.noise * kLineSd * u);
        }
      }
    }

    PopulationFrame& frame = scn.series[t];
    frame.time_index = t;
    frame.values.resize(n);
    for (int r = 0; r < n; ++r) {
      const double m = std::max(0.0, mean[r]);
      const double draw = m + config.noise * std::sqrt(m) * count_src.normal();
      frame.values[r] = std::max(0.0, std::round(draw));
    }
  }
  return scn;
}

}  // namespace acmv
