// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <type_traits>

#include "acmv/data.hpp"
#include "acmv/errors.hpp"
#include "support.hpp"

using namespace acmv;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

std::vector<SeriesWindow> ramp_windows(int count, int regions = 2, int length = 2) {
  std::vector<PopulationFrame> series;
  std::vector<ContextRecord> contexts;
  for (int t = 0; t < count + length; ++t) {
    series.push_back({Eigen::VectorXd::Constant(regions, t), t});
    contexts.push_back({t % 24, Weather::sunny, false});
  }
  return make_windows(series, contexts, length);
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("acmv_test_data_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("linear percentiles") {
  std::vector<double> hundred(100);
  std::iota(hundred.begin(), hundred.end(), 1.0);
  CHECK(linear_percentile(hundred, 25.0) == Approx(25.75));
  CHECK(linear_percentile(hundred, 75.0) == Approx(75.25));
  CHECK(linear_percentile(hundred, 0.0) == 1.0);
  CHECK(linear_percentile(hundred, 100.0) == 100.0);
  const std::vector<double> two{0.0, 10.0};
  CHECK(linear_percentile(two, 25.0) == Approx(2.5));
  CHECK(linear_percentile(two, 75.0) == Approx(7.5));
  const std::vector<double> one{4.0};
  CHECK(linear_percentile(one, 40.0) == 4.0);
  CHECK_THROWS_AS(linear_percentile(std::vector<double>{}, 50.0), EmptyDatasetError);
  CHECK_THROWS_AS(linear_percentile(two, 101.0), BoundsError);
}

TEST_CASE("quartile scaler") {
  std::vector<double> values(100);
  std::iota(values.begin(), values.end(), 1.0);
  std::reverse(values.begin(), values.end());
  const Scaler s = fit_quartile_scaler(values);
  CHECK(s.q1() == Approx(25.75));
  CHECK(s.q3() == Approx(75.25));
  CHECK(s.scale(25.75) == Approx(0.0));
  CHECK(s.scale(75.25) == Approx(1.0));

  const Scaler t(10.0, 30.0);
  CHECK(t.scale(20.0) == 0.5);
  CHECK(t.unscale(0.5) == 20.0);
  CHECK(t.scale(Eigen::Vector2d(10, 50)) == Eigen::Vector2d(0, 2));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e4, 1e4);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    CHECK(t.unscale(t.scale(x)) == Approx(x).epsilon(1e-12));
  }

  CHECK_THROWS_AS(fit_quartile_scaler(std::vector<double>(10, 3.0)), NumericError);
  CHECK_THROWS_AS(Scaler(2.0, 2.0), NumericError);
  CHECK_THROWS_AS(Scaler(3.0, 2.0), NumericError);
  const Scaler unfitted;
  CHECK_FALSE(unfitted.fitted());
  CHECK_THROWS_AS(unfitted.scale(1.0), StateError);
  CHECK_THROWS_AS(unfitted.q1(), StateError);
}

TEST_CASE("chronological split") {
  static_assert(!std::is_convertible_v<std::vector<SeriesWindow>, TrainSplit>);
  static_assert(std::is_invocable_v<decltype(&fit_scaler), const TrainSplit&>);
  static_assert(!std::is_invocable_v<decltype(&fit_scaler), const std::vector<SeriesWindow>&>);

  const DatasetSplits s = chronological_split(ramp_windows(100), {});
  CHECK(s.train.windows.size() == 80);
  CHECK(s.val.size() == 10);
  CHECK(s.test.size() == 10);
  CHECK(s.train.windows.back().target.time_index < s.val.front().target.time_index);
  CHECK(s.val.back().target.time_index < s.test.front().target.time_index);
  for (std::size_t i = 1; i < s.test.size(); ++i) {
    CHECK(s.test[i].target.time_index == s.test[i - 1].target.time_index + 1);
  }

  const DatasetSplits odd = chronological_split(ramp_windows(33), {0.7, 0.15, 0.15});
  CHECK(odd.train.windows.size() + odd.val.size() + odd.test.size() == 33);
  CHECK(odd.train.windows.size() == 23);
  CHECK(odd.val.size() == 5);

  // target indices are disjoint across splits
  std::set<int> targets;
  for (const auto& w : s.train.windows) CHECK(targets.insert(w.target.time_index).second);
  for (const auto& w : s.val) CHECK(targets.insert(w.target.time_index).second);
  for (const auto& w : s.test) CHECK(targets.insert(w.target.time_index).second);
  CHECK(s.test.back().target.time_index == 101);

  CHECK_THROWS_AS(chronological_split(ramp_windows(3), {}), EmptyDatasetError);
  CHECK_THROWS_AS(chronological_split(ramp_windows(20), {0.5, 0.5, 0.5}), ConfigError);
  CHECK_THROWS_AS(chronological_split(ramp_windows(20), {1.0, 0.0, 0.0}), ConfigError);
}

TEST_CASE("scaler is fitted on distinct training frames only") {
  // frames 0..9 appear in overlapping windows; each is counted once
  auto windows = ramp_windows(8, 1, 2);
  TrainSplit train{windows};
  const Scaler s = fit_scaler(train);
  std::vector<double> values(10);
  std::iota(values.begin(), values.end(), 0.0);
  CHECK(s.q1() == Approx(linear_percentile(values, 25)));
  CHECK(s.q3() == Approx(linear_percentile(values, 75)));

  const DatasetSplits split = chronological_split(ramp_windows(100), {});
  const Scaler from_train = fit_scaler(split.train);
  // the ramp keeps growing, so test values must land above the train quartiles
  CHECK(from_train.q3() < split.test.front().target.values[0]);

  const SeriesWindow scaled = scale_window(split.test.front(), from_train);
  CHECK(scaled.target.values[0] == Approx(from_train.scale(split.test.front().target.values[0])));
  CHECK(scaled.contexts == split.test.front().contexts);
  CHECK_THROWS_AS(fit_scaler(TrainSplit{}), EmptyDatasetError);
}

TEST_CASE("generator is deterministic in config and seed") {
  const GeneratorConfig cfg = testing::tiny_generator();
  const CityScenario a = generate_city(cfg, 5);
  const CityScenario b = generate_city(cfg, 5);
  const CityScenario c = generate_city(cfg, 6);
  REQUIRE(a.intervals() == b.intervals());
  bool differs = false;
  for (int t = 0; t < a.intervals(); ++t) {
    CHECK(a.series[t].values == b.series[t].values);
    CHECK(a.contexts[t] == b.contexts[t]);
    if (a.series[t].values != c.series[t].values) differs = true;
  }
  CHECK(a.poi_counts == b.poi_counts);
  CHECK(a.hubs == b.hubs);
  CHECK(differs);
}

TEST_CASE("generated scenario structure") {
  GeneratorConfig cfg = testing::tiny_generator();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const CityScenario s = generate_city(cfg, seed);
    const int n = cfg.rows * cfg.cols;
    CHECK(s.grid == GridSpec(cfg.rows, cfg.cols, cfg.cell_size_m));
    REQUIRE(s.intervals() == cfg.days * 24);
    REQUIRE(s.contexts.size() == s.series.size());
    for (int t = 0; t < s.intervals(); ++t) {
      const auto& v = s.series[t].values;
      REQUIRE(v.size() == n);
      CHECK(s.series[t].time_index == t);
      CHECK(v.minCoeff() >= 0.0);
      CHECK((v.array() == v.array().round()).all());
      CHECK(s.contexts[t].hour == t % 24);
      const int day = t / 24;
      CHECK(s.contexts[t].holiday == (day % cfg.holiday_period == cfg.holiday_period - 1));
    }
    REQUIRE(s.poi_counts.size() == static_cast<std::size_t>(n));
    for (const auto& row : s.poi_counts) {
      CHECK(row.size() == static_cast<std::size_t>(cfg.poi_categories));
      CHECK(*std::min_element(row.begin(), row.end()) >= 0);
    }
    REQUIRE(s.transport.size() == static_cast<std::size_t>(n));
    std::vector<int> stations_per_line(cfg.transport_lines, 0);
    for (const auto& p : s.transport) {
      REQUIRE(p.lines.size() == static_cast<std::size_t>(cfg.transport_lines));
      for (int m = 0; m < cfg.transport_lines; ++m) {
        CHECK((p.lines[m] == 0 || p.lines[m] == 1));
        stations_per_line[m] += p.lines[m];
      }
    }
    for (int count : stations_per_line) CHECK(count >= 1);
    CHECK_FALSE(s.station_regions().empty());
    CHECK(std::set<int>(s.hubs.begin(), s.hubs.end()).size() == static_cast<std::size_t>(cfg.hubs));
  }
}

TEST_CASE("generated dynamics carry the intended daily structure") {
  GeneratorConfig cfg = testing::tiny_generator();
  cfg.days = 14;
  const CityScenario s = generate_city(cfg, 2);
  auto mean_at = [&](int region, int hour, bool holiday) {
    double total = 0.0;
    int count = 0;
    for (int t = 0; t < s.intervals(); ++t) {
      if (s.contexts[t].hour == hour && s.contexts[t].holiday == holiday) {
        total += s.series[t].values[region];
        ++count;
      }
    }
    return total / count;
  };
  for (int hub : s.hubs) CHECK(mean_at(hub, 12, false) > mean_at(hub, 3, false) + 100.0);
  for (int st : s.station_regions()) CHECK(mean_at(st, 8, false) > mean_at(st, 3, false));

  GeneratorConfig quiet = cfg;
  quiet.hub_amplitude = 0.0;
  quiet.rush_amplitude = 0.0;
  quiet.noise = 0.0;
  const CityScenario flat = generate_city(quiet, 2);
  // without visitors, rushes and noise a frame depends only on hour and day type
  for (int t = 24; t < flat.intervals(); ++t) {
    for (int u = t % 24; u < t; u += 24) {
      if (flat.contexts[u].holiday == flat.contexts[t].holiday) {
        CHECK(flat.series[u].values == flat.series[t].values);
      }
    }
  }
}

TEST_CASE("all terms off gives an all-zero city") {
  GeneratorConfig cfg = testing::tiny_generator();
  cfg.noise = 0.0;
  cfg.base_amplitude = 0.0;
  cfg.hub_amplitude = 0.0;
  cfg.rush_amplitude = 0.0;
  const CityScenario s = generate_city(cfg, 3);
  for (const auto& f : s.series) CHECK(f.values.isZero(0.0));
}

TEST_CASE("invalid generator configs") {
  auto bad = [](auto edit) {
    GeneratorConfig c = testing::tiny_generator();
    edit(c);
    return c;
  };
  CHECK_THROWS_AS(generate_city(bad([](auto& c) { c.rows = 0; }), 1), ConfigError);
  CHECK_THROWS_AS(generate_city(bad([](auto& c) { c.poi_categories = 1; }), 1), ConfigError);
  CHECK_THROWS_AS(generate_city(bad([](auto& c) { c.hubs = 13; }), 1), ConfigError);
  CHECK_THROWS_AS(generate_city(bad([](auto& c) { c.noise = -1; }), 1), ConfigError);
  CHECK_THROWS_AS(generate_city(bad([](auto& c) { c.rain_damping = 1.5; }), 1), ConfigError);
  CHECK_THROWS_AS(generate_city(bad([](auto& c) { c.weather_persistence = 1.0; }), 1),
                  ConfigError);
}

TEST_CASE("scenario bundle round trip") {
  const CityScenario s = generate_city(testing::tiny_generator(), 9);
  const fs::path dir = scratch("roundtrip");
  save_scenario(s, dir);
  for (const char* name : kScenarioFiles) CHECK(fs::exists(dir / name));
  const CityScenario r = load_scenario(dir);
  CHECK(r.grid == s.grid);
  CHECK(r.seed == s.seed);
  CHECK(r.hubs == s.hubs);
  CHECK(r.poi_counts == s.poi_counts);
  REQUIRE(r.transport.size() == s.transport.size());
  for (std::size_t n = 0; n < s.transport.size(); ++n) CHECK(r.transport[n].lines == s.transport[n].lines);
  REQUIRE(r.intervals() == s.intervals());
  for (int t = 0; t < s.intervals(); ++t) {
    CHECK(r.series[t].values == s.series[t].values);
    CHECK(r.contexts[t] == s.contexts[t]);
  }
  CHECK(r.config.days == s.config.days);
  CHECK(r.config.noise == s.config.noise);
  fs::remove_all(dir);
}

TEST_CASE("scenario loading rejects broken bundles") {
  const CityScenario s = generate_city(testing::tiny_generator(), 9);
  const fs::path dir = scratch("broken");
  save_scenario(s, dir);
  const std::string series = slurp(dir / "series.csv");
  const std::string contexts = slurp(dir / "contexts.csv");

  CHECK_THROWS_AS(load_scenario(dir / "nowhere"), IoError);

  SUBCASE("missing file") {
    fs::remove(dir / "poi.csv");
    CHECK_THROWS_AS(load_scenario(dir), IoError);
  }
  SUBCASE("malformed number") {
    spit(dir / "series.csv", series + "5,0,abc\n");
    CHECK_THROWS_AS(load_scenario(dir), ParseError);
  }
  SUBCASE("missing column") {
    spit(dir / "series.csv", "t,n\n0,0\n");
    try {
      load_scenario(dir);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("'value'") != std::string::npos);
    }
  }
  SUBCASE("errors carry the line number") {
    spit(dir / "series.csv", "t,n,value\n0,0,1\n0,1,x\n");
    try {
      load_scenario(dir);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("duplicate row") {
    spit(dir / "series.csv", series + "0,0,1\n");
    CHECK_THROWS_AS(load_scenario(dir), ParseError);
  }
  SUBCASE("missing region in an interval") {
    const auto cut = series.rfind('\n', series.size() - 2);
    spit(dir / "series.csv", series.substr(0, cut + 1));
    CHECK_THROWS_AS(load_scenario(dir), ParseError);
  }
  SUBCASE("bad weather label") {
    const auto first = contexts.find('\n');
    const auto second = contexts.find('\n', first + 1);
    std::string line = contexts.substr(first + 1, second - first - 1);
    for (const char* w : {"sunny", "cloudy", "rainy"}) {
      if (const auto p = line.find(w); p != std::string::npos) line.replace(p, std::strlen(w), "foggy");
    }
    spit(dir / "contexts.csv", contexts.substr(0, first + 1) + line + contexts.substr(second));
    CHECK_THROWS_AS(load_scenario(dir), ParseError);
  }
  SUBCASE("header-only series") {
    spit(dir / "series.csv", "t,n,value\n");
    CHECK_THROWS_AS(load_scenario(dir), EmptyDatasetError);
  }
  SUBCASE("empty file") {
    spit(dir / "transport.csv", "");
    CHECK_THROWS_AS(load_scenario(dir), EmptyDatasetError);
  }
  SUBCASE("broken grid json") {
    spit(dir / "grid.json", "{\"rows\": 3,");
    CHECK_THROWS_AS(load_scenario(dir), ParseError);
  }
  fs::remove_all(dir);
}
