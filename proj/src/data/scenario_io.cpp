// SPDX-License-Identifier: Apache-2.0
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include <json.hpp>

#include "acmv/config.hpp"
#include "acmv/data.hpp"
#include "acmv/errors.hpp"
#include "csv.hpp"

namespace acmv {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw NumericError("cannot format value");
  return std::string(buf, ptr);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

int checked_index(const csv::Reader& r, long v, long limit, const std::string& what) {
  if (v < 0 || v >= limit) {
    r.fail(what + " " + std::to_string(v) + " outside [0, " + std::to_string(limit) + ")");
  }
  return static_cast<int>(v);
}

}  // namespace

void save_scenario(const CityScenario& scenario, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
  const int n = scenario.grid.node_count();

  {
    const auto path = dir / "series.csv";
    auto out = open_out(path);
    out << "t,n,value\n";
    for (const auto& f : scenario.series) {
      if (f.values.size() != n) throw ShapeError("frame size disagrees with the grid");
      for (int r = 0; r < n; ++r) {
        out << f.time_index << ',' << r << ',' << format_real(f.values[r]) << '\n';
      }
    }
    finish(out, path);
  }
  {
    const auto path = dir / "contexts.csv";
    auto out = open_out(path);
    out << "t,hour,weather,holiday\n";
    for (std::size_t t = 0; t < scenario.contexts.size(); ++t) {
      const auto& c = scenario.contexts[t];
      out << t << ',' << c.hour << ',' << to_string(c.weather) << ',' << (c.holiday ? 1 : 0)
          << '\n';
    }
    finish(out, path);
  }
  {
    const auto path = dir / "poi.csv";
    auto out = open_out(path);
    out << "n,category,count\n";
    for (std::size_t r = 0; r < scenario.poi_counts.size(); ++r) {
      for (std::size_t c = 0; c < scenario.poi_counts[r].size(); ++c) {
        out << r << ',' << c << ',' << scenario.poi_counts[r][c] << '\n';
      }
    }
    finish(out, path);
  }
  {
    const auto path = dir / "transport.csv";
    auto out = open_out(path);
    out << "n,line,flag\n";
    for (std::size_t r = 0; r < scenario.transport.size(); ++r) {
      for (std::size_t m = 0; m < scenario.transport[r].lines.size(); ++m) {
        out << r << ',' << m << ',' << scenario.transport[r].lines[m] << '\n';
      }
    }
    finish(out, path);
  }
  {
    const auto path = dir / "regions.csv";
    auto out = open_out(path);
    out << "n,row,col,x,y,hub,station\n";
    const std::set<int> hubs(scenario.hubs.begin(), scenario.hubs.end());
    const auto stations = scenario.station_regions();
    const std::set<int> station_set(stations.begin(), stations.end());
    for (int r = 0; r < n; ++r) {
      const Cell cell = region_cell(RegionId{r}, scenario.grid);
      const Point p = region_centroid(RegionId{r}, scenario.grid);
      out << r << ',' << cell.row << ',' << cell.col << ',' << format_real(p.x) << ','
          << format_real(p.y) << ',' << (hubs.count(r) ? 1 : 0) << ','
          << (station_set.count(r) ? 1 : 0) << '\n';
    }
    finish(out, path);
  }
  {
    const auto path = dir / "grid.json";
    auto out = open_out(path);
    json meta;
    meta["rows"] = scenario.grid.rows();
    meta["cols"] = scenario.grid.cols();
    meta["cell_size_m"] = scenario.grid.cell_size_m();
    meta["seed"] = scenario.seed;
    meta["intervals"] = scenario.intervals();
    meta["poi_categories"] = scenario.poi_counts.empty() ? 0 : scenario.poi_counts[0].size();
    meta["transport_lines"] = scenario.transport.empty() ? 0 : scenario.transport[0].lines.size();
    meta["hubs"] = scenario.hubs;
    meta["generator"] = json::parse(to_json(scenario.config));
    out << meta.dump(2) << '\n';
    finish(out, path);
  }
}

CityScenario load_scenario(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("scenario directory " + dir.string() + " not found");
  for (const char* name : kScenarioFiles) {
    if (!fs::exists(dir / name)) throw IoError("scenario file " + (dir / name).string() + " is missing");
  }

  CityScenario scn;
  json meta;
  {
    std::ifstream in(dir / "grid.json");
    if (!in) throw IoError("cannot open " + (dir / "grid.json").string());
    try {
      meta = json::parse(in);
      scn.grid = GridSpec(meta.at("rows").get<int>(), meta.at("cols").get<int>(),
                          meta.value("cell_size_m", 500.0));
      scn.seed = meta.value("seed", std::uint64_t{0});
      if (meta.contains("hubs")) scn.hubs = meta.at("hubs").get<std::vector<int>>();
      if (meta.contains("generator")) {
        scn.config = parse_generator_config(meta.at("generator").dump());
      }
    } catch (const json::exception& e) {
      throw ParseError("grid.json: " + std::string(e.what()));
    }
  }
  const int n = scn.grid.node_count();

  std::map<long, std::vector<std::pair<int, double>>> rows_by_t;
  {
    csv::Reader r(dir / "series.csv", {"t", "n", "value"});
    while (r.next()) {
      const long t = r.integer(0);
      if (t < 0) r.fail("negative time index");
      const int region = checked_index(r, r.integer(1), n, "region");
      rows_by_t[t].emplace_back(region, r.real(2));
    }
  }
  if (rows_by_t.empty()) throw EmptyDatasetError("series.csv has no rows");
  const long intervals = rows_by_t.rbegin()->first + 1;
  if (static_cast<long>(rows_by_t.size()) != intervals) {
    throw ParseError("series.csv: time indices are not contiguous from 0");
  }
  scn.series.resize(static_cast<std::size_t>(intervals));
  for (const auto& [t, entries] : rows_by_t) {
    auto& frame = scn.series[static_cast<std::size_t>(t)];
    frame.time_index = static_cast<int>(t);
    frame.values = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
    for (const auto& [region, value] : entries) {
      if (!std::isnan(frame.values[region])) {
        throw ParseError("series.csv: duplicate row for t = " + std::to_string(t) +
                         ", n = " + std::to_string(region));
      }
      frame.values[region] = value;
    }
    if (frame.values.hasNaN()) {
      throw ParseError("series.csv: interval " + std::to_string(t) + " is missing regions");
    }
  }

  {
    csv::Reader r(dir / "contexts.csv", {"t", "hour", "weather", "holiday"});
    std::vector<bool> seen(static_cast<std::size_t>(intervals), false);
    scn.contexts.resize(static_cast<std::size_t>(intervals));
    while (r.next()) {
      const int t = checked_index(r, r.integer(0), intervals, "time index");
      if (seen[t]) r.fail("duplicate time index " + std::to_string(t));
      seen[t] = true;
      ContextRecord c;
      c.hour = checked_index(r, r.integer(1), kHoursPerDay, "hour");
      try {
        c.weather = parse_weather(r.text(2));
      } catch (const Error& e) {
        r.fail(e.what());
      }
      const long holiday = r.integer(3);
      if (holiday != 0 && holiday != 1) r.fail("holiday must be 0 or 1");
      c.holiday = holiday == 1;
      scn.contexts[t] = c;
    }
    for (std::size_t t = 0; t < seen.size(); ++t) {
      if (!seen[t]) throw ParseError("contexts.csv: no record for t = " + std::to_string(t));
    }
  }

  {
    csv::Reader r(dir / "poi.csv", {"n", "category", "count"});
    std::vector<std::tuple<int, int, int>> rows;
    int categories = 0;
    while (r.next()) {
      const int region = checked_index(r, r.integer(0), n, "region");
      const long c = r.integer(1);
      if (c < 0) r.fail("negative category");
      const long count = r.integer(2);
      if (count < 0) r.fail("negative POI count");
      rows.emplace_back(region, static_cast<int>(c), static_cast<int>(count));
      categories = std::max(categories, static_cast<int>(c) + 1);
    }
    if (rows.empty()) throw EmptyDatasetError("poi.csv has no rows");
    scn.poi_counts.assign(static_cast<std::size_t>(n), std::vector<int>(categories, 0));
    for (const auto& [region, c, count] : rows) scn.poi_counts[region][c] += count;
  }

  {
    csv::Reader r(dir / "transport.csv", {"n", "line", "flag"});
    std::vector<std::tuple<int, int, int>> rows;
    int lines = 0;
    while (r.next()) {
      const int region = checked_index(r, r.integer(0), n, "region");
      const long m = r.integer(1);
      if (m < 0) r.fail("negative line index");
      const long flag = r.integer(2);
      if (flag != 0 && flag != 1) r.fail("flag must be 0 or 1");
      rows.emplace_back(region, static_cast<int>(m), static_cast<int>(flag));
      lines = std::max(lines, static_cast<int>(m) + 1);
    }
    scn.transport.assign(static_cast<std::size_t>(n),
                         TransportProfile{std::vector<int>(static_cast<std::size_t>(lines), 0)});
    for (const auto& [region, m, flag] : rows) {
      if (flag == 1) scn.transport[region].lines[m] = 1;
    }
  }

  {
    csv::Reader r(dir / "regions.csv", {"n", "row", "col"});
    int count = 0;
    while (r.next()) {
      const int region = checked_index(r, r.integer(0), n, "region");
      const Cell cell = region_cell(RegionId{region}, scn.grid);
      if (r.integer(1) != cell.row || r.integer(2) != cell.col) {
        r.fail("region " + std::to_string(region) + " is not at its row-major cell");
      }
      ++count;
    }
    if (count != n) {
      throw ParseError("regions.csv lists " + std::to_string(count) + " regions, grid has " +
                       std::to_string(n));
    }
  }
  return scn;
}

}  // namespace acmv
