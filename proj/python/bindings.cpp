// SPDX-License-Identifier: Apache-2.0
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "acmv/app.hpp"
#include "acmv/attention.hpp"
#include "acmv/config.hpp"
#include "acmv/data.hpp"
#include "acmv/errors.hpp"
#include "acmv/graph.hpp"
#include "acmv/metrics.hpp"
#include "acmv/model.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace acmv;

namespace {

RunConfig config_or_default(const std::optional<std::string>& json_text) {
  return json_text ? parse_run_config(*json_text) : RunConfig{};
}

app::Common common(const std::optional<fs::path>& config, std::optional<std::uint64_t> seed,
                   const fs::path& out) {
  app::Common c;
  c.config = config;
  c.seed = seed;
  c.out = out;
  return c;
}

Eigen::MatrixXd series_matrix(const CityScenario& s) { return stack_frames(s.series); }

py::dict eval_dict(const EvalResult& r) {
  py::dict d;
  d["mae"] = r.mae;
  d["rmse"] = r.rmse;
  d["wape"] = r.wape;
  d["region_mae"] = r.region_mae;
  d["region_rmse"] = r.region_rmse;
  d["region_wape"] = r.region_wape;
  return d;
}

// Runs a loaded checkpoint over its test split.
py::dict predict_test(const app::LoadedRun& run) {
  const auto& windows = run.data.raw.test;
  const int t = static_cast<int>(windows.size());
  const int n = run.grid.node_count();
  Eigen::MatrixXd pred(t, n), truth(t, n);
  py::array_t<double> weights({t, n, 3});
  auto w = weights.mutable_unchecked<3>();
  std::vector<int> times;
  {
    py::gil_scoped_release release;
    for (int i = 0; i < t; ++i) {
      const Prediction p = predict(*run.model, windows[i], run.data.scaler);
      pred.row(i) = p.frame.values.transpose();
      truth.row(i) = windows[i].target.values.transpose();
      times.push_back(windows[i].target.time_index);
      for (int r = 0; r < n; ++r)
        for (int v = 0; v < 3; ++v) w(i, r, v) = p.weights.w(r, v);
    }
  }
  py::dict d;
  d["predictions"] = pred;
  d["truth"] = truth;
  d["weights"] = weights;
  d["time_index"] = times;
  return d;
}

}  // namespace

PYBIND11_MODULE(_acmv, m) {
  m.doc() = "Population forecasting on multi-view region graphs";
  m.attr("__version__") = "0.1.0";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<BoundsError>(m, "BoundsError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<StateError>(m, "StateError", base.ptr());
  py::register_exception<EmptyDatasetError>(m, "EmptyDatasetError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());

  // Configuration travels as JSON text.
  m.def("default_config", [] { return to_json(RunConfig{}); });
  m.def("canonical_config", [](const std::string& text) { return to_json(parse_run_config(text)); },
        py::arg("json"));
  m.def("config_hash", [](const std::string& text) { return config_hash(parse_run_config(text)); },
        py::arg("json"));
  m.def("variant_names", &known_variant_names);

  py::class_<CityScenario>(m, "Scenario")
      .def_property_readonly("rows", [](const CityScenario& s) { return s.grid.rows(); })
      .def_property_readonly("cols", [](const CityScenario& s) { return s.grid.cols(); })
      .def_property_readonly("cell_size_m",
                             [](const CityScenario& s) { return s.grid.cell_size_m(); })
      .def_property_readonly("regions", [](const CityScenario& s) { return s.grid.node_count(); })
      .def_property_readonly("intervals", &CityScenario::intervals)
      .def_readonly("seed", &CityScenario::seed)
      .def_readonly("hubs", &CityScenario::hubs)
      .def_readonly("poi_counts", &CityScenario::poi_counts)
      .def_property_readonly("series", &series_matrix)
      .def_property_readonly("hours",
                             [](const CityScenario& s) {
                               std::vector<int> h;
                               for (const auto& c : s.contexts) h.push_back(c.hour);
                               return h;
                             })
      .def_property_readonly("holidays",
                             [](const CityScenario& s) {
                               std::vector<bool> h;
                               for (const auto& c : s.contexts) h.push_back(c.holiday);
                               return h;
                             })
      .def("station_regions", &CityScenario::station_regions)
      .def("save", [](const CityScenario& s, const fs::path& dir) { save_scenario(s, dir); },
           py::arg("dir"))
      .def_static("load", &load_scenario, py::arg("dir"));

  m.def(
      "generate_city",
      [](const std::optional<std::string>& config, std::optional<std::uint64_t> seed) {
        const RunConfig c = config_or_default(config);
        py::gil_scoped_release release;
        return generate_city(c.generator, seed.value_or(c.seed));
      },
      py::arg("config") = py::none(), py::arg("seed") = py::none());

  m.def("normalized_laplacian", &normalized_laplacian, py::arg("adjacency"));
  m.def("scaled_laplacian", &scaled_laplacian, py::arg("laplacian"), py::arg("lambda_max"));
  m.def(
      "estimate_lambda_max",
      [](const Eigen::MatrixXd& l) {
        const LambdaEstimate e = estimate_lambda_max(l);
        return py::make_tuple(e.value, e.converged);
      },
      py::arg("laplacian"));
  m.def("fuse", &fuse, py::arg("view_predictions"), py::arg("weights"));

  m.def(
      "fit_quartile_scaler",
      [](std::vector<double> values) {
        const Scaler s = fit_quartile_scaler(values);
        return py::make_tuple(s.q1(), s.q3());
      },
      py::arg("values"));
  m.def(
      "evaluate",
      [](const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth) {
        return eval_dict(evaluate(pred, truth));
      },
      py::arg("pred"), py::arg("truth"));

  // The command-line subcommands. Each returns its exit code.
  m.def(
      "synth",
      [](const fs::path& out, std::optional<fs::path> config, std::optional<std::uint64_t> seed) {
        py::gil_scoped_release release;
        return app::cmd_synth({common(config, seed, out)});
      },
      py::arg("out"), py::arg("config") = py::none(), py::arg("seed") = py::none());
  m.def(
      "train",
      [](const fs::path& scenario, const fs::path& out, const std::string& variant,
         std::optional<fs::path> config, std::optional<std::uint64_t> seed, bool quiet) {
        app::TrainArgs a;
        a.common = common(config, seed, out);
        a.scenario = scenario;
        a.variant = variant;
        a.quiet = quiet;
        py::gil_scoped_release release;
        return app::cmd_train(a);
      },
      py::arg("scenario"), py::arg("out"), py::arg("variant") = "acmv-gcns",
      py::arg("config") = py::none(), py::arg("seed") = py::none(), py::arg("quiet") = true);
  m.def(
      "evaluate_checkpoint",
      [](const fs::path& checkpoint, const fs::path& scenario, const fs::path& out,
         std::optional<fs::path> config) {
        app::EvaluateArgs a;
        a.common = common(config, std::nullopt, out);
        a.checkpoint = checkpoint;
        a.scenario = scenario;
        py::gil_scoped_release release;
        return app::cmd_evaluate(a);
      },
      py::arg("checkpoint"), py::arg("scenario"), py::arg("out"),
      py::arg("config") = py::none());
  m.def(
      "export_attention",
      [](const fs::path& checkpoint, const fs::path& scenario, const fs::path& out,
         std::optional<fs::path> config, std::optional<int> from, std::optional<int> to) {
        app::ExportArgs a;
        a.common = common(config, std::nullopt, out);
        a.checkpoint = checkpoint;
        a.scenario = scenario;
        a.from = from;
        a.to = to;
        py::gil_scoped_release release;
        return app::cmd_export_attention(a);
      },
      py::arg("checkpoint"), py::arg("scenario"), py::arg("out"),
      py::arg("config") = py::none(), py::arg("from_") = py::none(),
      py::arg("to") = py::none());
  m.def(
      "compare",
      [](const fs::path& scenario, const fs::path& out, std::vector<std::string> variants,
         std::vector<std::uint64_t> seeds, int jobs, std::optional<fs::path> config,
         bool quiet) {
        app::CompareArgs a;
        a.common = common(config, std::nullopt, out);
        a.scenario = scenario;
        a.variants = std::move(variants);
        a.seeds = std::move(seeds);
        a.jobs = jobs;
        a.quiet = quiet;
        py::gil_scoped_release release;
        return app::cmd_compare(a);
      },
      py::arg("scenario"), py::arg("out"),
      py::arg("variants") = std::vector<std::string>{"table1"},
      py::arg("seeds") = std::vector<std::uint64_t>{}, py::arg("jobs") = 1,
      py::arg("config") = py::none(), py::arg("quiet") = true);

  py::class_<app::LoadedRun>(m, "Run")
      .def_property_readonly("variant",
                             [](const app::LoadedRun& r) { return r.variant.name; })
      .def_property_readonly("config", [](const app::LoadedRun& r) { return to_json(r.config); })
      .def_property_readonly(
          "scaler", [](const app::LoadedRun& r) {
            return py::make_tuple(r.data.scaler.q1(), r.data.scaler.q3());
          })
      .def("predict_test", &predict_test);
  m.def("load_run", &app::load_run, py::arg("checkpoint"), py::arg("scenario"));
}
