// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>

#include <json.hpp>

#include "acmv/app.hpp"
#include "acmv/errors.hpp"
#include "acmv/nn/checkpoint.hpp"
#include "acmv/train.hpp"
#include "manifest.hpp"

namespace acmv::app {
namespace {

using nlohmann::json;

constexpr const char* kCheckpointFile = "checkpoint.bin";

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void record_config(Manifest& m, const Common& common, const RunConfig& config) {
  m.set("config_path", common.config ? json(common.config->string()) : json(nullptr));
  m.set("config", json::parse(to_json(config)));
  m.set("config_hash", config_hash(config));
  m.set("seed", config.seed);
}

AcmvModel make_model(const VariantSpec& v, const RunConfig& config, const GraphSet& graphs,
                     std::uint64_t seed) {
  switch (v.kind) {
    case VariantKind::temporal_gru:
      return AcmvModel::temporal_only(config.model, graphs.regions(), seed);
    case VariantKind::graph:
      return build_variant(config.model, graphs, v.views, v.fusion, seed);
    default:
      throw ConfigError("variant '" + v.name + "' has no trainable model");
  }
}

void write_eval_csv(std::ostream& out, const EvalResult& r) {
  const auto old_precision = out.precision(17);
  out << "scope,n,mae,rmse,wape\n";
  out << "all,," << r.mae << ',' << r.rmse << ',' << r.wape << '\n';
  for (Eigen::Index n = 0; n < r.region_mae.size(); ++n) {
    out << "region," << n << ',' << r.region_mae[n] << ',' << r.region_rmse[n] << ',';
    if (!std::isnan(r.region_wape[n])) out << r.region_wape[n];
    out << '\n';
  }
  out.precision(old_precision);
}

EvalResult evaluate_test(const AcmvModel& model, const PreparedData& data) {
  std::vector<PopulationFrame> truth;
  for (const auto& w : data.raw.test) truth.push_back(w.target);
  return evaluate(predict_frames(model, data.test_scaled, data.scaler), stack_frames(truth));
}

}  // namespace

RunConfig resolve_config(const Common& common) {
  RunConfig c = common.config ? load_run_config(*common.config) : RunConfig{};
  if (common.seed) {
    c.seed = *common.seed;
    c.training.seed = *common.seed;
  }
  return c;
}

int cmd_synth(const SynthArgs& args) {
  const RunConfig config = resolve_config(args.common);
  const CityScenario scn = generate_city(config.generator, config.seed);
  save_scenario(scn, args.common.out);
  Manifest m("synth");
  record_config(m, args.common, config);
  m.set("out", args.common.out.string());
  m.set("intervals", scn.intervals());
  m.set("regions", scn.grid.node_count());
  for (const char* name : kScenarioFiles) m.output(args.common.out / name);
  m.write(args.common.out);
  std::cout << "wrote scenario with " << scn.grid.node_count() << " regions and "
            << scn.intervals() << " intervals to " << args.common.out.string() << '\n';
  return 0;
}

int cmd_train(const TrainArgs& args) {
  const RunConfig config = resolve_config(args.common);
  const VariantSpec variant = parse_variant(args.variant);
  if (variant.deterministic()) {
    throw ConfigError("variant '" + variant.name + "' has nothing to train; use compare");
  }
  const CityScenario scn = load_scenario(args.scenario);
  const PreparedData data = prepare_data(scn, config);
  AcmvModel model = make_model(variant, config, data.graphs, config.seed);
  ensure_dir(args.common.out);

  const TrainReport report =
      train(model, data.train_scaled, data.val_scaled, data.scaler, config.training,
            [&](const EpochRecord& e) {
              if (args.quiet) return;
              std::cerr << "epoch " << e.epoch << " loss " << e.train_loss << " val_mae "
                        << e.val_mae << " best " << e.best_val_mae << '\n';
            });

  const json meta{{"format", "acmv-checkpoint"},
                  {"variant", variant.name},
                  {"seed", config.seed},
                  {"regions", model.regions()},
                  {"config", json::parse(to_json(config))},
                  {"config_hash", config_hash(config)},
                  {"scaler", {{"q1", data.scaler.q1()}, {"q3", data.scaler.q3()}}},
                  {"best_epoch", report.best_epoch}};
  const fs::path ckpt = args.common.out / kCheckpointFile;
  const auto params = std::as_const(model).parameters();
  nn::save_checkpoint(ckpt, params, meta.dump());

  const fs::path epochs = args.common.out / "epochs.csv";
  {
    auto out = open_out(epochs);
    write_report_csv(out, report);
  }
  const EvalResult test = evaluate_test(model, data);
  const fs::path metrics = args.common.out / "metrics.csv";
  {
    auto out = open_out(metrics);
    write_eval_csv(out, test);
  }

  Manifest m("train");
  record_config(m, args.common, config);
  m.set("variant", variant.name);
  m.input("scenario", args.scenario);
  m.set("best_epoch", report.best_epoch);
  m.set("epochs_run", report.epochs.size());
  m.set("early_stopped", report.early_stopped);
  m.set("wall_seconds", report.wall_seconds);
  m.output(ckpt);
  m.output(epochs);
  m.output(metrics);
  m.write(args.common.out);
  std::cout << "best epoch " << report.best_epoch << ", test MAE " << test.mae << ", RMSE "
            << test.rmse << ", WAPE " << test.wape << "%\n";
  return 0;
}

LoadedRun load_run(const fs::path& checkpoint, const fs::path& scenario) {
  const nn::Checkpoint ckpt = nn::load_checkpoint(checkpoint);
  json meta;
  try {
    meta = json::parse(ckpt.meta);
    if (meta.at("format") != "acmv-checkpoint") throw ParseError("not a training checkpoint");
  } catch (const json::exception& e) {
    throw ParseError(checkpoint.string() + ": bad metadata: " + e.what());
  }
  LoadedRun run;
  run.config = parse_run_config(meta.at("config").dump());
  if (config_hash(run.config) != meta.at("config_hash").get<std::string>()) {
    throw ParseError(checkpoint.string() + ": config hash does not match its config");
  }
  run.variant = parse_variant(meta.at("variant").get<std::string>());
  const CityScenario scn = load_scenario(scenario);
  const int regions = meta.at("regions").get<int>();
  if (scn.grid.node_count() != regions) {
    throw ShapeError("checkpoint was trained on " + std::to_string(regions) +
                     " regions, scenario has " + std::to_string(scn.grid.node_count()));
  }
  run.grid = scn.grid;
  run.data = prepare_data(scn, run.config);
  const Scaler stored(meta.at("scaler").at("q1").get<double>(),
                      meta.at("scaler").at("q3").get<double>());
  if (stored.q1() != run.data.scaler.q1() || stored.q3() != run.data.scaler.q3()) {
    run.data.scaler = stored;
    run.data.train_scaled = scale_windows(run.data.raw.train.windows, stored);
    run.data.val_scaled = scale_windows(run.data.raw.val, stored);
    run.data.test_scaled = scale_windows(run.data.raw.test, stored);
  }
  run.model.emplace(
      make_model(run.variant, run.config, run.data.graphs, meta.at("seed").get<std::uint64_t>()));
  nn::restore_params(ckpt, run.model->parameters());
  return run;
}

namespace {

LoadedRun load_checked(const Common& common, const fs::path& checkpoint,
                       const fs::path& scenario) {
  LoadedRun run = load_run(checkpoint, scenario);
  if (common.config) {
    RunConfig given = load_run_config(*common.config);
    if (config_hash(given) != config_hash(run.config)) {
      throw ConfigError("config " + common.config->string() +
                        " does not match the one the checkpoint was trained with");
    }
  }
  return run;
}

}  // namespace

int cmd_evaluate(const EvaluateArgs& args) {
  LoadedRun run = load_checked(args.common, args.checkpoint, args.scenario);
  const EvalResult r = evaluate_test(*run.model, run.data);
  ensure_dir(args.common.out);
  const fs::path metrics = args.common.out / "metrics.csv";
  {
    auto out = open_out(metrics);
    write_eval_csv(out, r);
  }
  Manifest m("evaluate");
  record_config(m, args.common, run.config);
  m.set("variant", run.variant.name);
  m.input("checkpoint", args.checkpoint);
  m.input("scenario", args.scenario);
  m.output(metrics);
  m.write(args.common.out);
  std::cout << "test MAE " << r.mae << ", RMSE " << r.rmse << ", WAPE " << r.wape << "%\n";
  return 0;
}

int cmd_compare(const CompareArgs& args) {
  const RunConfig config = resolve_config(args.common);
  const auto variants = parse_variants(args.variants);
  std::vector<std::uint64_t> seeds = args.seeds;
  if (seeds.empty()) {
    const int runs = std::max(1, args.runs);
    for (int k = 0; k < runs; ++k) seeds.push_back(config.seed + static_cast<std::uint64_t>(k));
  }
  const CityScenario scn = load_scenario(args.scenario);
  ensure_dir(args.common.out);

  ComparisonOptions opts;
  opts.jobs = args.jobs;
  opts.on_run = [&](const RunResult& r) {
    if (args.quiet) return;
    std::cerr << r.variant << " seed " << r.seed << ": ";
    if (r.ok) {
      std::cerr << "MAE " << r.eval.mae << " RMSE " << r.eval.rmse << " WAPE " << r.eval.wape
                << "%\n";
    } else {
      std::cerr << "failed: " << r.error << '\n';
    }
  };
  const ComparisonTable table = run_comparison(scn, variants, seeds, config, opts);

  const fs::path runs = args.common.out / "runs.csv";
  const fs::path summary = args.common.out / "summary.csv";
  {
    auto out = open_out(runs);
    write_runs_csv(out, table);
  }
  {
    auto out = open_out(summary);
    write_summary_csv(out, table);
  }
  Manifest m("compare");
  record_config(m, args.common, config);
  json names = json::array();
  for (const auto& v : variants) names.push_back(v.name);
  m.set("variants", names);
  m.set("seeds", seeds);
  m.set("jobs", args.jobs);
  json failures = json::array();
  for (const auto& r : table.runs) {
    if (!r.ok) failures.push_back({{"variant", r.variant}, {"seed", r.seed}, {"error", r.error}});
  }
  m.set("failures", failures);
  m.input("scenario", args.scenario);
  m.output(runs);
  m.output(summary);
  m.write(args.common.out);
  write_summary_csv(std::cout, table);
  if (table.successes() == 0) {
    std::cerr << "every run failed\n";
    return 2;
  }
  return 0;
}

int cmd_export_attention(const ExportArgs& args) {
  LoadedRun run = load_checked(args.common, args.checkpoint, args.scenario);
  const auto& test = run.data.raw.test;
  const int first = test.front().target.time_index;
  const int end = test.back().target.time_index + 1;
  const int from = args.from.value_or(first);
  const int to = args.to.value_or(end);
  if (from < first || to > end || from >= to) {
    throw BoundsError("interval range [" + std::to_string(from) + ", " + std::to_string(to) +
                      ") is outside the test split [" + std::to_string(first) + ", " +
                      std::to_string(end) + ")");
  }
  std::vector<SeriesWindow> selected;
  for (const auto& w : run.data.test_scaled) {
    if (w.target.time_index >= from && w.target.time_index < to) selected.push_back(w);
  }
  const auto results = run.model->forward_all(selected);
  std::vector<int> times;
  std::vector<AttentionWeights> weights;
  for (std::size_t i = 0; i < results.size(); ++i) {
    times.push_back(selected[i].target.time_index);
    weights.push_back(results[i].weights);
  }

  ensure_dir(args.common.out);
  const fs::path csv = args.common.out / "attention.csv";
  const fs::path geo = args.common.out / "attention.geojson";
  {
    auto out = open_out(csv);
    write_attention_csv(out, times, weights);
  }
  {
    auto out = open_out(geo);
    write_attention_geojson(out, run.grid, times, weights);
  }
  Manifest m("export-attention");
  record_config(m, args.common, run.config);
  m.set("variant", run.variant.name);
  m.set("from", from);
  m.set("to", to);
  m.input("checkpoint", args.checkpoint);
  m.input("scenario", args.scenario);
  m.output(csv);
  m.output(geo);
  m.write(args.common.out);
  std::cout << "exported " << times.size() << " intervals to " << args.common.out.string()
            << '\n';
  return 0;
}

}  // namespace acmv::app
