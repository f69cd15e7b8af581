// SPDX-License-Identifier: Apache-2.0
#include "acmv/comparison.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "acmv/errors.hpp"
#include "acmv/train.hpp"

namespace acmv {
namespace {

const std::vector<std::string> kTable1 = {"ha", "persistence", "gru", "mv-gcns", "acmv-gcns"};
const std::vector<std::string> kTable2 = {"dist",           "poi",           "transport",
                                          "dist+poi",       "dist+transport", "poi+transport",
                                          "acmv-gcns"};

Eigen::MatrixXd targets(std::span<const SeriesWindow> windows) {
  std::vector<PopulationFrame> frames;
  frames.reserve(windows.size());
  for (const auto& w : windows) frames.push_back(w.target);
  return stack_frames(frames);
}

void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
  mean = sd = std::numeric_limits<double>::quiet_NaN();
  if (xs.empty()) return;
  double s = 0.0;
  for (double x : xs) s += x;
  mean = s / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
}

void run_model(AcmvModel model, RunResult& r, const PreparedData& data,
               const RunConfig& config, std::uint64_t seed, bool keep_outputs) {
  TrainOptions opts = config.training;
  opts.seed = seed;
  r.report = train(model, data.train_scaled, data.val_scaled, data.scaler, opts);
  const auto results = model.forward_all(data.test_scaled);
  const Eigen::Index n = model.regions();
  Eigen::MatrixXd pred(static_cast<Eigen::Index>(results.size()), n);
  for (std::size_t i = 0; i < results.size(); ++i) {
    pred.row(static_cast<Eigen::Index>(i)) =
        data.scaler.unscale(results[i].prediction).transpose();
  }
  r.eval = evaluate(pred, targets(data.raw.test));
  if (!keep_outputs) return;
  r.test_predictions = pred;
  r.test_view_predictions = Eigen::MatrixXd::Zero(pred.rows() * n, 3);
  std::vector<int> active;
  for (const auto& b : model.blocks()) active.push_back(b.kind ? static_cast<int>(*b.kind) : 0);
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (int col : active) {
      r.test_view_predictions.block(static_cast<Eigen::Index>(i) * n, col, n, 1) =
          data.scaler.unscale(Eigen::VectorXd(results[i].view_predictions.col(col)));
    }
    r.test_weights.push_back(results[i].weights);
  }
}

}  // namespace

std::vector<std::string> known_variant_names() {
  return {"ha",  "persistence", "gru",           "dist",    "poi",      "transport",
          "dist+poi", "dist+transport", "poi+transport", "mv-gcns", "acmv-gcns"};
}

VariantSpec parse_variant(std::string_view name) {
  VariantSpec v;
  v.name = std::string(name);
  if (name == "ha") {
    v.kind = VariantKind::historical_average;
  } else if (name == "persistence") {
    v.kind = VariantKind::persistence;
  } else if (name == "gru") {
    v.kind = VariantKind::temporal_gru;
  } else if (name == "mv-gcns" || name == "acmv-gcns") {
    v.views = {kAllViews.begin(), kAllViews.end()};
    v.fusion = name == "mv-gcns" ? FusionMode::average : FusionMode::attention;
  } else {
    std::string_view rest = name;
    while (!rest.empty()) {
      const auto plus = rest.find('+');
      const std::string_view part = rest.substr(0, plus);
      try {
        v.views.push_back(parse_view(part));
      } catch (const ParseError&) {
        v.views.clear();
        break;
      }
      rest = plus == std::string_view::npos ? std::string_view{} : rest.substr(plus + 1);
    }
    const std::set<ViewKind> distinct(v.views.begin(), v.views.end());
    if (v.views.empty() || distinct.size() != v.views.size()) {
      std::string valid;
      for (const auto& k : known_variant_names()) valid += (valid.empty() ? "" : ", ") + k;
      throw ConfigError("unknown variant '" + std::string(name) + "' (valid: " + valid +
                        "; presets: table1, table2, all)");
    }
  }
  return v;
}

std::vector<VariantSpec> parse_variants(std::span<const std::string> names) {
  std::vector<VariantSpec> out;
  auto add = [&](const std::vector<std::string>& list) {
    for (const auto& n : list) out.push_back(parse_variant(n));
  };
  for (const auto& name : names) {
    if (name == "table1") {
      add(kTable1);
    } else if (name == "table2") {
      add(kTable2);
    } else if (name == "all") {
      add(known_variant_names());
    } else {
      out.push_back(parse_variant(name));
    }
  }
  if (out.empty()) throw ConfigError("no variants selected");
  return out;
}

int ComparisonTable::successes() const {
  int n = 0;
  for (const auto& r : runs) n += r.ok ? 1 : 0;
  return n;
}

RunResult run_variant(const VariantSpec& variant, std::uint64_t seed,
                      const PreparedData& data, const RunConfig& config,
                      bool keep_outputs) {
  RunResult r;
  r.variant = variant.name;
  r.seed = seed;
  try {
    switch (variant.kind) {
      case VariantKind::historical_average: {
        std::set<int> seen;
        std::vector<PopulationFrame> frames;
        std::vector<ContextRecord> contexts;
        for (const auto& w : data.raw.train.windows) {
          for (int t = 0; t <= w.length(); ++t) {
            const PopulationFrame& f = t < w.length() ? w.inputs[t] : w.target;
            if (!seen.insert(f.time_index).second) continue;
            frames.push_back(f);
            contexts.push_back(w.contexts[t]);
          }
        }
        const auto ha = HistoricalAverage::fit(frames, contexts);
        std::vector<PopulationFrame> pred;
        for (const auto& w : data.raw.test) {
          pred.push_back(ha.predict(w.contexts.back(), w.target.time_index));
        }
        r.eval = evaluate(stack_frames(pred), targets(data.raw.test));
        if (keep_outputs) r.test_predictions = stack_frames(pred);
        break;
      }
      case VariantKind::persistence: {
        std::vector<PopulationFrame> pred;
        for (const auto& w : data.raw.test) pred.push_back(persistence(w));
        r.eval = evaluate(stack_frames(pred), targets(data.raw.test));
        if (keep_outputs) r.test_predictions = stack_frames(pred);
        break;
      }
      case VariantKind::temporal_gru:
        run_model(AcmvModel::temporal_only(config.model, data.graphs.regions(), seed), r, data,
                  config, seed, keep_outputs);
        break;
      case VariantKind::graph:
        run_model(build_variant(config.model, data.graphs, variant.views, variant.fusion, seed),
                  r, data, config, seed, keep_outputs);
        break;
    }
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

ComparisonTable run_comparison(const CityScenario& scenario,
                               std::span<const VariantSpec> variants,
                               std::span<const std::uint64_t> seeds, const RunConfig& config,
                               const ComparisonOptions& options) {
  if (variants.empty()) throw ConfigError("no variants selected");
  if (seeds.empty()) throw ConfigError("no seeds selected");
  if (options.jobs < 1) throw ConfigError("--jobs must be at least 1");
  const PreparedData data = prepare_data(scenario, config);

  ComparisonTable table;
  const std::size_t total = variants.size() * seeds.size();
  table.runs.resize(total);
  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const auto& v = variants[i / seeds.size()];
      table.runs[i] = run_variant(v, seeds[i % seeds.size()], data, config, options.keep_outputs);
      if (options.on_run) {
        std::lock_guard lock(report_mutex);
        options.on_run(table.runs[i]);
      }
    }
  };
  const int threads = static_cast<int>(std::min<std::size_t>(options.jobs, total));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t v = 0; v < variants.size(); ++v) {
    VariantSummary s;
    s.variant = variants[v].name;
    std::vector<double> mae, rmse, wape;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const auto& r = table.runs[v * seeds.size() + k];
      ++s.runs;
      if (!r.ok) {
        ++s.failures;
        continue;
      }
      mae.push_back(r.eval.mae);
      rmse.push_back(r.eval.rmse);
      wape.push_back(r.eval.wape);
    }
    mean_std(mae, s.mae_mean, s.mae_std);
    mean_std(rmse, s.rmse_mean, s.rmse_std);
    mean_std(wape, s.wape_mean, s.wape_std);
    table.summary.push_back(s);
  }
  return table;
}

void write_runs_csv(std::ostream& out, const ComparisonTable& table) {
  out << "variant,seed,mae,rmse,wape\n";
  const auto old_precision = out.precision(17);
  for (const auto& r : table.runs) {
    out << r.variant << ',' << r.seed << ',';
    if (r.ok) {
      out << r.eval.mae << ',' << r.eval.rmse << ',' << r.eval.wape << '\n';
    } else {
      out << ",,\n";
    }
  }
  out.precision(old_precision);
}

void write_summary_csv(std::ostream& out, const ComparisonTable& table) {
  out << "variant,runs,failures,mae_mean,mae_std,rmse_mean,rmse_std,wape_mean,wape_std\n";
  const auto old_precision = out.precision(17);
  for (const auto& s : table.summary) {
    out << s.variant << ',' << s.runs << ',' << s.failures << ',';
    if (s.failures == s.runs) {
      out << ",,,,,\n";
      continue;
    }
    out << s.mae_mean << ',' << s.mae_std << ',' << s.rmse_mean << ',' << s.rmse_std << ','
        << s.wape_mean << ',' << s.wape_std << '\n';
  }
  out.precision(old_precision);
}

}  // namespace acmv
