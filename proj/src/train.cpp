// SPDX-License-Identifier: Apache-2.0
#include "acmv/train.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "acmv/errors.hpp"
#include "acmv/metrics.hpp"
#include "acmv/nn/init.hpp"

namespace acmv {
namespace {

constexpr std::uint64_t kShuffleStream = 0x5348;

void shuffle(std::vector<int>& order, nn::Rng& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const auto j = std::min(i - 1, static_cast<std::size_t>(u * static_cast<double>(i)));
    std::swap(order[i - 1], order[j]);
  }
}

}  // namespace

Eigen::MatrixXd predict_frames(const AcmvModel& model,
                               std::span<const SeriesWindow> scaled_windows,
                               const Scaler& scaler) {
  const auto results = model.forward_all(scaled_windows);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(results.size()), model.regions());
  for (std::size_t i = 0; i < results.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = scaler.unscale(results[i].prediction).transpose();
  }
  return out;
}

TrainReport train(AcmvModel& model, std::span<const SeriesWindow> train_windows,
                  std::span<const SeriesWindow> val_windows, const Scaler& scaler,
                  const TrainOptions& options, const EpochCallback& on_epoch) {
  if (train_windows.empty()) throw EmptyDatasetError("training split is empty");
  if (val_windows.empty()) throw EmptyDatasetError("validation split is empty");
  if (options.epochs < 0) throw ConfigError("training.epochs must be nonnegative");
  if (options.batch_size < 1) throw ConfigError("training.batch_size must be positive");
  if (!(options.clip_norm > 0.0)) throw ConfigError("training.clip_norm must be positive");

  const auto start = std::chrono::steady_clock::now();
  TrainReport report;
  if (options.epochs == 0) return report;

  auto params = model.parameters();
  nn::zero_grads(params);
  nn::Adam adam(params, options.adam);
  nn::Rng rng(nn::mix_seed(options.seed, kShuffleStream));

  Eigen::MatrixXd truth(static_cast<Eigen::Index>(val_windows.size()), model.regions());
  for (std::size_t i = 0; i < val_windows.size(); ++i) {
    truth.row(static_cast<Eigen::Index>(i)) =
        scaler.unscale(val_windows[i].target.values).transpose();
  }

  std::vector<int> order(train_windows.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<nn::Matrix> best;
  double best_mae = std::numeric_limits<double>::infinity();
  int stagnant = 0;
  std::vector<const SeriesWindow*> batch;
  const auto batch_size = static_cast<std::size_t>(options.batch_size);

  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    shuffle(order, rng);
    double total = 0.0;
    for (std::size_t first = 0; first < order.size(); first += batch_size) {
      const std::size_t last = std::min(order.size(), first + batch_size);
      batch.clear();
      nn::Matrix target(model.regions(), static_cast<Eigen::Index>(last - first));
      for (std::size_t i = first; i < last; ++i) {
        const SeriesWindow& w = train_windows[static_cast<std::size_t>(order[i])];
        batch.push_back(&w);
        target.col(static_cast<Eigen::Index>(i - first)) = w.target.values;
      }
      nn::Tape tape;
      const auto out = model.forward(tape, batch);
      const nn::Var l = nn::mse(out.fused, tape.constant(std::move(target)));
      const double value = l.value()(0, 0);
      if (!std::isfinite(value)) {
        throw NumericError("training diverged: loss is " + std::to_string(value) +
                           " in epoch " + std::to_string(epoch));
      }
      tape.backward(l);
      nn::clip_grad_norm(params, options.clip_norm);
      adam.step();
      total += value * static_cast<double>(last - first);
    }

    const EvalResult ev = evaluate(predict_frames(model, val_windows, scaler), truth);
    if (!std::isfinite(ev.mae)) {
      throw NumericError("validation MAE is not finite in epoch " + std::to_string(epoch));
    }
    if (ev.mae < best_mae) {
      best_mae = ev.mae;
      report.best_epoch = epoch;
      best.clear();
      for (const auto* p : params) best.push_back(p->value());
      stagnant = 0;
    } else {
      ++stagnant;
    }
    EpochRecord rec{epoch, total / static_cast<double>(order.size()), ev.mae, ev.rmse,
                    ev.wape, best_mae};
    report.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (options.patience > 0 && stagnant >= options.patience) {
      report.early_stopped = true;
      break;
    }
  }

  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value() = best[i];
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_report_csv(std::ostream& out, const TrainReport& report) {
  out << "epoch,train_loss,val_mae,val_rmse,val_wape,best_val_mae\n";
  const auto old_precision = out.precision(17);
  for (const auto& e : report.epochs) {
    out << e.epoch << ',' << e.train_loss << ',' << e.val_mae << ',' << e.val_rmse << ','
        << e.val_wape << ',' << e.best_val_mae << '\n';
  }
  out.precision(old_precision);
}

}  // namespace acmv
