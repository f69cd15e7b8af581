// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "acmv/model.hpp"
#include "acmv/nn/adam.hpp"

namespace acmv {

struct TrainOptions {
  int epochs = 200;
  int batch_size = 32;
  nn::AdamConfig adam{};
  int patience = 20;        // epochs without val MAE improvement
  double clip_norm = 5.0;   // global gradient norm
  std::uint64_t seed = 0;   // shuffling
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_mae = 0.0;
  double val_rmse = 0.0;
  double val_wape = 0.0;
  double best_val_mae = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  int best_epoch = -1;
  double wall_seconds = 0.0;
  bool early_stopped = false;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam on the mean window MSE. Windows are in scaled space; the
/// scaler only maps validation predictions back to persons for the metrics.
/// On return the model holds the parameters of the best validation epoch.
TrainReport train(AcmvModel& model, std::span<const SeriesWindow> train_windows,
                  std::span<const SeriesWindow> val_windows, const Scaler& scaler,
                  const TrainOptions& options, const EpochCallback& on_epoch = {});

/// Predictions in persons for raw windows, stacked T' x N.
Eigen::MatrixXd predict_frames(const AcmvModel& model,
                               std::span<const SeriesWindow> scaled_windows,
                               const Scaler& scaler);

/// `epoch,train_loss,val_mae,val_rmse,val_wape,best_val_mae`
void write_report_csv(std::ostream& out, const TrainReport& report);

}  // namespace acmv
