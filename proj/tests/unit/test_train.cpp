// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <limits>
#include <sstream>

#include "acmv/errors.hpp"
#include "acmv/metrics.hpp"
#include "acmv/train.hpp"
#include "model_fixture.hpp"

using namespace acmv;
using namespace acmv::testing;
using doctest::Approx;

namespace {

constexpr int kN = 6;

// target is a smoothed copy of the last frame, so there is something to learn
std::vector<SeriesWindow> learnable(int count, std::uint64_t seed) {
  auto windows = toy_windows(kN, 3, count, seed);
  for (auto& w : windows) {
    w.target.values = 0.7 * w.inputs.back().values + 0.3 * w.inputs[1].values;
  }
  return windows;
}

TrainOptions quick(int epochs, double lr = 1e-2) {
  TrainOptions o;
  o.epochs = epochs;
  o.batch_size = 4;
  o.adam.lr = lr;
  o.patience = 0;
  o.seed = 3;
  return o;
}

std::vector<nn::Matrix> snapshot(AcmvModel& m) {
  std::vector<nn::Matrix> out;
  for (auto* p : m.parameters()) out.push_back(p->value());
  return out;
}

}  // namespace

TEST_CASE("zero epochs leaves the model untouched") {
  const GraphSet g = toy_graphs(kN, 1);
  AcmvModel model = build_variant(toy_config(), g, kAllViews, FusionMode::attention, 1);
  const auto before = snapshot(model);
  const auto train_w = learnable(8, 1), val_w = learnable(3, 2);
  const TrainReport r = train(model, train_w, val_w, Scaler(0.0, 1.0), quick(0));
  CHECK(r.epochs.empty());
  CHECK(r.best_epoch == -1);
  CHECK(snapshot(model) == before);
}

TEST_CASE("zero learning rate keeps the loss constant") {
  const GraphSet g = toy_graphs(kN, 1);
  AcmvModel model = build_variant(toy_config(), g, kAllViews, FusionMode::attention, 1);
  const auto before = snapshot(model);
  const auto train_w = learnable(10, 1), val_w = learnable(3, 2);
  const TrainReport r = train(model, train_w, val_w, Scaler(0.0, 1.0), quick(4, 0.0));
  REQUIRE(r.epochs.size() == 4);
  for (const auto& e : r.epochs) {
    CHECK(e.train_loss == Approx(r.epochs[0].train_loss).epsilon(1e-12));
    CHECK(e.val_mae == r.epochs[0].val_mae);
  }
  CHECK(snapshot(model) == before);
}

TEST_CASE("training is reproducible") {
  const GraphSet g = toy_graphs(kN, 1);
  const auto train_w = learnable(12, 1), val_w = learnable(4, 2);
  AcmvModel a = build_variant(toy_config(), g, kAllViews, FusionMode::attention, 5);
  AcmvModel b = build_variant(toy_config(), g, kAllViews, FusionMode::attention, 5);
  const TrainReport ra = train(a, train_w, val_w, Scaler(0.0, 1.0), quick(3));
  const TrainReport rb = train(b, train_w, val_w, Scaler(0.0, 1.0), quick(3));
  REQUIRE(ra.epochs.size() == rb.epochs.size());
  for (std::size_t i = 0; i < ra.epochs.size(); ++i) {
    CHECK(ra.epochs[i].train_loss == rb.epochs[i].train_loss);
    CHECK(ra.epochs[i].val_mae == rb.epochs[i].val_mae);
  }
  CHECK(snapshot(a) == snapshot(b));

  TrainOptions other = quick(3);
  other.seed = 4;
  AcmvModel c = build_variant(toy_config(), g, kAllViews, FusionMode::attention, 5);
  const TrainReport rc = train(c, train_w, val_w, Scaler(0.0, 1.0), other);
  CHECK(rc.epochs.back().train_loss != ra.epochs.back().train_loss);
}

TEST_CASE("training learns and restores the best epoch") {
  const GraphSet g = toy_graphs(kN, 1);
  AcmvModel model = build_variant(toy_config(), g, kAllViews, FusionMode::attention, 2);
  const auto train_w = learnable(24, 1), val_w = learnable(6, 2);
  const Scaler scaler(0.0, 1.0);
  const TrainReport r = train(model, train_w, val_w, scaler, quick(25));
  REQUIRE(r.best_epoch >= 1);
  const double first = r.epochs.front().val_mae;
  const double best = r.epochs[r.best_epoch - 1].val_mae;
  CHECK(best < first);
  CHECK(r.epochs.back().train_loss < r.epochs.front().train_loss);
  for (const auto& e : r.epochs) CHECK(e.best_val_mae >= best);

  Eigen::MatrixXd truth(static_cast<Eigen::Index>(val_w.size()), kN);
  for (std::size_t i = 0; i < val_w.size(); ++i) truth.row(i) = val_w[i].target.values;
  CHECK(evaluate(predict_frames(model, val_w, scaler), truth).mae == Approx(best).epsilon(1e-12));
}

TEST_CASE("patience stops a stalled run") {
  const GraphSet g = toy_graphs(kN, 1);
  AcmvModel model = build_variant(toy_config(), g, kAllViews, FusionMode::attention, 2);
  const auto train_w = learnable(8, 1), val_w = learnable(3, 2);
  TrainOptions o = quick(50, 0.0);
  o.patience = 2;
  const TrainReport r = train(model, train_w, val_w, Scaler(0.0, 1.0), o);
  CHECK(r.early_stopped);
  CHECK(r.epochs.size() == 3);
  CHECK(r.best_epoch == 1);
}

TEST_CASE("training errors") {
  const GraphSet g = toy_graphs(kN, 1);
  AcmvModel model = build_variant(toy_config(), g, kAllViews, FusionMode::attention, 2);
  const auto w = learnable(4, 1);
  const Scaler s(0.0, 1.0);
  CHECK_THROWS_AS(train(model, {}, w, s, quick(1)), EmptyDatasetError);
  CHECK_THROWS_AS(train(model, w, {}, s, quick(1)), EmptyDatasetError);
  TrainOptions bad = quick(1);
  bad.batch_size = 0;
  CHECK_THROWS_AS(train(model, w, w, s, bad), ConfigError);
  bad = quick(-1);
  CHECK_THROWS_AS(train(model, w, w, s, bad), ConfigError);

  auto poisoned = w;
  poisoned[0].inputs[0].values[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(train(model, poisoned, w, s, quick(1)), NumericError);
}

TEST_CASE("epoch report csv") {
  TrainReport r;
  r.epochs.push_back({1, 0.5, 10.25, 12.0, 30.0, 10.25});
  r.epochs.push_back({2, 0.25, 11.0, 13.0, 31.0, 10.25});
  std::ostringstream out;
  write_report_csv(out, r);
  CHECK(out.str() ==
        "epoch,train_loss,val_mae,val_rmse,val_wape,best_val_mae\n"
        "1,0.5,10.25,12,30,10.25\n"
        "2,0.25,11,13,31,10.25\n");
}
