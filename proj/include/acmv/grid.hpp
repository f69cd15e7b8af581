// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "acmv/context.hpp"

namespace acmv {

/// I x J partition of a city. Nodes are numbered row-major.
class GridSpec {
 public:
  GridSpec(int rows, int cols, double cell_size_m = 500.0);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  double cell_size_m() const noexcept { return cell_size_m_; }
  int node_count() const noexcept { return rows_ * cols_; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int rows_;
  int cols_;
  double cell_size_m_;
};

struct RegionId {
  int index = 0;
  friend auto operator<=>(const RegionId&, const RegionId&) = default;
};

struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

RegionId region_index(int row, int col, const GridSpec& grid);
Cell region_cell(RegionId id, const GridSpec& grid);

/// Cell centroid in meters; origin at the centroid of cell (0, 0), x grows
/// with the column index and y with the row index.
Point region_centroid(RegionId id, const GridSpec& grid);

/// Population over all regions at one time interval, stored flat.
struct PopulationFrame {
  Eigen::VectorXd values;
  int time_index = 0;
};

/// Flat frame -> rows x cols image (the 1 x I x J tensor without the
/// channel axis).
Eigen::MatrixXd frame_to_grid(const PopulationFrame& frame, const GridSpec& grid);
PopulationFrame frame_from_grid(const Eigen::MatrixXd& image, int time_index);

struct SeriesWindow {
  std::vector<PopulationFrame> inputs;    // L consecutive frames
  PopulationFrame target;                 // frame right after the inputs
  std::vector<ContextRecord> contexts;    // L + 1: inputs then target

  int length() const noexcept { return static_cast<int>(inputs.size()); }
};

/// Sliding windows of `length` input frames with a one-step-ahead target.
/// Produces T - length windows; window k reads frames [k, k + length).
std::vector<SeriesWindow> make_windows(std::span<const PopulationFrame> series,
                                       std::span<const ContextRecord> contexts,
                                       int length);

}  // namespace acmv
