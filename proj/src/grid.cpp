// SPDX-License-Identifier: Apache-2.0
#include "acmv/grid.hpp"

#include <string>

#include "acmv/errors.hpp"

namespace acmv {

GridSpec::GridSpec(int rows, int cols, double cell_size_m)
    : rows_(rows), cols_(cols), cell_size_m_(cell_size_m) {
  if (rows < 1 || cols < 1) {
    throw ConfigError("grid must have at least one row and column, got " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (!(cell_size_m > 0.0)) {
    throw ConfigError("cell size must be positive");
  }
}

RegionId region_index(int row, int col, const GridSpec& grid) {
  if (row < 0 || row >= grid.rows() || col < 0 || col >= grid.cols()) {
    throw BoundsError("cell (" + std::to_string(row) + ", " + std::to_string(col) +
                      ") outside " + std::to_string(grid.rows()) + "x" +
                      std::to_string(grid.cols()) + " grid");
  }
  return RegionId{row * grid.cols() + col};
}

Cell region_cell(RegionId id, const GridSpec& grid) {
  if (id.index < 0 || id.index >= grid.node_count()) {
    throw BoundsError("region " + std::to_string(id.index) + " outside [0, " +
                      std::to_string(grid.node_count()) + ")");
  }
  return Cell{id.index / grid.cols(), id.index % grid.cols()};
}

Point region_centroid(RegionId id, const GridSpec& grid) {
  const Cell c = region_cell(id, grid);
  return Point{c.col * grid.cell_size_m(), c.row * grid.cell_size_m()};
}

Eigen::MatrixXd frame_to_grid(const PopulationFrame& frame, const GridSpec& grid) {
  if (frame.values.size() != grid.node_count()) {
    throw ShapeError("frame has " + std::to_string(frame.values.size()) +
                     " values, grid has " + std::to_string(grid.node_count()) + " cells");
  }
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(frame.values.data(), grid.rows(), grid.cols());
}

PopulationFrame frame_from_grid(const Eigen::MatrixXd& image, int time_index) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor rm = image;
  PopulationFrame frame;
  frame.values = Eigen::Map<const Eigen::VectorXd>(rm.data(), rm.size());
  frame.time_index = time_index;
  return frame;
}

std::vector<SeriesWindow> make_windows(std::span<const PopulationFrame> series,
                                       std::span<const ContextRecord> contexts,
                                       int length) {
  if (length < 1) throw ConfigError("window length must be at least 1");
  if (contexts.size() != series.size()) {
    throw ShapeError("series has " + std::to_string(series.size()) + " frames but " +
                     std::to_string(contexts.size()) + " context records");
  }
  const auto total = static_cast<int>(series.size());
  if (total < length + 1) {
    throw EmptyDatasetError("series of " + std::to_string(total) +
                            " frames is too short for windows of length " +
                            std::to_string(length));
  }
  std::vector<SeriesWindow> windows;
  windows.reserve(total - length);
  for (int k = 0; k + length < total; ++k) {
    SeriesWindow w;
    w.inputs.assign(series.begin() + k, series.begin() + k + length);
    w.target = series[k + length];
    w.contexts.assign(contexts.begin() + k, contexts.begin() + k + length + 1);
    windows.push_back(std::move(w));
  }
  return windows;
}

}  // namespace acmv
