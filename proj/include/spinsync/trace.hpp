#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "spinsync/types.hpp"

namespace spinsync {

// Reduced two-qubit states of one site pair, one 4x4 matrix per grid point.
// Basis order: bit 0 = first (lower) site, bit value 1 = excited.
struct PairSeries {
  int u = 0, v = 0;  // 1-based, u < v
  std::vector<Eigen::Matrix4cd> rho;
};

// Uniform-grid time series with named real channels.
struct Trace {
  std::vector<double> tau;
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
  std::vector<PairSeries> pairs;
  std::vector<Mat> snapshots;  // optional state snapshots every snapshot_stride points
  int snapshot_stride = 0;

  int index_of(std::string_view name) const;
  bool has(std::string_view name) const { return index_of(name) >= 0; }
  const std::vector<double>& channel(std::string_view name) const;  // throws if missing
  std::vector<double>& add(std::string name);
  const PairSeries& pair(int u, int v) const;  // throws if missing
  double dt() const;
};

}  // namespace spinsync
