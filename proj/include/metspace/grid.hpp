#pragma once

#include "metspace/types.hpp"

#include <array>
#include <cstdint>

namespace metspace {

/// Rectangular chart grid.  Node ordering is row-major with the last axis
/// fastest; cross-tool consumers must match this ordering.
struct GridChart {
  int dim = 2;  // 1..4 (4 is needed by the product-chart constructions)
  std::array<std::int64_t, 4> shape{2, 2, 2, 2};
  std::array<double, 4> spacing{1.0, 1.0, 1.0, 1.0};
  std::array<double, 4> origin{0.0, 0.0, 0.0, 0.0};
  std::array<bool, 4> periodic{false, false, false, false};

  void validate() const;

  NodeIndex node_count() const;

  NodeIndex index(const std::array<std::int64_t, 4>& multi) const;
  std::array<std::int64_t, 4> multi(NodeIndex node) const;

  /// Chart coordinates of a node.
  SmallVec coord(NodeIndex node) const;

  /// Physical extent along an axis, (shape-1)*spacing.
  double extent(int axis) const;

  /// True when the node lies on a non-periodic chart boundary along `axis`.
  bool on_boundary(const std::array<std::int64_t, 4>& multi, int axis) const;

  /// Neighbor of `multi` offset by q along the axes; returns -1 when the
  /// offset leaves a non-periodic chart.
  NodeIndex neighbor(const std::array<std::int64_t, 4>& multi,
                     const std::array<int, 4>& q) const;

  bool operator==(const GridChart& o) const;
};

/// Uniform chart [lo, hi]^dim with `n` nodes per axis.
GridChart make_box_chart(int dim, double lo, double hi, std::int64_t n);

}  // namespace metspace
