#include "metspace/grid.hpp"

#include <cmath>

namespace metspace {

void GridChart::validate() const {
  if (dim < 1 || dim > 4) throw DimensionError("GridChart: dim must be 1..4");
  for (int a = 0; a < dim; ++a) {
    if (shape[a] < 2) throw Error("GridChart: shape must be >= 2 per axis");
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
      throw Error("GridChart: spacing must be positive and finite");
    if (!std::isfinite(origin[a])) throw Error("GridChart: origin not finite");
  }
}

NodeIndex GridChart::node_count() const {
  NodeIndex n = 1;
  for (int a = 0; a < dim; ++a) n *= shape[a];
  return n;
}

NodeIndex GridChart::index(const std::array<std::int64_t, 4>& m) const {
  NodeIndex id = 0;
  for (int a = 0; a < dim; ++a) id = id * shape[a] + m[a];
  return id;
}

std::array<std::int64_t, 4> GridChart::multi(NodeIndex node) const {
  std::array<std::int64_t, 4> m{0, 0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    m[a] = node % shape[a];
    node /= shape[a];
  }
  return m;
}

SmallVec GridChart::coord(NodeIndex node) const {
  const auto m = multi(node);
  SmallVec x(dim);
  for (int a = 0; a < dim; ++a) x(a) = origin[a] + spacing[a] * m[a];
  return x;
}

double GridChart::extent(int axis) const {
  return spacing[axis] * static_cast<double>(shape[axis] - 1);
}

bool GridChart::on_boundary(const std::array<std::int64_t, 4>& m,
                            int axis) const {
  if (periodic[axis]) return false;
  return m[axis] == 0 || m[axis] == shape[axis] - 1;
}

NodeIndex GridChart::neighbor(const std::array<std::int64_t, 4>& m,
                              const std::array<int, 4>& q) const {
  std::array<std::int64_t, 4> t = m;
  for (int a = 0; a < dim; ++a) {
    t[a] += q[a];
    if (periodic[a]) {
      t[a] = ((t[a] % shape[a]) + shape[a]) % shape[a];
    } else if (t[a] < 0 || t[a] >= shape[a]) {
      return -1;
    }
  }
  return index(t);
}

bool GridChart::operator==(const GridChart& o) const {
  if (dim != o.dim) return false;
  for (int a = 0; a < dim; ++a) {
    if (shape[a] != o.shape[a] || spacing[a] != o.spacing[a] ||
        origin[a] != o.origin[a] || periodic[a] != o.periodic[a])
      return false;
  }
  return true;
}

GridChart make_box_chart(int dim, double lo, double hi, std::int64_t n) {
  GridChart c;
  c.dim = dim;
  for (int a = 0; a < dim; ++a) {
    c.shape[a] = n;
    c.origin[a] = lo;
    c.spacing[a] = (hi - lo) / static_cast<double>(n - 1);
    c.periodic[a] = false;
  }
  c.validate();
  return c;
}

}  // namespace metspace
