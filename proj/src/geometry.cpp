#include "metspace/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <queue>

namespace metspace {

namespace {

double cell_volume(const GridChart& c, const std::array<std::int64_t, 4>& m) {
  double v = 1.0;
  for (int a = 0; a < c.dim; ++a) {
    double w = c.spacing[a];
    if (c.on_boundary(m, a)) w *= 0.5;  // clipped boundary cell
    v *= w;
  }
  return v;
}

}  // namespace

MeasureReport measure(const MetricField& g, const NodeSet& region) {
  if (region.empty()) throw EmptyRegion("measure: empty region");
  const GridChart& c = g.chart();
  MeasureReport r;
  r.region_nodes = static_cast<NodeIndex>(region.size());
  for (NodeIndex i : region) {
    if (i < 0 || i >= g.node_count()) throw Error("measure: node outside chart");
    if (g.singular(i)) continue;
    r.volume += std::sqrt(spd_det(g.value(i))) * cell_volume(c, c.multi(i));
  }
  return r;
}

double SolverTolerances::stencil_rel(int order) {
  // Worst-case overshoot of the direction cone, measured on the flat case.
  switch (order) {
    case 1: return 0.09;
    case 2: return 0.03;
    default: return 0.02;
  }
}

double SolverTolerances::slack(double distance, double max_spacing, int order) {
  return stencil_rel(order) * distance + 1.0 * max_spacing;
}

namespace {

std::vector<std::array<int, 4>> stencil_offsets(int dim, int order) {
  std::vector<std::array<int, 4>> offsets;
  std::array<int, 4> q{0, 0, 0, 0};
  const int lo = -order, hi = order;
  std::function<void(int)> walk = [&](int axis) {
    if (axis == dim) {
      bool all_zero = true;
      int gcd = 0;
      for (int a = 0; a < dim; ++a) {
        if (q[a] != 0) all_zero = false;
        gcd = std::gcd(gcd, std::abs(q[a]));
      }
      if (!all_zero && gcd == 1) offsets.push_back(q);
      return;
    }
    for (int v = lo; v <= hi; ++v) {
      q[axis] = v;
      walk(axis + 1);
    }
    q[axis] = 0;
  };
  walk(0);
  return offsets;
}

/// For each node, itself when regular, otherwise the nearest regular node
/// (breadth-first over axis neighbors).
std::vector<NodeIndex> nearest_regular(const MetricField& g) {
  const GridChart& c = g.chart();
  const NodeIndex n = g.node_count();
  std::vector<NodeIndex> rep(n, -1);
  std::deque<NodeIndex> queue;
  for (NodeIndex i = 0; i < n; ++i) {
    if (!g.singular(i)) {
      rep[i] = i;
      queue.push_back(i);
    }
  }
  if (queue.empty()) throw AllSingular("distance_map: field has no regular nodes");
  std::array<int, 4> q{0, 0, 0, 0};
  while (!queue.empty()) {
    const NodeIndex i = queue.front();
    queue.pop_front();
    const auto m = c.multi(i);
    for (int a = 0; a < c.dim; ++a) {
      for (int s = -1; s <= 1; s += 2) {
        q.fill(0);
        q[a] = s;
        const NodeIndex j = c.neighbor(m, q);
        if (j >= 0 && rep[j] < 0) {
          rep[j] = rep[i];
          queue.push_back(j);
        }
      }
    }
  }
  return rep;
}

double metric_len(const SmallMat& g, const SmallVec& dx) {
  return std::sqrt(dx.dot(g * dx));
}

}  // namespace

DistanceMap distance_map(const MetricField& g, NodeIndex source,
                         int stencil_order) {
  const GridChart& c = g.chart();
  if (source < 0 || source >= g.node_count())
    throw Error("distance_map: source outside chart");
  if (g.singular(source)) throw SourceSingular("distance_map: source node singular");

  const auto offsets = stencil_offsets(c.dim, stencil_order);
  const auto rep = nearest_regular(g);
  auto value_at = [&](NodeIndex i) -> const SmallMat& {
    return g.value(rep[i]);
  };

  DistanceMap map;
  map.chart = c;
  map.source = source;
  map.stencil_order = stencil_order;
  map.values.assign(g.node_count(), std::numeric_limits<double>::infinity());
  map.values[source] = 0.0;

  using Item = std::pair<double, NodeIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  heap.emplace(0.0, source);
  SmallVec dx(c.dim);
  while (!heap.empty()) {
    const auto [d, i] = heap.top();
    heap.pop();
    if (d > map.values[i]) continue;
    const auto m = c.multi(i);
    for (const auto& q : offsets) {
      const NodeIndex j = c.neighbor(m, q);
      if (j < 0) continue;
      for (int a = 0; a < c.dim; ++a) dx(a) = q[a] * c.spacing[a];
      const double w = 0.5 * (metric_len(value_at(i), dx) + metric_len(value_at(j), dx));
      const double nd = d + w;
      if (nd < map.values[j]) {
        map.values[j] = nd;
        heap.emplace(nd, j);
      }
    }
  }
  return map;
}

double distance(const MetricField& g, NodeIndex x, NodeIndex y, int stencil_order) {
  return distance_map(g, x, stencil_order).values[y];
}

ScalarField to_scalar_field(const DistanceMap& map) {
  ScalarField f;
  f.chart = map.chart;
  f.values = map.values;
  f.mask.assign(map.values.size(), 0);
  for (std::size_t i = 0; i < map.values.size(); ++i)
    if (!std::isfinite(map.values[i])) f.mask[i] = 1;
  return f;
}

ComparabilityReport distance_comparability_check(
    const MetricField& g, const MetricField& h,
    const std::vector<std::pair<NodeIndex, NodeIndex>>& pairs,
    int stencil_order) {
  const ExtendedDistance d = dl(g, h);
  if (d.is_infinite)
    throw NotInSameComponent("distance_comparability_check: infinite distance");

  ComparabilityReport rep;
  rep.dl_value = d.value;

  // Distance maps are reused across pairs sharing a source.
  std::vector<std::pair<NodeIndex, DistanceMap>> maps_g, maps_h;
  auto map_for = [&](std::vector<std::pair<NodeIndex, DistanceMap>>& cache,
                     const MetricField& f, NodeIndex src) -> const DistanceMap& {
    for (const auto& kv : cache)
      if (kv.first == src) return kv.second;
    cache.emplace_back(src, distance_map(f, src, stencil_order));
    return cache.back().second;
  };

  const double hmax = *std::max_element(g.chart().spacing.begin(),
                                        g.chart().spacing.begin() + g.chart().dim);
  for (const auto& [x, y] : pairs) {
    ComparabilityRow row;
    row.x = x;
    row.y = y;
    row.d_g = map_for(maps_g, g, x).values[y];
    row.d_h = map_for(maps_h, h, x).values[y];
    row.ratio = row.d_h / row.d_g;
    rep.rows.push_back(row);

    const double slack =
        2.0 * SolverTolerances::slack(std::max(row.d_g, row.d_h), hmax, stencil_order);
    const double lo = std::exp(-d.value) * row.d_g - slack;
    const double hi = std::exp(d.value) * row.d_g + slack;
    if (row.d_h < lo || row.d_h > hi) rep.within_bounds = false;
    if (row.d_g > 0.0 && row.d_h > 0.0)
      rep.worst_ratio_deviation = std::max(
          rep.worst_ratio_deviation, std::abs(std::log(row.ratio)) - d.value);
  }
  return rep;
}

bool interpolate_metric(const MetricField& h, const SmallVec& y, SmallMat& out) {
  const GridChart& c = h.chart();
  std::array<std::int64_t, 4> base{0, 0, 0, 0};
  std::array<double, 4> frac{0, 0, 0, 0};
  for (int a = 0; a < c.dim; ++a) {
    const double t = (y(a) - c.origin[a]) / c.spacing[a];
    if (c.periodic[a]) {
      const double span = static_cast<double>(c.shape[a]);
      double tm = std::fmod(t, span);
      if (tm < 0) tm += span;
      base[a] = static_cast<std::int64_t>(std::floor(tm));
      frac[a] = tm - static_cast<double>(base[a]);
    } else {
      if (t < -1e-9 || t > static_cast<double>(c.shape[a] - 1) + 1e-9) return false;
      double tc = std::clamp(t, 0.0, static_cast<double>(c.shape[a] - 1));
      base[a] = std::min(static_cast<std::int64_t>(std::floor(tc)), c.shape[a] - 2);
      frac[a] = tc - static_cast<double>(base[a]);
    }
  }
  out = SmallMat::Zero(c.dim, c.dim);
  const int corners = 1 << c.dim;
  std::array<int, 4> q{0, 0, 0, 0};
  for (int s = 0; s < corners; ++s) {
    double w = 1.0;
    for (int a = 0; a < c.dim; ++a) {
      const bool upper = (s >> a) & 1;
      w *= upper ? frac[a] : (1.0 - frac[a]);
      q[a] = upper ? 1 : 0;
    }
    if (w <= 0.0) continue;
    const NodeIndex j = c.neighbor(base, q);
    if (j < 0) return false;
    if (h.singular(j) && w > 1e-12) return false;
    if (!h.singular(j)) out += w * h.value(j);
  }
  out = 0.5 * (out + out.transpose()).eval();
  return true;
}

MetricField pullback_metric(const CoordinateMap& f, const MetricField& h,
                            const GridChart& source_chart,
                            double sing_fraction_max) {
  source_chart.validate();
  const NodeIndex n = source_chart.node_count();
  const int sdim = source_chart.dim;
  const int tdim = h.chart().dim;

  std::vector<SmallMat> values(n);
  std::vector<std::uint8_t> mask(n, 0);
  for (NodeIndex i = 0; i < n; ++i) {
    const SmallVec x = source_chart.coord(i);
    const SmallVec y = f(x);
    if (y.size() != tdim)
      throw DimensionError("pullback_metric: map image dimension mismatch");

    SmallMat hy(tdim, tdim);
    if (!interpolate_metric(h, y, hy))
      throw ImageOutOfChart("pullback_metric: node image leaves target chart");

    // Central finite-difference Jacobian; F is a coordinate map, so sampling
    // just outside the source box is fine.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4> jac(tdim, sdim);
    for (int a = 0; a < sdim; ++a) {
      SmallVec xp = x, xm = x;
      const double step = source_chart.spacing[a];
      xp(a) += step;
      xm(a) -= step;
      jac.col(a) = (f(xp) - f(xm)) / (2.0 * step);
    }
    SmallMat gpb = jac.transpose() * hy * jac;
    gpb = 0.5 * (gpb + gpb.transpose()).eval();
    values[i] = gpb;
    const EigenDecomposition ed = eig_sym(gpb);
    if (!(ed.eigenvalues(0) > eps_spd(gpb))) mask[i] = 1;
  }
  return MetricField(source_chart, std::move(values), std::move(mask),
                     "pullback", sing_fraction_max);
}

MetricField graph_metric(const ScalarField& f, const MetricField& g,
                         const MetricField& g_prime, double sing_fraction_max) {
  if (!(f.chart == g.chart()))
    throw ChartMismatch("graph_metric: scalar field and base metric charts differ");
  if (g_prime.chart().dim != 1)
    throw DimensionError("graph_metric: g_prime must live on a 1-d chart");
  const GridChart& c = g.chart();
  const NodeIndex n = c.node_count();
  const int dim = c.dim;

  std::vector<SmallMat> values(n);
  std::vector<std::uint8_t> mask(n, 0);
  SmallVec grad(dim);
  std::array<int, 4> q{0, 0, 0, 0};
  for (NodeIndex i = 0; i < n; ++i) {
    if (g.singular(i) || f.singular(i)) {
      mask[i] = 1;
      values[i] = SmallMat::Identity(dim, dim);
      continue;
    }
    const auto m = c.multi(i);
    for (int a = 0; a < dim; ++a) {
      q.fill(0);
      q[a] = 1;
      const NodeIndex jp = c.neighbor(m, q);
      q[a] = -1;
      const NodeIndex jm = c.neighbor(m, q);
      const double h = c.spacing[a];
      if (jp >= 0 && jm >= 0)
        grad(a) = (f.values[jp] - f.values[jm]) / (2.0 * h);
      else if (jp >= 0)
        grad(a) = (f.values[jp] - f.values[i]) / h;
      else
        grad(a) = (f.values[i] - f.values[jm]) / h;
    }

    SmallVec fval(1);
    fval(0) = f.values[i];
    SmallMat gp(1, 1);
    if (!interpolate_metric(g_prime, fval, gp))
      throw ImageOutOfChart("graph_metric: f(x) leaves the target chart");
    SmallMat v = g.value(i) + gp(0, 0) * (grad * grad.transpose());
    values[i] = 0.5 * (v + v.transpose()).eval();
  }
  return MetricField(c, std::move(values), std::move(mask), "graph",
                     sing_fraction_max);
}

}  // namespace metspace
