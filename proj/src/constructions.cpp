#include "metspace/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace metspace {

MetricField nonapprox_metric(const GridChart& chart, double jump,
                             double ball_radius) {
  if (!(jump >= 1.0)) throw Error("nonapprox_metric: jump must be >= 1");
  const int dim = chart.dim;
  return build_metric(chart, [=](const SmallVec& x) {
    const double f = (x.norm() < ball_radius) ? 1.0 : jump;
    return SmallMat(f * SmallMat::Identity(dim, dim));
  });
}

FieldGenerator unbounded_conformal(int dim, double shell_width) {
  if (!(shell_width > 0.0)) throw Error("unbounded_conformal: bad shell width");
  FieldGenerator gen;
  gen.dim = dim;
  gen.at = [dim, shell_width](const SmallVec& x) {
    const double rinf = x.cwiseAbs().maxCoeff();
    const double j = std::floor(rinf / shell_width);
    return SmallMat(std::pow(2.0, j) * SmallMat::Identity(dim, dim));
  };
  return gen;
}

FieldGenerator flat_generator(int dim) {
  FieldGenerator gen;
  gen.dim = dim;
  gen.at = [dim](const SmallVec&) {
    return SmallMat(SmallMat::Identity(dim, dim));
  };
  return gen;
}

namespace {

double polyline_length(const std::vector<SmallVec>& pts) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    len += (pts[i + 1] - pts[i]).norm();
  return len;
}

std::vector<SmallVec> bowed_polyline(const SmallVec& a, const SmallVec& b,
                                     double target_length, int segments) {
  const SmallVec delta = b - a;
  const double base = delta.norm();
  // Deterministic bow direction: the coordinate axis least aligned with the
  // chord, orthogonalized against it.
  int axis = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < a.size(); ++i) {
    const double align = std::abs(delta(i)) / std::max(base, 1e-300);
    if (align < best) {
      best = align;
      axis = i;
    }
  }
  SmallVec normal = SmallVec::Zero(a.size());
  normal(axis) = 1.0;
  normal -= normal.dot(delta) / (base * base) * delta;
  normal.normalize();

  auto build = [&](double amp) {
    std::vector<SmallVec> pts;
    pts.reserve(segments + 1);
    for (int s = 0; s <= segments; ++s) {
      const double t = static_cast<double>(s) / segments;
      pts.push_back(a + t * delta + amp * std::sin(M_PI * t) * normal);
    }
    return pts;
  };

  double lo = 0.0, hi = base;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (polyline_length(build(mid)) < target_length)
      lo = mid;
    else
      hi = mid;
  }
  return build(lo);
}

double point_segment_distance(const SmallVec& x, const SmallVec& a,
                              const SmallVec& b) {
  const SmallVec d = b - a;
  const double n2 = d.squaredNorm();
  if (n2 <= 0.0) return (x - a).norm();
  const double t = std::clamp((x - a).dot(d) / n2, 0.0, 1.0);
  return (x - (a + t * d)).norm();
}

double distance_to_polyline(const SmallVec& x, const std::vector<SmallVec>& pts) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    d = std::min(d, point_segment_distance(x, pts[i], pts[i + 1]));
  return d;
}

double tube_budget(int k, int l, int m, double epsilon) {
  return std::pow(2.0, -static_cast<double>(k + l + m)) * epsilon;
}

/// Largest tube radius whose full 4-d tube volume stays below a quarter of
/// the budget, leaving headroom for grid quadrature of the superlevel sets.
double radius_for_budget(double length, double budget, double cap) {
  auto volume = [&](double rho) {
    return (4.0 * M_PI / 3.0) * rho * rho * rho * (length + 2.0 * rho);
  };
  if (volume(cap) <= 0.25 * budget) return cap;
  double lo = 0.0, hi = cap;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (volume(mid) <= 0.25 * budget)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

CurveNetwork make_network(const std::vector<SmallVec>& points,
                          const std::vector<int>& m_values, double tube_radius,
                          double epsilon_budget) {
  if (points.size() < 2) throw Error("make_network: need at least two points");
  CurveNetwork net;
  net.points = points;
  net.tube_radius = tube_radius;
  net.epsilon_budget = epsilon_budget;
  for (std::size_t k = 0; k < points.size(); ++k) {
    for (std::size_t l = k + 1; l < points.size(); ++l) {
      for (int m : m_values) {
        CurveNetwork::Curve curve;
        curve.k = static_cast<int>(k) + 1;
        curve.l = static_cast<int>(l) + 1;
        curve.m = m;
        const double base = (points[l] - points[k]).norm();
        // Stay strictly inside the (1 + 1/m) bound.
        const double target = (1.0 + 0.5 / m) * base;
        curve.polyline = bowed_polyline(points[k], points[l], target, 32);
        curve.length = polyline_length(curve.polyline);
        if (curve.length > (1.0 + 1.0 / m) * base + 1e-12)
          throw Error("make_network: curve length bound violated");
        curve.radius = radius_for_budget(
            curve.length, tube_budget(curve.k, curve.l, m, epsilon_budget),
            tube_radius);
        net.curves.push_back(std::move(curve));
      }
    }
  }
  return net;
}

namespace {

double envelope_at(const SmallVec& x, const CurveNetwork& net) {
  double psi0 = 0.0;
  for (const auto& curve : net.curves) {
    if (curve.radius <= 0.0) continue;
    const double d = distance_to_polyline(x, curve.polyline);
    if (d < curve.radius) psi0 = std::max(psi0, 1.0 - d / curve.radius);
  }
  return 0.5 + 0.5 * psi0;  // floored envelope keeps the fields elliptic
}

}  // namespace

ScalarField sturm_envelope(const GridChart& chart, const CurveNetwork& network) {
  return build_scalar(chart,
                      [&](const SmallVec& x) { return envelope_at(x, network); });
}

SturmPair sturm_pair(const GridChart& chart, const CurveNetwork& network,
                     double alpha) {
  if (chart.dim != 4)
    throw DimensionError("sturm_pair: needs a 4-d product chart");
  if (!(alpha > 0.0) || alpha > 1.0)
    throw Error("sturm_pair: alpha must lie in (0, 1]");

  const ScalarField psi = sturm_envelope(chart, network);
  const NodeIndex n = chart.node_count();

  std::vector<SmallMat> gv(n), gpv(n);
  double max_mismatch = 0.0;
  for (NodeIndex i = 0; i < n; ++i) {
    const double p = psi.values[i];
    SmallMat a = SmallMat::Identity(4, 4);
    const double pa = std::pow(p, alpha);
    a(0, 0) = pa;
    a(1, 1) = pa;
    gv[i] = a;
    gpv[i] = SmallMat(std::pow(p, 0.5 * alpha) * SmallMat::Identity(4, 4));
    max_mismatch = std::max(
        max_mismatch, std::abs(gv[i].determinant() - gpv[i].determinant()));
  }

  SturmPair pair{
      MetricField(chart, std::move(gv), {}, "sturm_g"),
      MetricField(chart, std::move(gpv), {}, "sturm_g_prime"),
      max_mismatch,
      {}};

  // Grid measure of each bump's superlevel sets against its budget.
  for (const auto& curve : network.curves) {
    const double budget =
        tube_budget(curve.k, curve.l, curve.m, network.epsilon_budget);
    for (double level : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      double vol = 0.0;
      for (NodeIndex i = 0; i < n; ++i) {
        const SmallVec x = chart.coord(i);
        const double d = distance_to_polyline(x, curve.polyline);
        const double bump =
            (curve.radius > 0.0 && d < curve.radius) ? 1.0 - d / curve.radius : 0.0;
        if (bump > level) {
          double cv = 1.0;
          const auto m = chart.multi(i);
          for (int a = 0; a < 4; ++a)
            cv *= chart.on_boundary(m, a) ? 0.5 * chart.spacing[a] : chart.spacing[a];
          vol += cv;
        }
      }
      SturmPair::BudgetRow row;
      row.k = curve.k;
      row.l = curve.l;
      row.m = curve.m;
      row.level = level;
      row.measured = vol;
      row.budget = (1.0 - level) * budget;
      row.ok = vol < row.budget;
      pair.budgets.push_back(row);
    }
  }
  return pair;
}

GraphSuiteResult lipschitz_graph_suite(const std::string& name,
                                       const GridChart& chart, double param) {
  std::function<double(const SmallVec&)> f;
  if (name == "zero") {
    f = [](const SmallVec&) { return 0.0; };
  } else if (name == "cone") {
    f = [](const SmallVec& x) { return x.norm(); };
  } else if (name == "affine") {
    f = [param](const SmallVec& x) { return param * x(0); };
  } else if (name == "sawtooth") {
    f = [param](const SmallVec& x) {
      const double t = std::abs(std::fmod(x(0) / param, 2.0));
      return param * (t <= 1.0 ? t : 2.0 - t);
    };
  } else if (name == "creases") {
    // Superposition of folded planes; the crease lines are seeded by param.
    const auto seed = static_cast<std::uint64_t>(param);
    std::vector<std::array<double, 4>> lines;  // nx, ny, offset, amplitude
    std::uint64_t state = seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull;
    auto next = [&]() {
      state ^= state << 13;
      state ^= state >> 7;
      state ^= state << 17;
      return static_cast<double>(state >> 11) * 0x1.0p-53;
    };
    for (int k = 0; k < 6; ++k) {
      const double th = 2.0 * M_PI * next();
      lines.push_back({std::cos(th), std::sin(th), -1.0 + 2.0 * next(),
                       0.1 + 0.2 * next()});
    }
    f = [lines](const SmallVec& x) {
      double v = 0.0;
      for (const auto& ln : lines)
        v += ln[3] * std::abs(ln[0] * x(0) + ln[1] * x(std::min<int>(1, x.size() - 1)) - ln[2]);
      return v;
    };
  } else {
    throw Error("lipschitz_graph_suite: unknown field '" + name + "'");
  }

  const ScalarField fs = build_scalar(chart, f);
  const double fmin = *std::min_element(fs.values.begin(), fs.values.end());
  const double fmax = *std::max_element(fs.values.begin(), fs.values.end());
  GridChart target;
  target.dim = 1;
  target.shape[0] = 16;
  target.origin[0] = fmin - 1.0;
  target.spacing[0] = (fmax - fmin + 2.0) / 15.0;
  target.validate();

  const MetricField base = euclidean_metric(chart);
  const MetricField line =
      constant_metric(target, SmallMat::Identity(1, 1), "delta_line");

  GraphSuiteResult res{graph_metric(fs, base, line), 0.0};
  res.mask_fraction = static_cast<double>(res.field.singular_count()) /
                      static_cast<double>(res.field.node_count());
  return res;
}

}  // namespace metspace
