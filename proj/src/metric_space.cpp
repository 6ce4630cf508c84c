#include "metspace/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace metspace {

namespace {

void require_same_chart(const GridChart& a, const GridChart& b, const char* who) {
  if (!(a == b)) throw ChartMismatch(std::string(who) + ": fields on different charts");
}

std::vector<std::uint8_t> mask_union(const std::vector<std::uint8_t>& a,
                                     const std::vector<std::uint8_t>& b) {
  std::vector<std::uint8_t> m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = (a[i] || b[i]) ? 1 : 0;
  return m;
}

}  // namespace

double closeness_constant(const MetricField& g, const MetricField& h,
                          NodeIndex* argmax_node) {
  require_same_chart(g.chart(), h.chart(), "closeness_constant");
  const NodeIndex n = g.node_count();
  double worst = 1.0;
  NodeIndex worst_node = -1;
  bool any = false;
  for (NodeIndex i = 0; i < n; ++i) {
    if (g.singular(i) || h.singular(i)) continue;
    double c2 = 1.0;
    if (!g.value(i).cwiseEqual(h.value(i)).all()) {
      // Both pencil orientations so the result is exactly symmetric in (g,h).
      const auto [gh_min, gh_max] = gen_eig_extrema(g.value(i), h.value(i));
      const auto [hg_min, hg_max] = gen_eig_extrema(h.value(i), g.value(i));
      c2 = std::max({gh_max, 1.0 / gh_min, hg_max, 1.0 / hg_min});
    }
    if (!any || c2 > worst) {
      worst = c2;
      worst_node = i;
    }
    any = true;
  }
  if (!any) throw AllSingular("closeness_constant: no common non-singular nodes");
  if (argmax_node) *argmax_node = worst_node;
  return std::sqrt(std::max(worst, 1.0));
}

ExtendedDistance dl(const MetricField& g, const MetricField& h) {
  ExtendedDistance d;
  d.value = std::log(closeness_constant(g, h, &d.argmax_node));
  return d;
}

EllField transport_B(const MetricField& g, const MetricField& h) {
  require_same_chart(g.chart(), h.chart(), "transport_B");
  const NodeIndex n = g.node_count();
  EllField b;
  b.chart = g.chart();
  b.selfadjoint_wrt = h.label();
  b.values.resize(n);
  const int dim = g.chart().dim;
  for (NodeIndex i = 0; i < n; ++i) {
    if (g.singular(i) || h.singular(i)) {
      b.values[i] = SmallMat::Identity(dim, dim);
      continue;
    }
    const EigenDecomposition eh = eig_sym(h.value(i));
    if (eh.eigenvalues(0) <= eps_spd(h.value(i)))
      throw NotPositiveDefinite("transport_B: h not positive definite");
    SmallVec sq(dim), isq(dim);
    for (int k = 0; k < dim; ++k) {
      sq(k) = std::sqrt(eh.eigenvalues(k));
      isq(k) = 1.0 / sq(k);
    }
    const SmallMat hs = eh.eigenvectors * sq.asDiagonal() * eh.eigenvectors.transpose();
    const SmallMat hsi = eh.eigenvectors * isq.asDiagonal() * eh.eigenvectors.transpose();
    SmallMat mid = hsi * g.value(i) * hsi;
    mid = 0.5 * (mid + mid.transpose()).eval();
    b.values[i] = hsi * spd_sqrt(mid) * hs;
  }
  return b;
}

MetricField act(const EllField& b, const MetricField& g) {
  require_same_chart(b.chart, g.chart(), "act");
  const NodeIndex n = g.node_count();
  std::vector<SmallMat> values(n);
  for (NodeIndex i = 0; i < n; ++i) {
    SmallMat m = b.values[i].transpose() * g.value(i) * b.values[i];
    values[i] = 0.5 * (m + m.transpose());
  }
  std::vector<std::uint8_t> mask(g.mask());
  return MetricField(g.chart(), std::move(values), std::move(mask), g.label(),
                     1.0);
}

EllField ell_inverse(const EllField& b) {
  EllField r;
  r.chart = b.chart;
  r.values.resize(b.values.size());
  for (std::size_t i = 0; i < b.values.size(); ++i)
    r.values[i] = b.values[i].inverse();
  return r;
}

EllField ell_compose(const EllField& a, const EllField& b) {
  require_same_chart(a.chart, b.chart, "ell_compose");
  EllField r;
  r.chart = a.chart;
  r.values.resize(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i)
    r.values[i] = a.values[i] * b.values[i];
  return r;
}

EllField ell_identity(const GridChart& chart) {
  EllField r;
  r.chart = chart;
  r.values.assign(chart.node_count(), SmallMat::Identity(chart.dim, chart.dim));
  return r;
}

GeodesicPath::GeodesicPath(const MetricField& g0, const MetricField& g1)
    : g0_label_(g0.label()), g1_label_(g1.label()), chart_(g0.chart()) {
  require_same_chart(g0.chart(), g1.chart(), "geodesic");
  const ExtendedDistance d = dl(g0, g1);
  if (d.is_infinite)
    throw NotInSameComponent("geodesic: endpoints at infinite distance");

  const NodeIndex n = g0.node_count();
  const int dim = chart_.dim;
  mask_ = mask_union(g0.mask(), g1.mask());
  g0_sqrt_.resize(n);
  middle_.resize(n);
  transport_.chart = chart_;
  transport_.selfadjoint_wrt = g0.label();
  transport_.values.resize(n);
  for (NodeIndex i = 0; i < n; ++i) {
    if (mask_[i]) {
      g0_sqrt_[i] = SmallMat::Identity(dim, dim);
      middle_[i] = SmallMat::Identity(dim, dim);
      transport_.values[i] = SmallMat::Identity(dim, dim);
      continue;
    }
    const EigenDecomposition e0 = eig_sym(g0.value(i));
    SmallVec sq(dim), isq(dim);
    for (int k = 0; k < dim; ++k) {
      sq(k) = std::sqrt(e0.eigenvalues(k));
      isq(k) = 1.0 / sq(k);
    }
    const SmallMat s = e0.eigenvectors * sq.asDiagonal() * e0.eigenvectors.transpose();
    const SmallMat si = e0.eigenvectors * isq.asDiagonal() * e0.eigenvectors.transpose();
    SmallMat mid = si * g1.value(i) * si;
    mid = 0.5 * (mid + mid.transpose()).eval();
    g0_sqrt_[i] = s;
    middle_[i] = spd_sqrt(mid);
    // B = G0^{-1/2} (G0^{-1/2} G1 G0^{-1/2})^{1/2} G0^{1/2}
    transport_.values[i] = si * middle_[i] * s;
  }
}

MetricField GeodesicPath::eval(double t) const {
  const NodeIndex n = static_cast<NodeIndex>(middle_.size());
  std::vector<SmallMat> values(n);
  for (NodeIndex i = 0; i < n; ++i) {
    if (mask_[i]) {
      values[i] = SmallMat::Identity(chart_.dim, chart_.dim);
      continue;
    }
    // g_t = G0^{1/2} (G0^{-1/2} G1 G0^{-1/2})^t G0^{1/2}
    SmallMat m = g0_sqrt_[i] * spd_power(middle_[i], 2.0 * t) * g0_sqrt_[i];
    values[i] = 0.5 * (m + m.transpose());
  }
  std::vector<std::uint8_t> mask(mask_);
  return MetricField(chart_, std::move(values), std::move(mask),
                     g0_label_ + "_t", 1.0);
}

std::pair<double, double> GeodesicPath::power_spectrum_range(double t) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < middle_.size(); ++i) {
    if (mask_[i]) continue;
    const EigenDecomposition ed = eig_sym(middle_[i]);
    for (Eigen::Index k = 0; k < ed.eigenvalues.size(); ++k) {
      const double v = std::pow(ed.eigenvalues(k), t);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return {lo, hi};
}

GeodesicPath geodesic(const MetricField& g0, const MetricField& g1) {
  return GeodesicPath(g0, g1);
}

MetricField midpoint(const MetricField& g0, const MetricField& g1) {
  return GeodesicPath(g0, g1).eval(0.5);
}

MetricField cauchy_limit(std::span<const MetricField> gs,
                         const CauchyLimitOptions& opts) {
  if (gs.size() < 2) throw NotCauchy("cauchy_limit: need at least two fields");
  const MetricField& g1 = gs[0];
  for (const auto& g : gs)
    require_same_chart(g.chart(), g1.chart(), "cauchy_limit");

  std::vector<double> gaps(gs.size() - 1);
  for (std::size_t i = 0; i + 1 < gs.size(); ++i)
    gaps[i] = dl(gs[i], gs[i + 1]).value;
  const std::size_t tail = std::min<std::size_t>(3, gaps.size());
  for (std::size_t i = gaps.size() - tail; i + 1 < gaps.size(); ++i) {
    if (gaps[i + 1] > gaps[i] * (1.0 + 1e-9) + 1e-15)
      throw NotCauchy("cauchy_limit: consecutive distance grew between elements " +
                      std::to_string(i + 1) + " and " + std::to_string(i + 2));
  }
  if (gaps.back() > opts.tail_tolerance)
    throw NotCauchy("cauchy_limit: tail gap " + std::to_string(gaps.back()) +
                    " above tolerance");

  const NodeIndex n = g1.node_count();
  const int dim = g1.chart().dim;

  // Per node, the element gs[k] equals g1[B_k ., B_k .] with symmetric square
  // Sigma_k = G1^{-1/2} G_k G1^{-1/2}.  The logs of Sigma_k settle linearly in
  // 1/(k+1) for power-interpolated families; fit a line through the tail and
  // read it off at x = 0.  A large fit residual means the tail is not linear
  // in 1/(k+1), in which case the last element is the safest limit.
  const std::size_t tail_pts = std::min<std::size_t>(3, gs.size());
  std::vector<std::size_t> idx;
  for (std::size_t i = gs.size() - tail_pts; i < gs.size(); ++i) idx.push_back(i);
  std::vector<double> xs;
  double xbar = 0.0;
  for (std::size_t i : idx) xs.push_back(1.0 / static_cast<double>(i + 1));
  for (double x : xs) xbar += x;
  xbar /= static_cast<double>(xs.size());
  double sxx = 0.0;
  for (double x : xs) sxx += (x - xbar) * (x - xbar);

  std::vector<std::uint8_t> limit_mask(g1.mask());
  for (const auto& g : gs) limit_mask = mask_union(limit_mask, g.mask());

  std::vector<SmallMat> values(n);
  for (NodeIndex i = 0; i < n; ++i) {
    if (limit_mask[i]) {
      values[i] = SmallMat::Identity(dim, dim);
      continue;
    }
    const EigenDecomposition e1 = eig_sym(g1.value(i));
    SmallVec sq(dim), isq(dim);
    for (int k = 0; k < dim; ++k) {
      sq(k) = std::sqrt(e1.eigenvalues(k));
      isq(k) = 1.0 / sq(k);
    }
    const SmallMat s = e1.eigenvectors * sq.asDiagonal() * e1.eigenvectors.transpose();
    const SmallMat si = e1.eigenvectors * isq.asDiagonal() * e1.eigenvectors.transpose();
    auto sigma_log = [&](const MetricField& g) {
      SmallMat m = si * g.value(i) * si;
      m = 0.5 * (m + m.transpose()).eval();
      return spd_log(m);
    };

    std::vector<SmallMat> logs;
    SmallMat lbar = SmallMat::Zero(dim, dim);
    for (std::size_t k : idx) {
      logs.push_back(sigma_log(gs[k]));
      lbar += logs.back();
    }
    lbar /= static_cast<double>(logs.size());

    SmallMat linf = logs.back();
    if (sxx > 0.0) {
      SmallMat slope = SmallMat::Zero(dim, dim);
      for (std::size_t k = 0; k < logs.size(); ++k)
        slope += (xs[k] - xbar) * (logs[k] - lbar);
      slope /= sxx;
      const SmallMat intercept = lbar - xbar * slope;
      double residual = 0.0;
      for (std::size_t k = 0; k < logs.size(); ++k)
        residual = std::max(
            residual, (logs[k] - (intercept + xs[k] * slope)).norm());
      if (residual <= 0.1 * (intercept - logs.back()).norm() + 1e-13)
        linf = 0.5 * (intercept + intercept.transpose());
    }
    SmallMat m = s * sym_exp(linf) * s;
    values[i] = 0.5 * (m + m.transpose());
  }
  MetricField limit(g1.chart(), std::move(values), std::move(limit_mask),
                    g1.label() + "_limit", 1.0);

  // Tail verification: distances to the limit must not grow at the tail.
  const std::size_t check = std::min<std::size_t>(3, gs.size());
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = gs.size() - check; i < gs.size(); ++i) {
    const double di = dl(gs[i], limit).value;
    if (di > prev * (1.0 + 1e-6) + 1e-12)
      throw NotCauchy("cauchy_limit: distance to limit grew at the tail");
    prev = di;
  }
  return limit;
}

namespace {

// Quadratic B-spline profile with support |x| < 3/2.
double bspline2(double x) {
  x = std::abs(x);
  if (x < 0.5) return 0.75 - x * x;
  if (x < 1.5) {
    const double t = x - 1.5;
    return 0.5 * t * t;
  }
  return 0.0;
}

}  // namespace

MetricField smooth_approx(const MetricField& g, double epsilon,
                          const SmoothApproxOptions& opts) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw Error("smooth_approx: epsilon must be positive");
  const GridChart& c = g.chart();
  const int dim = c.dim;

  std::array<int, 4> reach{0, 0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    const double limit = c.periodic[a]
                             ? 0.5 * c.spacing[a] * static_cast<double>(c.shape[a])
                             : c.extent(a) * 0.5;
    if (epsilon > limit)
      throw EpsilonTooLarge("smooth_approx: kernel radius " + std::to_string(epsilon) +
                            " exceeds chart along axis " + std::to_string(a));
    reach[a] = static_cast<int>(std::ceil(epsilon / c.spacing[a])) - 1;
    reach[a] = std::max(reach[a], 0);
    while ((reach[a] + 1) * c.spacing[a] < epsilon) ++reach[a];
  }

  // Per-axis weights; the tensor-product kernel is their product.
  std::array<std::vector<double>, 4> axis_w;
  for (int a = 0; a < dim; ++a) {
    axis_w[a].resize(2 * reach[a] + 1);
    for (int k = -reach[a]; k <= reach[a]; ++k)
      axis_w[a][k + reach[a]] = bspline2(1.5 * (k * c.spacing[a]) / epsilon);
  }

  const NodeIndex n = c.node_count();
  std::vector<SmallMat> values(n);
  std::vector<std::uint8_t> mask(g.mask());

  std::array<int, 4> off{0, 0, 0, 0};
  for (NodeIndex i = 0; i < n; ++i) {
    if (g.singular(i)) {
      values[i] = SmallMat::Identity(dim, dim);
      continue;
    }
    const auto m = c.multi(i);
    SmallMat acc = SmallMat::Zero(dim, dim);
    double wsum = 0.0;

    // Walk the offset box; renormalize over in-chart, non-singular sources.
    std::array<int, 4> k{};
    for (int a = 0; a < dim; ++a) k[a] = -reach[a];
    while (true) {
      double w = 1.0;
      for (int a = 0; a < dim; ++a) w *= axis_w[a][k[a] + reach[a]];
      if (w > 0.0) {
        for (int a = 0; a < dim; ++a) off[a] = k[a];
        const NodeIndex j = c.neighbor(m, off);
        if (j >= 0 && !g.singular(j)) {
          acc += w * g.value(j);
          wsum += w;
        }
      }
      int a = dim - 1;
      while (a >= 0) {
        if (++k[a] <= reach[a]) break;
        k[a] = -reach[a];
        --a;
      }
      if (a < 0) break;
    }
    if (wsum <= 0.0)
      throw TooSingular("smooth_approx: kernel support fully masked at node " +
                        std::to_string(i));
    values[i] = acc / wsum;
  }
  return MetricField(c, std::move(values), std::move(mask), g.label() + "_eps",
                     opts.sing_fraction_max);
}

ExtendedDistance dl_exhaustion(const FieldGenerator& g_gen,
                               const FieldGenerator& h_gen,
                               const std::vector<double>& radii,
                               const ExhaustionOptions& opts) {
  if (radii.empty()) throw Error("dl_exhaustion: no radii");
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i] < radii[i + 1]))
      throw Error("dl_exhaustion: radii must be ascending");
  if (g_gen.dim != h_gen.dim)
    throw DimensionError("dl_exhaustion: generator dimensions differ");

  FieldBuildOptions bo;
  bo.sing_fraction_max = 1.0;

  DivergenceCertificate cert;
  for (double r : radii) {
    const GridChart box = make_box_chart(g_gen.dim, -r, r, opts.nodes_per_axis);
    const MetricField g = build_metric(box, g_gen.at, bo);
    const MetricField h = build_metric(box, h_gen.at, bo);
    cert.radii.push_back(r);
    cert.values.push_back(dl(g, h).value);
  }

  ExtendedDistance out;
  const std::size_t m = cert.values.size();
  const bool over = cert.values.back() > opts.infinity_threshold;
  bool strictly_growing = m >= 3;
  for (std::size_t i = m >= 3 ? m - 3 : 0; i + 1 < m; ++i)
    strictly_growing = strictly_growing && (cert.values[i] < cert.values[i + 1]);
  if (over && strictly_growing) {
    out.is_infinite = true;
    out.value = std::numeric_limits<double>::infinity();
    out.certificate = std::move(cert);
  } else {
    out.value = cert.values.back();
    out.truncated = true;
  }
  return out;
}

}  // namespace metspace
