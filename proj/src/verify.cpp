#include "metspace/verify.hpp"

#include "metspace/constructions.hpp"
#include "metspace/geometry.hpp"
#include "metspace/metric_space.hpp"
#include "metspace/operators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace metspace {

namespace {

double splitmix_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z = z ^ (z >> 31);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

double uniform(std::uint64_t& state, double lo, double hi) {
  return lo + (hi - lo) * splitmix_next(state);
}

/// Random rotation from composed Givens rotations (deterministic).
SmallMat random_rotation(int dim, std::uint64_t& state) {
  SmallMat q = SmallMat::Identity(dim, dim);
  for (int p = 0; p < dim; ++p)
    for (int r = p + 1; r < dim; ++r) {
      const double th = uniform(state, 0.0, 2.0 * M_PI);
      SmallMat rot = SmallMat::Identity(dim, dim);
      rot(p, p) = std::cos(th);
      rot(r, r) = std::cos(th);
      rot(p, r) = -std::sin(th);
      rot(r, p) = std::sin(th);
      q = (q * rot).eval();
    }
  return q;
}

}  // namespace

SmallMat random_spd(int dim, std::uint64_t& state, double spread) {
  const SmallMat q = random_rotation(dim, state);
  SmallVec d(dim);
  for (int i = 0; i < dim; ++i) d(i) = std::exp(uniform(state, -spread, spread));
  SmallMat a = q * d.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

MetricField random_metric_field(const GridChart& chart, std::uint64_t seed,
                                double spread, std::string label) {
  std::uint64_t state = seed * 0x100000001b3ull + 0xcbf29ce484222325ull;
  const NodeIndex n = chart.node_count();
  std::vector<SmallMat> values(n);
  for (NodeIndex i = 0; i < n; ++i) values[i] = random_spd(chart.dim, state, spread);
  return MetricField(chart, std::move(values), {}, std::move(label));
}

EllField random_selfadjoint_ell(const MetricField& g, std::uint64_t seed,
                                double dl_target) {
  std::uint64_t state = seed ^ 0x5851f42d4c957f2dull;
  const GridChart& c = g.chart();
  const int dim = c.dim;
  const NodeIndex n = g.node_count();

  // Symmetric logs with |log spectrum| <= dl_target, the first node pinned to
  // attain it; conjugate into g-self-adjoint form through G^{+-1/2}.
  EllField b;
  b.chart = c;
  b.selfadjoint_wrt = g.label();
  b.values.resize(n);
  for (NodeIndex i = 0; i < n; ++i) {
    const SmallMat q = random_rotation(dim, state);
    SmallVec logs(dim);
    for (int k = 0; k < dim; ++k)
      logs(k) = uniform(state, -dl_target, dl_target) * 0.8;
    if (i == 0) {
      logs(0) = dl_target;
      logs(dim - 1) = -dl_target;
    }
    SmallMat e = q * logs.asDiagonal() * q.transpose();
    e = 0.5 * (e + e.transpose()).eval();
    const SmallMat esym = sym_exp(e);
    const SmallMat gs = spd_sqrt(g.value(i));
    const SmallMat gsi = spd_inv(gs);
    b.values[i] = gsi * esym * gs;
  }
  return b;
}

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;
  double worst = 0.0;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.str().empty()) detail << "; ";
      detail << what;
    }
  }
  void track(double v) { worst = std::max(worst, v); }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double frob_dist(const MetricField& a, const MetricField& b) {
  double worst = 0.0;
  for (NodeIndex i = 0; i < a.node_count(); ++i) {
    if (a.singular(i) || b.singular(i)) continue;
    worst = std::max(worst, (a.value(i) - b.value(i)).norm());
  }
  return worst;
}

// --- criterion 1: extended-metric axioms ------------------------------------
CriterionResult criterion_metric_axioms(std::uint64_t seed) {
  Check ck;
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 32);
  const int triples = 1000;
  double worst_tri = 0.0;
  for (int t = 0; t < triples; ++t) {
    const MetricField g = random_metric_field(chart, seed + 3 * t, 0.6);
    const MetricField h = random_metric_field(chart, seed + 3 * t + 1, 0.6);
    const MetricField k = random_metric_field(chart, seed + 3 * t + 2, 0.6);
    const double dgh = dl(g, h).value;
    const double dhg = dl(h, g).value;
    const double dgg = dl(g, g).value;
    const double dgk = dl(g, k).value;
    const double dhk = dl(h, k).value;
    ck.expect(dgh == dhg, "symmetry not exact at triple " + std::to_string(t));
    ck.expect(dgg == 0.0, "dl(g,g) not exactly zero at triple " + std::to_string(t));
    worst_tri = std::max(worst_tri, dgk - (dgh + dhk));
    if (!ck.ok) break;
  }
  ck.expect(worst_tri <= 1e-12,
            "triangle inequality violated by " + fmt(worst_tri));
  return {1, "metric-axioms", ck.ok,
          ck.ok ? "1000 triples; worst triangle slack " + fmt(worst_tri)
                : ck.detail.str(),
          0.0};
}

// --- criterion 2: optimal-exponent sharpness ---------------------------------
CriterionResult criterion_sharpness(std::uint64_t seed) {
  Check ck;
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 16);
  for (int t = 0; t < 100 && ck.ok; ++t) {
    const MetricField g = random_metric_field(chart, seed + 2 * t, 0.7);
    const MetricField h = random_metric_field(chart, seed + 2 * t + 1, 0.7);
    const ExtendedDistance d = dl(g, h);
    const double lo = std::exp(-d.value), hi = std::exp(d.value);

    // Bound at every node over sampled directions.
    std::uint64_t state = seed + t;
    for (NodeIndex i = 0; i < g.node_count(); ++i) {
      for (int s = 0; s < 6; ++s) {
        SmallVec u(2);
        const double th = uniform(state, 0.0, 2.0 * M_PI);
        u << std::cos(th), std::sin(th);
        const double ng = std::sqrt(u.dot(g.value(i) * u));
        const double nh = std::sqrt(u.dot(h.value(i) * u));
        const double ratio = nh / ng;
        ck.expect(ratio >= lo * (1.0 - 1e-9) && ratio <= hi * (1.0 + 1e-9),
                  "two-sided bound broken at node " + std::to_string(i));
      }
      if (!ck.ok) break;
    }

    // Attainment at the argmax node through the extremal pencil direction.
    const NodeIndex a = d.argmax_node;
    const SmallMat gs = spd_power(g.value(a), -0.5);
    SmallMat pencil = gs * h.value(a) * gs;
    pencil = 0.5 * (pencil + pencil.transpose()).eval();
    const EigenDecomposition ed = eig_sym(pencil);
    double attained = 0.0;
    for (int k = 0; k < 2; ++k) {
      const SmallVec u = gs * ed.eigenvectors.col(k);
      const double ng = std::sqrt(u.dot(g.value(a) * u));
      const double nh = std::sqrt(u.dot(h.value(a) * u));
      attained = std::max(attained,
                          std::max(nh / ng / hi, lo / std::max(nh / ng, 1e-300)));
    }
    ck.expect(std::abs(attained - 1.0) <= 1e-9,
              "bound not attained at argmax node (off by " +
                  fmt(std::abs(attained - 1.0)) + ")");
  }
  return {2, "sharpness", ck.ok,
          ck.ok ? "100 pairs; bounds hold and are attained at the argmax node"
                : ck.detail.str(),
          0.0};
}

// --- criterion 3: group action and transport ---------------------------------
CriterionResult criterion_transport(std::uint64_t seed) {
  Check ck;
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 16);
  double worst_rec = 0.0, worst_law = 0.0;
  for (int t = 0; t < 100 && ck.ok; ++t) {
    const MetricField g = random_metric_field(chart, seed + 2 * t, 0.7);
    const MetricField h = random_metric_field(chart, seed + 2 * t + 1, 0.7);
    const EllField b = transport_B(g, h);
    worst_rec = std::max(worst_rec, frob_dist(act(b, h), g));

    const EllField b1 = random_selfadjoint_ell(g, seed + 7000 + t, 0.4);
    const EllField b2 = random_selfadjoint_ell(g, seed + 9000 + t, 0.4);
    worst_law = std::max(worst_law, frob_dist(act(ell_identity(chart), g), g));
    worst_law =
        std::max(worst_law, frob_dist(act(ell_inverse(b1), act(b1, g)), g));
    worst_law = std::max(
        worst_law, frob_dist(act(b2, act(b1, g)), act(ell_compose(b1, b2), g)));
  }
  ck.expect(worst_rec <= 1e-9, "transport reconstruction off by " + fmt(worst_rec));
  ck.expect(worst_law <= 1e-10, "action law off by " + fmt(worst_law));
  return {3, "transport", ck.ok,
          ck.ok ? "reconstruction " + fmt(worst_rec) + ", laws " + fmt(worst_law)
                : ck.detail.str(),
          0.0};
}

// --- criterion 4: geodesics and midpoints ------------------------------------
CriterionResult criterion_geodesic_midpoint(std::uint64_t seed) {
  Check ck;
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 16);
  double worst_end = 0.0, worst_mid = 0.0;
  for (int t = 0; t < 100 && ck.ok; ++t) {
    const MetricField g0 = random_metric_field(chart, seed + 2 * t, 0.7);
    const MetricField g1 = random_metric_field(chart, seed + 2 * t + 1, 0.7);
    const GeodesicPath path(g0, g1);
    worst_end = std::max(worst_end, frob_dist(path.eval(0.0), g0));
    worst_end = std::max(worst_end, frob_dist(path.eval(1.0), g1));

    const double d01 = dl(g0, g1).value;
    const MetricField mid = path.eval(0.5);
    worst_mid = std::max(worst_mid, std::abs(dl(g0, mid).value - 0.5 * d01));
    worst_mid = std::max(worst_mid, std::abs(dl(mid, g1).value - 0.5 * d01));

    const double a = std::exp(d01);
    for (double tt : {0.25, 0.5, 0.75}) {
      const auto [lo, hi] = path.power_spectrum_range(tt);
      ck.expect(lo >= std::pow(a, -tt) * (1.0 - 1e-12) &&
                    hi <= std::pow(a, tt) * (1.0 + 1e-12),
                "spectral power bound broken at t=" + fmt(tt));
    }
  }
  ck.expect(worst_end <= 1e-10, "endpoint mismatch " + fmt(worst_end));
  ck.expect(worst_mid <= 1e-9, "midpoint equality off by " + fmt(worst_mid));
  return {4, "geodesic-midpoint", ck.ok,
          ck.ok ? "endpoints " + fmt(worst_end) + ", midpoint " + fmt(worst_mid)
                : ck.detail.str(),
          0.0};
}

// --- criterion 5: completeness ------------------------------------------------
CriterionResult criterion_completeness(std::uint64_t seed) {
  Check ck;
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 16);
  double worst_tail = 0.0;
  for (int t = 0; t < 10 && ck.ok; ++t) {
    const MetricField g = random_metric_field(chart, seed + t, 0.6);
    const EllField b = random_selfadjoint_ell(g, seed + 100 + t, 0.8);

    std::vector<MetricField> gs;
    for (int n = 1; n <= 30; ++n) {
      EllField bn = b;
      for (NodeIndex i = 0; i < g.node_count(); ++i) {
        const SmallMat gsqrt = spd_sqrt(g.value(i));
        const SmallMat gisqrt = spd_inv(gsqrt);
        SmallMat esym = gsqrt * b.values[i] * gisqrt;
        esym = 0.5 * (esym + esym.transpose()).eval();
        bn.values[i] = gisqrt * spd_power(esym, 1.0 / n) * gsqrt;
      }
      gs.push_back(act(bn, g));
    }
    const MetricField limit = cauchy_limit(gs);
    worst_tail = std::max(worst_tail, dl(limit, g).value);
  }
  ck.expect(worst_tail < 1e-8, "tail distance to true limit " + fmt(worst_tail));
  return {5, "completeness", ck.ok,
          ck.ok ? "10 sequences; tail dl " + fmt(worst_tail) : ck.detail.str(),
          0.0};
}

// --- criterion 6: smooth-closure dichotomy ------------------------------------
CriterionResult criterion_smoothing(std::uint64_t) {
  Check ck;

  // Continuous metric (1+|x|^2) delta: the mollification ladder converges.
  {
    const GridChart chart = make_box_chart(2, 0.0, 1.0, 64);
    const MetricField g = build_metric(chart, [](const SmallVec& x) {
      return SmallMat((1.0 + x.squaredNorm()) * SmallMat::Identity(2, 2));
    });
    double eps = 0.4, prev = std::numeric_limits<double>::infinity();
    double last = prev;
    for (int k = 0; k <= 4; ++k) {
      const double val = dl(smooth_approx(g, eps), g).value;
      ck.expect(val <= prev * (1.0 + 1e-12) + 1e-15,
                "continuous-case dl not decreasing at eps=" + fmt(eps));
      prev = val;
      last = val;
      eps *= 0.5;
    }
    ck.expect(last < 0.01,
              "continuous-case dl after 4 halvings = " + fmt(last));
  }

  // Jump metric: mollification never gets below a quarter of the jump log.
  {
    const double jump = 100.0;
    const GridChart chart = make_box_chart(2, -2.0, 2.0, 64);
    const MetricField g = nonapprox_metric(chart, jump, 1.0);
    const double floor_val = 0.25 * std::log(jump);
    double eps = 1.6;
    for (int k = 0; k <= 4; ++k) {
      const double val = dl(smooth_approx(g, eps), g).value;
      ck.expect(val >= floor_val,
                "jump-case dl " + fmt(val) + " below floor at eps=" + fmt(eps));
      eps *= 0.5;
    }
  }
  return {6, "smoothing", ck.ok,
          ck.ok ? "ladder converges for the continuous metric; jump floor holds"
                : ck.detail.str(),
          0.0};
}

// --- criterion 7: distance-solver consistency ---------------------------------
CriterionResult criterion_distance(std::uint64_t) {
  Check ck;
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 129);
  const NodeIndex c00 = 0;
  const NodeIndex c11 = chart.node_count() - 1;
  const NodeIndex top = chart.index({0, chart.shape[1] - 1, 0, 0});

  const MetricField flat = euclidean_metric(chart);
  const double d_flat = distance_map(flat, c00, 2).values[c11];
  ck.expect(std::abs(d_flat - std::sqrt(2.0)) <= 0.05 * std::sqrt(2.0),
            "flat corner distance " + fmt(d_flat));

  const double c = 3.0;
  const MetricField conf =
      constant_metric(chart, SmallMat(c * c * SmallMat::Identity(2, 2)));
  const double d_conf = distance_map(conf, c00, 2).values[c11];
  ck.expect(std::abs(d_conf - c * std::sqrt(2.0)) <= 0.05 * c * std::sqrt(2.0),
            "conformal corner distance " + fmt(d_conf));

  SmallMat aniso(2, 2);
  aniso << 1.0, 0.0, 0.0, 4.0;
  const MetricField an = constant_metric(chart, aniso);
  const double d_an = distance_map(an, c00, 2).values[top];
  ck.expect(std::abs(d_an - 2.0) <= 0.05 * 2.0,
            "anisotropic vertical distance " + fmt(d_an));

  return {7, "distance", ck.ok,
          ck.ok ? "flat " + fmt(d_flat) + ", conformal " + fmt(d_conf) +
                      ", anisotropic " + fmt(d_an)
                : ck.detail.str(),
          0.0};
}

// --- criterion 8: distance and measure comparability ---------------------------
CriterionResult criterion_comparability(std::uint64_t seed) {
  Check ck;
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 32);
  const double target = 0.3;
  for (int t = 0; t < 3 && ck.ok; ++t) {
    const MetricField g = random_metric_field(chart, seed + t, 0.4);
    const EllField b = random_selfadjoint_ell(g, seed + 50 + t, target);
    const MetricField h = act(b, g);
    const double d = dl(g, h).value;
    ck.expect(std::abs(d - target) <= 1e-12, "constructed dl is " + fmt(d));

    std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
    std::uint64_t state = seed + 500 + t;
    for (int p = 0; p < 8; ++p) {
      const auto x = static_cast<NodeIndex>(
          uniform(state, 0.0, static_cast<double>(chart.node_count())));
      const auto y = static_cast<NodeIndex>(
          uniform(state, 0.0, static_cast<double>(chart.node_count())));
      if (x != y) pairs.emplace_back(x, y);
    }
    const ComparabilityReport rep = distance_comparability_check(g, h, pairs, 2);
    ck.expect(rep.within_bounds, "distance ratio outside the two-sided band");

    // Measure comparability with the dimension-scaled exponent.
    const double lo = std::exp(-2.0 * d), hi = std::exp(2.0 * d);
    NodeSet region = all_nodes(chart);
    const double mg = measure(g, region).volume;
    const double mh = measure(h, region).volume;
    const double ratio = mh / mg;
    ck.expect(ratio >= lo - 1e-10 && ratio <= hi + 1e-10,
              "measure ratio " + fmt(ratio) + " outside [" + fmt(lo) + ", " +
                  fmt(hi) + "]");
  }
  return {8, "comparability", ck.ok,
          ck.ok ? "distance and measure ratios inside the exponential bands"
                : ck.detail.str(),
          0.0};
}

// --- criterion 9: divergence-form dictionary -----------------------------------
CriterionResult criterion_divform(std::uint64_t seed) {
  Check ck;
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 32);
  const MetricField flat = euclidean_metric(chart);

  // Exact conformal values.
  const EllField a4 = build_ell(chart, [](const SmallVec&) {
    return SmallMat(4.0 * SmallMat::Identity(2, 2));
  });
  const double f = std::pow(a4.values[0].determinant(), -1.0 / 4.0);
  ck.expect(f == 0.5, "conformal multiplier f = " + fmt(f));
  const MetricField h4 = divform_to_metric(a4, flat);
  ck.expect((h4.value(0) - 2.0 * SmallMat::Identity(2, 2)).norm() <= 1e-14,
            "dictionary metric for diag(4,4) is not diag(2,2)");

  // Random coefficient trials.
  std::uint64_t state = seed;
  const EllField arand = build_ell(chart, [&](const SmallVec&) {
    return random_spd(2, state, 0.6);
  });
  const CorrespondenceReport rep = operator_correspondence_check(arand, flat, 5, seed);
  ck.expect(rep.max_rel_deviation <= 1e-8,
            "random-A correspondence deviation " + fmt(rep.max_rel_deviation));

  // Unimodular coefficients: the operators agree outright.
  std::uint64_t state2 = seed + 17;
  const EllField a1 = build_ell(chart, [&](const SmallVec&) {
    SmallMat m = random_spd(2, state2, 0.5);
    return SmallMat(m / std::sqrt(m.determinant()));
  });
  const CorrespondenceReport rep1 = operator_correspondence_check(a1, flat, 5, seed);
  ck.expect(rep1.max_rel_deviation <= 1e-10,
            "det-1 operator equality deviation " + fmt(rep1.max_rel_deviation));

  return {9, "divform", ck.ok,
          ck.ok ? "f exact; correspondence deviation " + fmt(rep.max_rel_deviation)
                : ck.detail.str(),
          0.0};
}

// --- criterion 10: small-time heat asymptotics ----------------------------------
CriterionResult criterion_varadhan(std::uint64_t) {
  Check ck;
  const GridChart chart = make_box_chart(1, 0.0, 1.0, 513);
  const NodeIndex src = 128, dst = 384;  // x = 0.25 and x = 0.75
  HeatOptions opts;
  opts.steps_per_interval = 256;

  {
    const MetricField flat = euclidean_metric(chart);
    const SparseOperator op = assemble_laplacian(flat);
    const HeatRun run = heat_run(op, src, {0.005, 0.01, 0.02}, opts);
    const VaradhanEstimate est = varadhan_estimate(run, dst);
    ck.expect(std::abs(est.extrapolated - 0.25) <= 0.15 * 0.25,
              "flat extrapolation " + fmt(est.extrapolated));
  }
  {
    const double c = 2.0;
    const MetricField conf =
        constant_metric(chart, SmallMat(c * c * SmallMat::Identity(1, 1)));
    const SparseOperator op = assemble_laplacian(conf);
    // Same nondimensional small-time regime: times scale with 1/diffusivity.
    const HeatRun run = heat_run(op, src, {0.02, 0.04, 0.08}, opts);
    const VaradhanEstimate est = varadhan_estimate(run, dst);
    const double want = (c * 0.5) * (c * 0.5);
    ck.expect(std::abs(est.extrapolated - want) <= 0.15 * want,
              "conformal extrapolation " + fmt(est.extrapolated));
  }
  return {10, "varadhan", ck.ok,
          ck.ok ? "flat and conformal extrapolations inside 15%" : ck.detail.str(),
          0.0};
}

// --- criterion 11: Poincare measurement and propagation --------------------------
CriterionResult criterion_poincare(std::uint64_t seed) {
  Check ck;

  {
    const GridChart chart = make_box_chart(2, 0.0, 1.0, 65);
    const MetricField flat = euclidean_metric(chart);
    const NodeIndex center = chart.index({32, 32, 0, 0});
    const PoincareResult res = poincare_measure(flat, center, 10.0);
    const double want = 1.0 / M_PI;
    ck.expect(std::abs(res.c1 - want) <= 0.02 * want,
              "flat measured C1 " + fmt(res.c1));
  }

  // Propagated constants bound the measured ones for dl = log 2 perturbations.
  {
    const GridChart chart = make_box_chart(2, 0.0, 1.0, 33);
    const MetricField h = euclidean_metric(chart);
    const NodeIndex center = chart.index({16, 16, 0, 0});
    const PoincareResult base = poincare_measure(h, center, 10.0);
    const double dl_gh = std::log(2.0);
    const PoincareConstants prop =
        poincare_propagate(base.c1, 0.0, 1.0, dl_gh, 2, 2.0, 2.0);
    ck.expect(std::abs(prop.c1 - 8.0 * base.c1) <= 1e-12 * prop.c1,
              "propagation factor is not 8");

    // Conformal trial g = 4 h.
    {
      const MetricField g =
          constant_metric(chart, SmallMat(4.0 * SmallMat::Identity(2, 2)));
      const PoincareResult m = poincare_measure(g, center, 20.0);
      ck.expect(m.c1 <= prop.c1,
                "conformal measured C1 " + fmt(m.c1) + " above propagated " +
                    fmt(prop.c1));
    }
    // Random Ell trials at the same distance.
    for (int t = 0; t < 2 && ck.ok; ++t) {
      const EllField b = random_selfadjoint_ell(h, seed + t, dl_gh);
      const MetricField g = act(b, h);
      ck.expect(std::abs(dl(g, h).value - dl_gh) <= 1e-12, "trial dl drifted");
      const PoincareResult m = poincare_measure(g, center, 20.0);
      ck.expect(m.c1 <= prop.c1, "measured C1 " + fmt(m.c1) +
                                     " above propagated " + fmt(prop.c1));
    }
  }
  return {11, "poincare", ck.ok,
          ck.ok ? "flat C1 within 2% of 1/pi; propagated bound holds"
                : ck.detail.str(),
          0.0};
}

// --- criterion 12: the measure-distance pair does not determine the metric -------
CriterionResult criterion_sturm(std::uint64_t) {
  Check ck;
  const GridChart chart = make_box_chart(4, 0.0, 1.0, 13);

  SmallVec p0(4), p1(4), p2(4);
  p0 << 0.2, 0.25, 0.2, 0.25;
  p1 << 0.8, 0.7, 0.75, 0.7;
  p2 << 0.3, 0.75, 0.7, 0.3;
  const std::vector<SmallVec> pts{p0, p1, p2};
  const int m_max = 8;
  const CurveNetwork net = make_network(pts, {1, 2, 4, m_max}, 0.45, 8192.0);
  const SturmPair pair = sturm_pair(chart, net, 1.0);

  ck.expect(pair.max_det_mismatch <= 1e-14,
            "det mismatch " + fmt(pair.max_det_mismatch));
  for (const auto& row : pair.budgets)
    ck.expect(row.ok, "superlevel budget broken for curve (" +
                          std::to_string(row.k) + "," + std::to_string(row.l) +
                          "," + std::to_string(row.m) + ")");

  const double hmax = chart.spacing[0];
  const double factor = 1.0 + 1.0 / m_max;
  for (std::size_t k = 0; k < pts.size() && ck.ok; ++k) {
    std::array<std::int64_t, 4> mk{};
    for (int a = 0; a < 4; ++a)
      mk[a] = std::llround((pts[k](a) - chart.origin[a]) / chart.spacing[a]);
    const NodeIndex src = chart.index(mk);
    const DistanceMap dg = distance_map(pair.g, src, 2);
    const DistanceMap dgp = distance_map(pair.g_prime, src, 2);
    for (std::size_t l = k + 1; l < pts.size(); ++l) {
      std::array<std::int64_t, 4> ml{};
      for (int a = 0; a < 4; ++a)
        ml[a] = std::llround((pts[l](a) - chart.origin[a]) / chart.spacing[a]);
      const NodeIndex dst = chart.index(ml);
      const double eu = (chart.coord(dst) - chart.coord(src)).norm();
      const double slack = SolverTolerances::slack(eu, hmax, 2);
      for (double dv : {dg.values[dst], dgp.values[dst]}) {
        ck.expect(dv <= factor * eu + slack,
                  "distance " + fmt(dv) + " above sandwich for pair " +
                      std::to_string(k) + "-" + std::to_string(l));
        ck.expect(dv >= eu / factor - slack,
                  "distance " + fmt(dv) + " below sandwich for pair " +
                      std::to_string(k) + "-" + std::to_string(l));
      }
    }
  }
  return {12, "sturm", ck.ok,
          ck.ok ? "dets equal; tube budgets hold; distances inside the sandwich"
                : ck.detail.str(),
          0.0};
}

// --- criterion 13: disconnectedness certificate ----------------------------------
CriterionResult criterion_disconnect(std::uint64_t) {
  Check ck;
  const int dim = 2;
  const FieldGenerator flat = flat_generator(dim);
  const FieldGenerator shells = unbounded_conformal(dim, 1.0);

  std::vector<double> radii;
  for (int k = 0; k <= 146; ++k) radii.push_back(0.5 + k);

  ExhaustionOptions opts;
  const ExtendedDistance d = dl_exhaustion(flat, shells, radii, opts);
  ck.expect(d.is_infinite, "no divergence certificate produced");
  if (d.is_infinite) {
    const auto& cert = *d.certificate;
    const double inc = 0.5 * std::log(2.0);
    double worst = 0.0;
    for (std::size_t i = 1; i < cert.values.size(); ++i)
      worst = std::max(worst,
                       std::abs((cert.values[i] - cert.values[i - 1]) - inc));
    ck.expect(worst <= 1e-12, "per-annulus increment off by " + fmt(worst));
    ck.track(worst);
  }
  return {13, "disconnect", ck.ok,
          ck.ok ? "certificate with per-annulus increment (log 2)/2, off by " +
                      fmt(ck.worst)
                : ck.detail.str(),
          0.0};
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names{
      "metric-axioms", "sharpness", "transport", "geodesic-midpoint",
      "completeness",  "smoothing", "distance",  "comparability",
      "divform",       "varadhan",  "poincare",  "sturm",
      "disconnect"};
  return names;
}

CriterionResult run_criterion(int id, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  switch (id) {
    case 1: r = criterion_metric_axioms(seed); break;
    case 2: r = criterion_sharpness(seed); break;
    case 3: r = criterion_transport(seed); break;
    case 4: r = criterion_geodesic_midpoint(seed); break;
    case 5: r = criterion_completeness(seed); break;
    case 6: r = criterion_smoothing(seed); break;
    case 7: r = criterion_distance(seed); break;
    case 8: r = criterion_comparability(seed); break;
    case 9: r = criterion_divform(seed); break;
    case 10: r = criterion_varadhan(seed); break;
    case 11: r = criterion_poincare(seed); break;
    case 12: r = criterion_sturm(seed); break;
    case 13: r = criterion_disconnect(seed); break;
    default: throw Error("run_criterion: no criterion " + std::to_string(id));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                  .count();
  return r;
}

CriterionResult run_suite(const std::string& name, std::uint64_t seed) {
  const auto& names = verify_suite_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return run_criterion(static_cast<int>(i) + 1, seed);
  throw Error("run_suite: unknown suite '" + name + "'");
}

std::vector<CriterionResult> run_all_criteria(std::uint64_t seed) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 13; ++id) out.push_back(run_criterion(id, seed));
  return out;
}

}  // namespace metspace
