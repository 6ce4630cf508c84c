#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "metspace/geometry.hpp"
#include "test_helpers.hpp"

#include <cmath>
#include <limits>
#include <numeric>

using namespace metspace;
using namespace metspace::testing;

TEST_CASE("induced measure of simple fields on the unit square") {
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 33);
  const NodeSet all = all_nodes(chart);

  CHECK(measure(euclidean_metric(chart), all).volume ==
        doctest::Approx(1.0).epsilon(1e-12));

  const double c = 1.7;
  CHECK(measure(constant_metric(chart, SmallMat(c * c * ident(2))), all).volume ==
        doctest::Approx(c * c).epsilon(1e-12));

  // Node-sum oracle: sqrt(det diag(1,4)) = 2 at every node.
  const MetricField an = constant_metric(chart, diag2(1.0, 4.0));
  double oracle = 0.0;
  for (NodeIndex i : all) {
    const auto m = chart.multi(i);
    double cell = 1.0;
    for (int a = 0; a < 2; ++a)
      cell *= chart.on_boundary(m, a) ? 0.5 * chart.spacing[a] : chart.spacing[a];
    oracle += 2.0 * cell;
  }
  CHECK(measure(an, all).volume == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(measure(an, all).volume == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(measure(an, NodeSet{}), EmptyRegion);
}

TEST_CASE("measure is additive over disjoint regions") {
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 17);
  const MetricField g = random_metric_field(chart, 5, 0.8);
  NodeSet left, right, both;
  for (NodeIndex i = 0; i < chart.node_count(); ++i) {
    both.push_back(i);
    (i % 2 == 0 ? left : right).push_back(i);
  }
  const double sum = measure(g, left).volume + measure(g, right).volume;
  CHECK(sum == doctest::Approx(measure(g, both).volume).epsilon(1e-12));
}

TEST_CASE("distance solver reproduces straight-line lengths") {
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 33);
  const NodeIndex c00 = 0, c11 = chart.node_count() - 1;
  const NodeIndex top = chart.index({0, 32, 0, 0});

  const double d = distance_map(euclidean_metric(chart), c00).values[c11];
  CHECK(std::abs(d - std::sqrt(2.0)) <= 0.05 * std::sqrt(2.0));

  const double c = 2.0;
  const MetricField conf = constant_metric(chart, SmallMat(c * c * ident(2)));
  CHECK(distance_map(conf, c00).values[c11] ==
        doctest::Approx(c * d).epsilon(1e-12));

  // Vertical distance under diag(1,4) must pay the stretched axis in full.
  const MetricField an = constant_metric(chart, diag2(1.0, 4.0));
  CHECK(distance_map(an, c00).values[top] == doctest::Approx(2.0).epsilon(1e-9));
}

namespace {

/// Independent relaxation oracle (Bellman-Ford style) on the same edge set.
/// Computing the fixpoint of w(b) <= w(a) + len(a,b) solves the dual problem
/// of maximizing w(target) - w(source) under the edge-Lipschitz constraints.
std::vector<double> relaxation_oracle(const MetricField& g, NodeIndex src,
                                      int order) {
  const GridChart& c = g.chart();
  std::vector<double> w(c.node_count(), std::numeric_limits<double>::infinity());
  w[src] = 0.0;
  std::vector<std::array<int, 4>> offsets;
  for (int dx = -order; dx <= order; ++dx)
    for (int dy = -order; dy <= order; ++dy) {
      if (dx == 0 && dy == 0) continue;
      if (std::gcd(std::abs(dx), std::abs(dy)) != 1) continue;
      offsets.push_back({dx, dy, 0, 0});
    }
  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeIndex i = 0; i < c.node_count(); ++i) {
      if (!std::isfinite(w[i])) continue;
      const auto m = c.multi(i);
      for (const auto& q : offsets) {
        const NodeIndex j = c.neighbor(m, q);
        if (j < 0) continue;
        SmallVec dx(2);
        dx << q[0] * c.spacing[0], q[1] * c.spacing[1];
        const double len = 0.5 * (std::sqrt(dx.dot(g.value(i) * dx)) +
                                  std::sqrt(dx.dot(g.value(j) * dx)));
        if (w[i] + len < w[j] - 1e-15) {
          w[j] = w[i] + len;
          changed = true;
        }
      }
    }
  }
  return w;
}

}  // namespace

TEST_CASE("distance map agrees with the relaxation oracle on small grids") {
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 5);
  const MetricField g = random_metric_field(chart, 13, 0.8);
  const DistanceMap map = distance_map(g, 0, 2);
  const auto oracle = relaxation_oracle(g, 0, 2);
  for (NodeIndex i = 0; i < chart.node_count(); ++i)
    CHECK(map.values[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
}

TEST_CASE("distance maps are edge-Lipschitz, symmetric, and triangle-consistent") {
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 17);
  const MetricField g = random_metric_field(chart, 23, 0.7);
  const DistanceMap from0 = distance_map(g, 0);

  // 1-Lipschitz along every axis edge.
  for (NodeIndex i = 0; i < chart.node_count(); ++i) {
    const auto m = chart.multi(i);
    for (int a = 0; a < 2; ++a) {
      std::array<int, 4> q{0, 0, 0, 0};
      q[a] = 1;
      const NodeIndex j = chart.neighbor(m, q);
      if (j < 0) continue;
      SmallVec dx = SmallVec::Zero(2);
      dx(a) = chart.spacing[a];
      const double len = 0.5 * (std::sqrt(dx.dot(g.value(i) * dx)) +
                                std::sqrt(dx.dot(g.value(j) * dx)));
      CHECK(std::abs(from0.values[i] - from0.values[j]) <= len + 1e-12);
    }
  }

  const NodeIndex probe = chart.node_count() / 2;
  const DistanceMap back = distance_map(g, probe);
  CHECK(from0.values[probe] ==
        doctest::Approx(back.values[0]).epsilon(1e-9));

  const NodeIndex third = chart.node_count() - 1;
  const DistanceMap viam = distance_map(g, third);
  const double hmax = chart.spacing[0];
  CHECK(from0.values[third] <= from0.values[probe] + viam.values[probe] +
                                   2.0 * SolverTolerances::slack(
                                             from0.values[third], hmax, 2));
}

TEST_CASE("edges touching singular nodes borrow the nearest regular value") {
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 9);
  std::vector<SmallMat> values(chart.node_count(), ident(2));
  std::vector<std::uint8_t> mask(chart.node_count(), 0);
  const NodeIndex hole = chart.index({4, 4, 0, 0});
  mask[hole] = 1;
  values[hole] = 1e8 * ident(2);  // masked, so this value must never be read
  const MetricField g(chart, values, mask, "", 0.1);

  const DistanceMap map = distance_map(g, 0);
  CHECK(map.values[chart.node_count() - 1] ==
        doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
  CHECK(map.values[hole] < 2.0);

  CHECK_THROWS_AS(distance_map(g, hole), SourceSingular);
}

TEST_CASE("pointwise form ordering implies distance ordering") {
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 17);
  const MetricField g = random_metric_field(chart, 29, 0.5);
  std::vector<SmallMat> larger(chart.node_count());
  for (NodeIndex i = 0; i < chart.node_count(); ++i)
    larger[i] = g.value(i) + 0.5 * ident(2);
  const MetricField h(chart, larger, {}, "", 1.0);
  const DistanceMap dg = distance_map(g, 0);
  const DistanceMap dh = distance_map(h, 0);
  for (NodeIndex i = 0; i < chart.node_count(); i += 7)
    CHECK(dg.values[i] <= dh.values[i] + 1e-12);
}

TEST_CASE("distances of smooth metrics converge under refinement") {
  // Axis-aligned 1-d profile with an exact length oracle by fine quadrature.
  auto f = [](double x) { return 1.0 + 0.5 * std::sin(2.0 * x); };
  double exact = 0.0;
  const int fine = 200000;
  for (int k = 0; k < fine; ++k) {
    const double x = (k + 0.5) / fine;
    exact += std::sqrt(f(x)) / fine;
  }
  std::vector<double> errs;
  for (std::int64_t n : {33, 65, 129}) {
    const GridChart chart = make_box_chart(1, 0.0, 1.0, n);
    const MetricField g = build_metric(chart, [&](const SmallVec& x) {
      return SmallMat(f(x(0)) * ident(1));
    });
    errs.push_back(
        std::abs(distance_map(g, 0).values[chart.node_count() - 1] - exact));
  }
  const double order = std::log2(errs[0] / errs[2]) / 2.0;
  CHECK(order >= 0.9);
}

TEST_CASE("distance comparability across a component") {
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 17);
  const MetricField g = random_metric_field(chart, 37, 0.5);

  std::vector<std::pair<NodeIndex, NodeIndex>> pairs{
      {0, chart.node_count() - 1}, {3, 200}, {50, 250}};
  const ComparabilityReport same = distance_comparability_check(g, g, pairs);
  CHECK(same.within_bounds);
  for (const auto& row : same.rows) CHECK(row.ratio == doctest::Approx(1.0));

  const MetricField h4 = act(
      build_ell(chart, [](const SmallVec&) { return SmallMat(2.0 * ident(2)); }),
      g);
  const ComparabilityReport conf = distance_comparability_check(g, h4, pairs);
  CHECK(conf.within_bounds);
  for (const auto& row : conf.rows)
    CHECK(row.ratio == doctest::Approx(2.0).epsilon(1e-9));

  const EllField b = random_selfadjoint_ell(g, 41, 0.3);
  const ComparabilityReport rep =
      distance_comparability_check(g, act(b, g), pairs);
  CHECK(rep.within_bounds);
}

TEST_CASE("pullback through the identity and linear maps") {
  const GridChart chart = make_box_chart(2, 0.2, 0.8, 9);
  const GridChart target = make_box_chart(2, 0.0, 1.0, 33);
  const MetricField h = euclidean_metric(target);

  const MetricField same =
      pullback_metric([](const SmallVec& x) { return x; }, h, chart);
  for (NodeIndex i = 0; i < chart.node_count(); ++i)
    CHECK((same.value(i) - ident(2)).norm() <= 1e-11);

  const GridChart small = make_box_chart(2, 0.05, 0.45, 9);
  const MetricField doubled = pullback_metric(
      [](const SmallVec& x) { return SmallVec(2.0 * x); }, h, small);
  for (NodeIndex i = 0; i < small.node_count(); ++i)
    CHECK((doubled.value(i) - 4.0 * ident(2)).norm() <= 1e-10);

  CHECK_THROWS_AS(pullback_metric([](const SmallVec& x) { return SmallVec(10.0 * x); },
                                  h, chart),
                  ImageOutOfChart);

  // Rank-deficient differentials are masked singular.
  const MetricField collapsed = pullback_metric(
      [](const SmallVec& x) {
        SmallVec y(2);
        y << x(0), 0.5;
        return y;
      },
      h, chart, 1.0);
  CHECK(collapsed.singular_count() == collapsed.node_count());
}

TEST_CASE("pullbacks by affine bi-Lipschitz maps preserve distances") {
  const GridChart source = make_box_chart(2, 0.1, 0.4, 17);
  const GridChart target = make_box_chart(2, 0.0, 1.0, 33);
  const MetricField h = euclidean_metric(target);
  SmallMat a(2, 2);
  a << 1.4, 0.3, 0.0, 1.1;
  auto fmap = [&](const SmallVec& x) { return SmallVec(a * x); };
  const MetricField gf = pullback_metric(fmap, h, source);

  const NodeIndex x = 0, y = source.node_count() - 1;
  const double d_pulled = distance_map(gf, x).values[y];
  const double d_image = (fmap(source.coord(y)) - fmap(source.coord(x))).norm();
  const double slack =
      2.0 * SolverTolerances::slack(d_image, source.spacing[0], 2);
  CHECK(std::abs(d_pulled - d_image) <= slack);
}

TEST_CASE("graph metrics reproduce their closed forms") {
  const GridChart chart = make_box_chart(2, -1.0, 1.0, 17);
  const MetricField base = euclidean_metric(chart);
  GridChart line = make_box_chart(1, -4.0, 4.0, 17);
  const MetricField dline = euclidean_metric(line);

  const ScalarField zero = build_scalar(chart, [](const SmallVec&) { return 0.0; });
  const MetricField g0 = graph_metric(zero, base, dline);
  for (NodeIndex i = 0; i < chart.node_count(); ++i)
    CHECK((g0.value(i) - ident(2)).norm() <= 1e-12);

  const double slope = 0.75;
  const ScalarField aff =
      build_scalar(chart, [&](const SmallVec& x) { return slope * x(0); });
  const MetricField ga = graph_metric(aff, base, dline);
  SmallMat want = ident(2);
  want(0, 0) += slope * slope;
  for (NodeIndex i = 0; i < chart.node_count(); ++i) {
    const auto m = chart.multi(i);
    if (chart.on_boundary(m, 0)) continue;  // one-sided gradient at the edge
    CHECK((ga.value(i) - want).norm() <= 1e-10);
  }

  // Cone |x|: off the crease the closed form is I + x x^T / |x|^2.
  const ScalarField cone =
      build_scalar(chart, [](const SmallVec& x) { return x.norm(); });
  const MetricField gc = graph_metric(cone, base, dline);
  for (NodeIndex i = 0; i < chart.node_count(); ++i) {
    const SmallVec x = chart.coord(i);
    const auto m = chart.multi(i);
    if (x.norm() < 0.5 || chart.on_boundary(m, 0) || chart.on_boundary(m, 1))
      continue;
    const SmallMat want_c =
        ident(2) + (x * x.transpose()) / x.squaredNorm();
    CHECK((gc.value(i) - want_c).norm() <= 0.08);  // finite-difference gradient
  }
}

TEST_CASE("sawtooth graphs stay within the singular budget") {
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 33);
  const MetricField base = euclidean_metric(chart);
  GridChart line = make_box_chart(1, -2.0, 2.0, 9);
  const MetricField dline = euclidean_metric(line);
  const double period = 4.0 * chart.spacing[0];
  const ScalarField saw = build_scalar(chart, [&](const SmallVec& x) {
    const double t = std::abs(std::fmod(x(0) / period, 2.0));
    return period * (t <= 1.0 ? t : 2.0 - t);
  });
  const MetricField gs = graph_metric(saw, base, dline);
  CHECK(static_cast<double>(gs.singular_count()) /
            static_cast<double>(gs.node_count()) <=
        kDefaultSingFractionMax);
}
