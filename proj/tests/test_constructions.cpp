#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "metspace/constructions.hpp"
#include "metspace/metric_space.hpp"
#include "test_helpers.hpp"

#include <cmath>

using namespace metspace;
using namespace metspace::testing;

TEST_CASE("jump metric reproduces its comparison constants") {
  const GridChart chart = make_box_chart(2, -2.0, 2.0, 32);
  const NodeSet all = all_nodes(chart);

  const MetricField huge = nonapprox_metric(chart, 1e43, 1.0);
  const auto [lo, hi] = validate_rrm(huge, all);
  CHECK(lo == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hi == doctest::Approx(1e43).epsilon(1e-12));

  const MetricField trivial = nonapprox_metric(chart, 1.0, 1.0);
  const auto [tlo, thi] = validate_rrm(trivial, all);
  CHECK(tlo == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(thi == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("jump metrics resist mollification") {
  const GridChart chart = make_box_chart(2, -2.0, 2.0, 48);
  const double jump = 100.0;
  const MetricField g = nonapprox_metric(chart, jump, 1.0);
  for (double eps : {1.0, 0.5, 0.25})
    CHECK(dl(smooth_approx(g, eps), g).value >= 0.25 * std::log(jump));
}

TEST_CASE("conformal shells grow one power per shell") {
  const FieldGenerator gen = unbounded_conformal(2, 1.0);

  // On shell j the comparison constant against the flat metric is 2^j.
  for (int j : {0, 1, 3, 7}) {
    SmallVec x(2);
    x << j + 0.5, 0.0;
    CHECK((gen.at(x) - std::pow(2.0, j) * ident(2)).norm() == 0.0);
  }

  // Compact truncation to shells <= j gives the finite value (j/2) log 2.
  const FieldGenerator flat = flat_generator(2);
  const ExtendedDistance fin = dl_exhaustion(flat, gen, {3.5});
  CHECK(fin.value == doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-12));
  CHECK(fin.truncated);

  std::vector<double> radii;
  for (int k = 0; k <= 146; ++k) radii.push_back(0.5 + k);
  const ExtendedDistance inf = dl_exhaustion(flat, gen, radii);
  REQUIRE(inf.is_infinite);
  const auto& cert = *inf.certificate;
  for (std::size_t i = 1; i < cert.values.size(); ++i)
    CHECK(cert.values[i] - cert.values[i - 1] ==
          doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
}

namespace {

CurveNetwork demo_network(double tube_radius, double budget) {
  SmallVec p0(4), p1(4);
  p0 << 0.25, 0.3, 0.25, 0.3;
  p1 << 0.75, 0.7, 0.7, 0.75;
  return make_network({p0, p1}, {1, 2, 4, 8}, tube_radius, budget);
}

}  // namespace

TEST_CASE("networks respect the curve length bounds") {
  const CurveNetwork net = demo_network(0.4, 4096.0);
  CHECK(net.curves.size() == 4);
  for (const auto& curve : net.curves) {
    const double base =
        (net.points[curve.l - 1] - net.points[curve.k - 1]).norm();
    CHECK(curve.length <= (1.0 + 1.0 / curve.m) * base + 1e-12);
    CHECK((curve.polyline.front() - net.points[curve.k - 1]).norm() == 0.0);
    CHECK((curve.polyline.back() - net.points[curve.l - 1]).norm() == 0.0);
  }
}

TEST_CASE("paired metrics share their volume density exactly") {
  const GridChart chart = make_box_chart(4, 0.0, 1.0, 7);
  const CurveNetwork net = demo_network(0.4, 4096.0);
  const SturmPair pair = sturm_pair(chart, net, 1.0);
  CHECK(pair.max_det_mismatch <= 1e-14);
  for (const auto& row : pair.budgets) CHECK(row.ok);

  // The two fields genuinely differ even though the dets agree.
  double diff = 0.0;
  for (NodeIndex i = 0; i < chart.node_count(); ++i)
    diff = std::max(diff, (pair.g.value(i) - pair.g_prime.value(i)).norm());
  CHECK(diff > 0.01);
}

TEST_CASE("pair degenerates to the floor and to the flat metric") {
  const GridChart chart = make_box_chart(4, 0.0, 1.0, 5);

  // Tiny tubes: the envelope sits at its floor 1/2 almost everywhere.
  const CurveNetwork thin = demo_network(1e-6, 1e-6);
  const SturmPair floor_pair = sturm_pair(chart, thin, 1.0);
  SmallMat floor_g = ident(4);
  floor_g(0, 0) = floor_g(1, 1) = 0.5;
  const NodeIndex corner = 0;  // far from the tubes
  CHECK((floor_pair.g.value(corner) - floor_g).norm() <= 1e-12);
  CHECK((floor_pair.g_prime.value(corner) - std::sqrt(0.5) * ident(4)).norm() <=
        1e-12);

  // Tubes covering everything: the envelope is 1 and both metrics are flat.
  const CurveNetwork fat = demo_network(10.0, 1e9);
  bool covered = true;
  const ScalarField psi = sturm_envelope(chart, fat);
  for (double v : psi.values) covered = covered && std::abs(v - 1.0) <= 1e-12;
  if (covered) {
    const SturmPair flat_pair = sturm_pair(chart, fat, 1.0);
    for (NodeIndex i = 0; i < chart.node_count(); ++i) {
      CHECK((flat_pair.g.value(i) - ident(4)).norm() <= 1e-12);
      CHECK((flat_pair.g_prime.value(i) - ident(4)).norm() <= 1e-12);
    }
  }
}

TEST_CASE("pair construction needs the 4-d product chart") {
  const GridChart chart = make_box_chart(2, 0.0, 1.0, 5);
  CHECK_THROWS_AS(sturm_pair(chart, demo_network(0.3, 100.0), 1.0),
                  DimensionError);
}

TEST_CASE("graph suite closed forms and mask budget") {
  const GridChart chart = make_box_chart(2, -1.0, 1.0, 17);

  const GraphSuiteResult zero = lipschitz_graph_suite("zero", chart);
  for (NodeIndex i = 0; i < chart.node_count(); ++i)
    CHECK((zero.field.value(i) - ident(2)).norm() <= 1e-13);

  const GraphSuiteResult cone = lipschitz_graph_suite("cone", chart);
  for (NodeIndex i = 0; i < chart.node_count(); ++i) {
    const SmallVec x = chart.coord(i);
    const auto m = chart.multi(i);
    if (x.norm() < 0.5 || chart.on_boundary(m, 0) || chart.on_boundary(m, 1))
      continue;
    const SmallMat want = ident(2) + (x * x.transpose()) / x.squaredNorm();
    CHECK((cone.field.value(i) - want).norm() <= 0.08);
  }

  const GraphSuiteResult saw =
      lipschitz_graph_suite("sawtooth", chart, 4.0 * chart.spacing[0]);
  CHECK(saw.mask_fraction <= kDefaultSingFractionMax);

  const GraphSuiteResult folds = lipschitz_graph_suite("creases", chart, 11.0);
  CHECK(folds.mask_fraction <= kDefaultSingFractionMax);
  const auto [lo, hi] = validate_rrm(folds.field, all_nodes(chart));
  CHECK(lo >= 1.0 - 1e-12);  // graph metrics dominate the base metric
  CHECK(hi < 10.0);

  CHECK_THROWS_AS(lipschitz_graph_suite("unknown", chart), Error);
}
