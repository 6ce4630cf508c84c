#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "metspace/constructions.hpp"
#include "metspace/metric_space.hpp"
#include "test_helpers.hpp"

#include <cmath>

using namespace metspace;
using namespace metspace::testing;

namespace {

const GridChart kChart = make_box_chart(2, 0.0, 1.0, 12);

MetricField conformal(double f, const GridChart& c = kChart) {
  return constant_metric(c, SmallMat(f * ident(c.dim)));
}

}  // namespace

TEST_CASE("closeness constant on conformal and anisotropic pairs") {
  const MetricField g = random_metric_field(kChart, 1, 0.5);
  CHECK(closeness_constant(g, g) == 1.0);

  CHECK(closeness_constant(conformal(1.0), conformal(4.0)) ==
        doctest::Approx(2.0).epsilon(1e-13));

  // Brute-force oracle over sampled unit vectors per node.
  const MetricField id = conformal(1.0);
  const MetricField an = constant_metric(kChart, diag2(2.0, 0.5));
  double worst = 1.0;
  for (int k = 0; k < 5000; ++k) {
    const double th = 2.0 * M_PI * k / 5000.0;
    SmallVec u(2);
    u << std::cos(th), std::sin(th);
    const double r = std::sqrt(u.dot(an.value(0) * u)) / u.norm();
    worst = std::max({worst, r, 1.0 / r});
  }
  CHECK(closeness_constant(id, an) == doctest::Approx(worst).epsilon(1e-6));
  CHECK(closeness_constant(id, an) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("dl values and chart mismatch") {
  CHECK(dl(conformal(2.0), conformal(2.0)).value == 0.0);
  CHECK(dl(conformal(1.0), conformal(4.0)).value ==
        doctest::Approx(std::log(2.0)).epsilon(1e-13));
  CHECK(dl(conformal(1.0), constant_metric(kChart, diag2(2.0, 0.5))).value ==
        doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-13));

  const GridChart other = make_box_chart(2, 0.0, 2.0, 12);
  CHECK_THROWS_AS(dl(conformal(1.0), conformal(1.0, other)), ChartMismatch);
}

TEST_CASE("dl skips masked nodes and rejects fully masked overlaps") {
  std::vector<SmallMat> values(kChart.node_count(), ident(2));
  std::vector<std::uint8_t> all_masked(kChart.node_count(), 1);
  const MetricField masked(kChart, values, all_masked, "", 1.0);
  CHECK_THROWS_AS(dl(masked, conformal(1.0)), AllSingular);

  std::vector<std::uint8_t> one(kChart.node_count(), 0);
  one[5] = 1;
  std::vector<SmallMat> spiked(kChart.node_count(), ident(2));
  spiked[5] = 1e6 * ident(2);
  const MetricField g(kChart, spiked, one, "", 1.0);
  CHECK(dl(g, conformal(1.0)).value == 0.0);  // the spike is masked away
}

TEST_CASE("metric axioms on random triples") {
  for (int t = 0; t < 25; ++t) {
    const MetricField g = random_metric_field(kChart, 100 + 3 * t, 0.8);
    const MetricField h = random_metric_field(kChart, 101 + 3 * t, 0.8);
    const MetricField k = random_metric_field(kChart, 102 + 3 * t, 0.8);
    CHECK(dl(g, h).value == dl(h, g).value);
    CHECK(dl(g, g).value == 0.0);
    CHECK(dl(g, k).value <= dl(g, h).value + dl(h, k).value + 1e-12);
  }
}

TEST_CASE("transport is the h-self-adjoint square root") {
  const GridChart c = make_box_chart(2, 0.0, 1.0, 6);
  const MetricField h = euclidean_metric(c);
  const MetricField g = constant_metric(c, diag2(4.0, 1.0));
  const EllField b = transport_B(g, h);
  CHECK((b.values[0] - diag2(2.0, 1.0)).norm() <= 1e-13);

  for (int t = 0; t < 30; ++t) {
    const MetricField gg = random_metric_field(c, 500 + 2 * t, 0.9);
    const MetricField hh = random_metric_field(c, 501 + 2 * t, 0.9);
    const EllField bb = transport_B(gg, hh);
    for (NodeIndex i = 0; i < c.node_count(); ++i) {
      const SmallMat& bi = bb.values[i];
      const SmallMat& hi = hh.value(i);
      CHECK((bi.transpose() * hi * bi - gg.value(i)).norm() <= 1e-10);
      CHECK((hi * bi - bi.transpose() * hi).norm() <= 1e-10);
    }
  }
}

TEST_CASE("transport of a field onto itself is the identity") {
  const MetricField g = random_metric_field(kChart, 9, 0.8);
  const EllField b = transport_B(g, g);
  for (NodeIndex i = 0; i < g.node_count(); ++i)
    CHECK((b.values[i] - ident(2)).norm() <= 1e-13);
}

TEST_CASE("group action laws") {
  const MetricField g = random_metric_field(kChart, 21, 0.7);
  CHECK((act(ell_identity(kChart), g).value(7) - g.value(7)).norm() == 0.0);

  // Conformal rescaling is the action of sqrt(f) times the identity.
  const double f = 2.7;
  const EllField sqrtf = build_ell(
      kChart, [&](const SmallVec&) { return SmallMat(std::sqrt(f) * ident(2)); });
  const MetricField fg = act(sqrtf, g);
  for (NodeIndex i = 0; i < g.node_count(); ++i)
    CHECK((fg.value(i) - f * g.value(i)).norm() <= 1e-12 * g.value(i).norm());

  // Composition order induced by the definition: act(B2, act(B1, g)) is the
  // action of the product B1 B2.
  const EllField b1 = random_selfadjoint_ell(g, 31, 0.5);
  const EllField b2 = random_selfadjoint_ell(g, 32, 0.5);
  const MetricField lhs = act(b2, act(b1, g));
  const MetricField rhs = act(ell_compose(b1, b2), g);
  for (NodeIndex i = 0; i < g.node_count(); ++i)
    CHECK((lhs.value(i) - rhs.value(i)).norm() <= 1e-11);

  // Inverse undoes the action.
  const MetricField back = act(ell_inverse(b1), act(b1, g));
  for (NodeIndex i = 0; i < g.node_count(); ++i)
    CHECK((back.value(i) - g.value(i)).norm() <= 1e-11);
}

TEST_CASE("ell ess-sup norms bound the transport spectrum") {
  const MetricField g = euclidean_metric(kChart);
  const EllField b = random_selfadjoint_ell(g, 77, 0.6);
  const auto [nb, nbi] = b.ess_sup_norms();
  CHECK(nb == doctest::Approx(std::exp(0.6)).epsilon(1e-9));
  CHECK(nbi == doctest::Approx(std::exp(0.6)).epsilon(1e-9));
}

TEST_CASE("geodesic through conformal pairs has the closed form") {
  const MetricField g0 = conformal(1.0);
  const MetricField g1 = conformal(4.0);
  const GeodesicPath path(g0, g1);
  for (double t : {0.25, 0.5, 0.75}) {
    const MetricField gt = path.eval(t);
    const double want = std::pow(4.0, t);
    for (NodeIndex i = 0; i < g0.node_count(); ++i)
      CHECK((gt.value(i) - want * ident(2)).norm() <= 1e-12 * want);
    CHECK(dl(g0, gt).value == doctest::Approx(t * dl(g0, g1).value).epsilon(1e-12));
  }
}

TEST_CASE("geodesic endpoints and the Lipschitz bound in t") {
  const MetricField g0 = random_metric_field(kChart, 61, 0.8);
  const MetricField g1 = random_metric_field(kChart, 62, 0.8);
  const GeodesicPath path(g0, g1);
  const double d01 = dl(g0, g1).value;

  double worst = 0.0;
  for (NodeIndex i = 0; i < g0.node_count(); ++i) {
    worst = std::max(worst, (path.eval(0.0).value(i) - g0.value(i)).norm());
    worst = std::max(worst, (path.eval(1.0).value(i) - g1.value(i)).norm());
  }
  CHECK(worst <= 1e-10);

  for (double s : {0.2, 0.5}) {
    for (double t : {0.7, 0.9}) {
      CHECK(dl(path.eval(s), path.eval(t)).value <=
            std::abs(s - t) * d01 + 1e-10);
    }
  }
}

TEST_CASE("midpoint halves the distance") {
  const MetricField g = random_metric_field(kChart, 71, 0.8);
  const MetricField same = midpoint(g, g);
  for (NodeIndex i = 0; i < g.node_count(); ++i)
    CHECK((same.value(i) - g.value(i)).norm() <= 1e-12);

  const MetricField a = conformal(1.0);
  const MetricField b = conformal(4.0);
  const MetricField mid = midpoint(a, b);
  for (NodeIndex i = 0; i < a.node_count(); ++i)
    CHECK((mid.value(i) - 2.0 * ident(2)).norm() <= 1e-13);
  CHECK(dl(a, mid).value == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-13));
  CHECK(dl(mid, b).value == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-13));

  const MetricField g0 = random_metric_field(kChart, 81, 0.9);
  const MetricField g1 = random_metric_field(kChart, 82, 0.9);
  const MetricField m = midpoint(g0, g1);
  const double d01 = dl(g0, g1).value;
  CHECK(std::abs(dl(g0, m).value - 0.5 * d01) <= 1e-9);
  CHECK(std::abs(dl(m, g1).value - 0.5 * d01) <= 1e-9);
}

TEST_CASE("cauchy limit of scalar geometric tails") {
  std::vector<MetricField> gs;
  for (int n = 1; n <= 24; ++n) gs.push_back(conformal(1.0 + std::pow(2.0, -n)));
  const MetricField limit = cauchy_limit(gs);
  CHECK(dl(limit, conformal(1.0)).value <= 1e-6);

  std::vector<MetricField> constant(5, conformal(3.0));
  const MetricField climit = cauchy_limit(constant);
  CHECK(dl(climit, conformal(3.0)).value == 0.0);
}

TEST_CASE("cauchy limit of transport-power families converges to the base") {
  const MetricField g = random_metric_field(kChart, 91, 0.6);
  const EllField b = random_selfadjoint_ell(g, 92, 0.9);
  const auto [nb, nbi] = b.ess_sup_norms();
  const double logn = std::log(std::max(nb, nbi));

  std::vector<MetricField> gs;
  for (int n = 1; n <= 16; ++n) {
    EllField bn = b;
    for (NodeIndex i = 0; i < g.node_count(); ++i) {
      const SmallMat gs2 = spd_sqrt(g.value(i));
      const SmallMat gsi = spd_inv(gs2);
      SmallMat esym = gs2 * b.values[i] * gsi;
      esym = 0.5 * (esym + esym.transpose()).eval();
      bn.values[i] = gsi * spd_power(esym, 1.0 / n) * gs2;
    }
    gs.push_back(act(bn, g));
    // Distance bound from the spectral calculus of fractional powers.
    CHECK(dl(gs.back(), g).value <= logn / n + 1e-10);
  }
  CauchyLimitOptions opts;
  opts.tail_tolerance = 0.01;  // tail gaps shrink like 1/n^2
  const MetricField limit = cauchy_limit(gs, opts);
  CHECK(dl(limit, g).value <= 1e-10);
}

TEST_CASE("cauchy limit rejects sequences that drift apart") {
  std::vector<MetricField> gs;
  for (int n = 1; n <= 6; ++n) gs.push_back(conformal(std::pow(2.0, n)));
  CHECK_THROWS_AS(cauchy_limit(gs), NotCauchy);
}

TEST_CASE("mollification fixes constant fields") {
  const MetricField g = constant_metric(kChart, diag2(2.0, 5.0));
  const MetricField ge = smooth_approx(g, 0.3);
  for (NodeIndex i = 0; i < g.node_count(); ++i)
    CHECK((ge.value(i) - g.value(i)).norm() <= 1e-14);
}

TEST_CASE("mollification ladder shrinks for continuous fields") {
  const GridChart c = make_box_chart(2, 0.0, 1.0, 32);
  const MetricField g = build_metric(c, [](const SmallVec& x) {
    return SmallMat((1.0 + x.squaredNorm()) * ident(2));
  });
  double eps = 0.3, prev = 1e9;
  for (int k = 0; k < 4; ++k) {
    const double val = dl(smooth_approx(g, eps), g).value;
    CHECK(val <= prev + 1e-12);
    prev = val;
    eps *= 0.5;
  }
  CHECK(prev < 0.02);
}

TEST_CASE("mollified jump fields keep a quarter of the jump log") {
  // 1-d brute-force oracle for the mollified step bound.
  const double jump = 100.0;
  {
    const GridChart line = make_box_chart(1, -2.0, 2.0, 257);
    const MetricField step = build_metric(line, [&](const SmallVec& x) {
      return SmallMat((std::abs(x(0)) < 1.0 ? 1.0 : jump) * ident(1));
    });
    for (double eps : {0.5, 0.25, 0.125}) {
      const MetricField se = smooth_approx(step, eps);
      double worst = 1.0;
      for (NodeIndex i = 0; i < line.node_count(); ++i) {
        const double r = se.value(i)(0, 0) / step.value(i)(0, 0);
        worst = std::max({worst, r, 1.0 / r});
      }
      CHECK(0.5 * std::log(worst) >= 0.25 * std::log(jump));
      CHECK(dl(se, step).value >= 0.25 * std::log(jump));
    }
  }
  {
    const GridChart plane = make_box_chart(2, -2.0, 2.0, 48);
    const MetricField g = nonapprox_metric(plane, jump, 1.0);
    for (double eps : {0.8, 0.4, 0.2}) {
      CHECK(dl(smooth_approx(g, eps), g).value >= 0.25 * std::log(jump));
    }
  }
}

TEST_CASE("mollification kernel must fit inside the chart") {
  const MetricField g = euclidean_metric(kChart);
  CHECK_THROWS_AS(smooth_approx(g, 10.0), EpsilonTooLarge);
}

TEST_CASE("exhaustion distances certify divergence only when they climb") {
  const FieldGenerator flat = flat_generator(2);

  FieldGenerator doubled;
  doubled.dim = 2;
  doubled.at = [](const SmallVec&) { return SmallMat(2.0 * ident(2)); };

  const std::vector<double> radii{1.0, 2.0, 3.0, 4.0};
  const ExtendedDistance fin = dl_exhaustion(flat, doubled, radii);
  CHECK(!fin.is_infinite);
  CHECK(fin.truncated);
  CHECK(fin.value == doctest::Approx(std::log(std::sqrt(2.0))).epsilon(1e-12));

  const ExtendedDistance zero = dl_exhaustion(flat, flat, radii);
  CHECK(zero.value == 0.0);

  const FieldGenerator shells = unbounded_conformal(2, 1.0);
  std::vector<double> wide;
  for (int k = 0; k <= 146; ++k) wide.push_back(0.5 + k);
  const ExtendedDistance inf = dl_exhaustion(flat, shells, wide);
  CHECK(inf.is_infinite);
  REQUIRE(inf.certificate.has_value());
  CHECK(inf.certificate->values.back() > 50.0);
}
