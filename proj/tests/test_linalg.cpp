#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "metspace/linalg.hpp"
#include "test_helpers.hpp"

#include <cmath>
#include <limits>

using namespace metspace;
using namespace metspace::testing;

TEST_CASE("eig_sym on identity and diagonal matrices") {
  const EigenDecomposition e1 = eig_sym(ident(2));
  CHECK(e1.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e1.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-15));

  const EigenDecomposition e2 = eig_sym(diag2(4.0, 9.0));
  CHECK(e2.eigenvalues(0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(e2.eigenvalues(1) == doctest::Approx(9.0).epsilon(1e-15));
}

TEST_CASE("eig_sym matches the hand-computed characteristic roots") {
  // [[2,1],[1,2]]: det(A - t I) = (2-t)^2 - 1, roots 1 and 3.
  const SmallMat a = mat2(2, 1, 1, 2);
  const EigenDecomposition e = eig_sym(a);
  CHECK(e.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.eigenvalues(1) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("eig_sym reconstruction and orthonormality invariants") {
  std::uint64_t state = 42;
  for (int dim = 1; dim <= 4; ++dim) {
    for (int t = 0; t < 50; ++t) {
      const SmallMat a = random_spd(dim, state, 1.5);
      const EigenDecomposition e = eig_sym(a);
      const SmallMat rec = e.eigenvectors * e.eigenvalues.asDiagonal() *
                           e.eigenvectors.transpose();
      CHECK((rec - a).norm() <= 1e-12 * a.norm());
      CHECK((e.eigenvectors.transpose() * e.eigenvectors - ident(dim)).norm() <=
            1e-12);
      for (int k = 0; k + 1 < dim; ++k)
        CHECK(e.eigenvalues(k) <= e.eigenvalues(k + 1));
    }
  }
}

TEST_CASE("eig_sym sign convention is deterministic") {
  const SmallMat a = mat2(2, 1, 1, 2);
  const EigenDecomposition e1 = eig_sym(a);
  const EigenDecomposition e2 = eig_sym(a);
  CHECK((e1.eigenvectors - e2.eigenvectors).norm() == 0.0);
  for (int j = 0; j < 2; ++j) {
    int first = 0;
    while (first < 2 && std::abs(e1.eigenvectors(first, j)) <= 1e-14) ++first;
    CHECK(e1.eigenvectors(first, j) > 0.0);
  }
}

TEST_CASE("eig_sym rejects non-finite input") {
  SmallMat a = ident(2);
  a(0, 1) = a(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eig_sym(a), NonFinite);
}

TEST_CASE("spd_power identity and diagonal square root") {
  CHECK((spd_power(ident(2), 0.7) - ident(2)).norm() <= 1e-15);
  CHECK((spd_power(diag2(4, 9), 0.5) - diag2(2, 3)).norm() <= 1e-14);
}

TEST_CASE("spd_power semigroup property against direct multiplication") {
  std::uint64_t state = 7;
  for (int t = 0; t < 60; ++t) {
    const int dim = 1 + static_cast<int>(t % 4);
    const SmallMat a = random_spd(dim, state, 1.0);
    const double alpha = -2.0 + 4.0 * ((t * 37) % 100) / 100.0;
    const double beta = -2.0 + 4.0 * ((t * 59) % 100) / 100.0;
    const SmallMat lhs = spd_power(a, alpha) * spd_power(a, beta);
    const SmallMat rhs = spd_power(a, alpha + beta);
    CHECK((lhs - rhs).norm() <= 1e-10 * rhs.norm());
  }
}

TEST_CASE("spd_power operator norm comes straight from the spectrum") {
  std::uint64_t state = 11;
  for (int t = 0; t < 20; ++t) {
    const SmallMat a = random_spd(3, state, 1.2);
    const double lmax = eig_sym(a).eigenvalues(2);
    for (double alpha : {0.0, 0.3, 1.0, 1.7}) {
      CHECK(sym_op_norm(spd_power(a, alpha)) ==
            doctest::Approx(std::pow(lmax, alpha)).epsilon(1e-12));
    }
  }
}

TEST_CASE("spd_power rejects indefinite matrices") {
  CHECK_THROWS_AS(spd_power(diag2(1.0, -2.0), 0.5), NotPositiveDefinite);
  CHECK_THROWS_AS(spd_power(diag2(1.0, 0.0), 0.5), NotPositiveDefinite);
}

TEST_CASE("gen_eig_extrema trivial and scaling cases") {
  std::uint64_t state = 3;
  const SmallMat g = random_spd(2, state, 0.8);
  const auto [same_lo, same_hi] = gen_eig_extrema(g, g);
  CHECK(same_lo == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(same_hi == doctest::Approx(1.0).epsilon(1e-13));

  const auto [s_lo, s_hi] = gen_eig_extrema(SmallMat(4.0 * ident(2)), ident(2));
  CHECK(s_lo == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(s_hi == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("gen_eig_extrema matches a dense sampling of the unit circle") {
  // Brute-force oracle: extrema of u^T G u over u^T H u = 1.
  const SmallMat g = diag2(2.0, 0.5);
  const SmallMat h = ident(2);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int k = 0; k < 20000; ++k) {
    const double th = 2.0 * M_PI * k / 20000.0;
    SmallVec u(2);
    u << std::cos(th), std::sin(th);
    const double r = u.dot(g * u) / u.dot(h * u);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const auto [lmin, lmax] = gen_eig_extrema(g, h);
  CHECK(lmin == doctest::Approx(lo).epsilon(1e-7));
  CHECK(lmax == doctest::Approx(hi).epsilon(1e-7));
  CHECK(lmin == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(lmax == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("gen_eig_extrema spectral reciprocity") {
  std::uint64_t state = 17;
  for (int t = 0; t < 40; ++t) {
    const int dim = 2 + (t % 3);
    const SmallMat g = random_spd(dim, state, 1.0);
    const SmallMat h = random_spd(dim, state, 1.0);
    const auto [lo_gh, hi_gh] = gen_eig_extrema(g, h);
    const auto [lo_hg, hi_hg] = gen_eig_extrema(h, g);
    CHECK(hi_gh == doctest::Approx(1.0 / lo_hg).epsilon(1e-12));
    CHECK(lo_gh == doctest::Approx(1.0 / hi_hg).epsilon(1e-12));
  }
}

TEST_CASE("determinant and inverse") {
  CHECK(spd_det(ident(3)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spd_det(diag2(4, 4)) == doctest::Approx(16.0).epsilon(1e-15));

  // Adjugate oracle: inv([[2,1],[1,2]]) = (1/3)[[2,-1],[-1,2]].
  const SmallMat a = mat2(2, 1, 1, 2);
  const SmallMat inv = spd_inv(a);
  CHECK((inv - mat2(2, -1, -1, 2) / 3.0).norm() <= 1e-14);
  CHECK((a * inv - ident(2)).norm() <= 1e-12);

  std::uint64_t state = 23;
  for (int t = 0; t < 30; ++t) {
    const SmallMat m = random_spd(4, state, 1.3);
    CHECK((m * spd_inv(m) - ident(4)).norm() <= 1e-12);
  }
}

TEST_CASE("log and exp invert each other") {
  std::uint64_t state = 5;
  for (int t = 0; t < 30; ++t) {
    const SmallMat a = random_spd(3, state, 1.0);
    CHECK((sym_exp(spd_log(a)) - a).norm() <= 1e-12 * a.norm());
  }
}

TEST_CASE("operator and Frobenius norms are equivalent with a dim constant") {
  std::uint64_t state = 31;
  for (int t = 0; t < 40; ++t) {
    const int dim = 1 + (t % 4);
    const SmallMat a = random_spd(dim, state, 1.5);
    const double op = sym_op_norm(a);
    const double fro = a.norm();
    CHECK(op <= fro * (1.0 + 1e-14));
    CHECK(fro <= dim * op * (1.0 + 1e-14));
  }
}
