#include "metspace/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace metspace {

double eps_spd(const SmallMat& a) {
  const double scale = a.trace() / static_cast<double>(a.rows());
  return 1e-14 * std::abs(scale);
}

namespace {

void fix_column_signs(SmallMat& q) {
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      const double v = q(i, j);
      if (std::abs(v) > 1e-14) {
        if (v < 0.0) q.col(j) = -q.col(j);
        break;
      }
    }
  }
}

}  // namespace

EigenDecomposition eig_sym(const SmallMat& a) {
  if (!a.allFinite()) throw NonFinite("eig_sym: matrix has NaN/Inf entries");
  const Eigen::Index n = a.rows();

  SmallMat m = 0.5 * (a + a.transpose());
  SmallMat v = SmallMat::Identity(n, n);

  const double frob2 = m.squaredNorm();
  const double stop = frob2 * 1e-32;

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off2 = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off2 += m(p, q) * m(p, q);
    if (off2 <= stop) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        const double tau = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (Eigen::Index k = 0; k < n; ++k) {
          const double mkp = m(k, p);
          const double mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double mpk = m(p, k);
          const double mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::array<int, 4> order{0, 1, 2, 3};
  std::sort(order.begin(), order.begin() + n,
            [&](int i, int j) { return m(i, i) < m(j, j); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.eigenvalues(j) = m(order[j], order[j]);
    out.eigenvectors.col(j) = v.col(order[j]);
  }
  fix_column_signs(out.eigenvectors);
  return out;
}

namespace {

SmallMat apply_spectral(const SmallMat& a, double (*f)(double, double), double p,
                        const char* who) {
  const EigenDecomposition ed = eig_sym(a);
  const double eps = eps_spd(a);
  if (ed.eigenvalues(0) <= eps)
    throw NotPositiveDefinite(std::string(who) + ": smallest eigenvalue " +
                              std::to_string(ed.eigenvalues(0)) +
                              " below SPD threshold");
  const Eigen::Index n = a.rows();
  SmallVec d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = f(ed.eigenvalues(i), p);
  SmallMat r = ed.eigenvectors * d.asDiagonal() * ed.eigenvectors.transpose();
  return 0.5 * (r + r.transpose());
}

}  // namespace

SmallMat spd_power(const SmallMat& a, double alpha) {
  if (!std::isfinite(alpha)) throw NonFinite("spd_power: alpha not finite");
  return apply_spectral(
      a, [](double x, double p) { return std::pow(x, p); }, alpha, "spd_power");
}

SmallMat spd_sqrt(const SmallMat& a) { return spd_power(a, 0.5); }

SmallMat spd_inv(const SmallMat& a) { return spd_power(a, -1.0); }

double spd_det(const SmallMat& a) {
  const EigenDecomposition ed = eig_sym(a);
  if (ed.eigenvalues(0) <= eps_spd(a))
    throw NotPositiveDefinite("spd_det: matrix not positive definite");
  double d = 1.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) d *= ed.eigenvalues(i);
  return d;
}

SmallMat spd_log(const SmallMat& a) {
  return apply_spectral(
      a, [](double x, double) { return std::log(x); }, 0.0, "spd_log");
}

SmallMat sym_exp(const SmallMat& s) {
  const EigenDecomposition ed = eig_sym(s);
  const Eigen::Index n = s.rows();
  SmallVec d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = std::exp(ed.eigenvalues(i));
  SmallMat r = ed.eigenvectors * d.asDiagonal() * ed.eigenvectors.transpose();
  return 0.5 * (r + r.transpose());
}

std::pair<double, double> gen_eig_extrema(const SmallMat& g, const SmallMat& h) {
  if (g.rows() != h.rows())
    throw ChartMismatch("gen_eig_extrema: dimension mismatch");
  const SmallMat hinvsqrt = spd_power(h, -0.5);
  SmallMat pencil = hinvsqrt * g * hinvsqrt;
  pencil = 0.5 * (pencil + pencil.transpose());
  const EigenDecomposition ed = eig_sym(pencil);
  if (ed.eigenvalues(0) <= eps_spd(pencil))
    throw NotPositiveDefinite("gen_eig_extrema: pencil not positive definite");
  return {ed.eigenvalues(0), ed.eigenvalues(g.rows() - 1)};
}

double sym_op_norm(const SmallMat& a) {
  const EigenDecomposition ed = eig_sym(a);
  return std::max(std::abs(ed.eigenvalues(0)),
                  std::abs(ed.eigenvalues(a.rows() - 1)));
}

bool is_spd(const SmallMat& a) {
  if (!a.allFinite()) return false;
  if ((a - a.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()))
    return false;
  const EigenDecomposition ed = eig_sym(a);
  return ed.eigenvalues(0) > eps_spd(a);
}

}  // namespace metspace
