#pragma once

#include "metspace/types.hpp"

#include <utility>

namespace metspace {

/// Eigendecomposition of a small symmetric matrix.  Eigenvalues ascending,
/// eigenvector columns orthonormal with the first nonzero component of each
/// column positive, so repeated runs and tied spectra produce identical output.
struct EigenDecomposition {
  SmallVec eigenvalues;
  SmallMat eigenvectors;
};

/// Threshold below which an eigenvalue of `a` counts as numerically zero.
double eps_spd(const SmallMat& a);

/// Cyclic Jacobi iteration to machine precision.  Throws NonFinite on NaN/Inf
/// entries.  Input is symmetrized before iterating.
EigenDecomposition eig_sym(const SmallMat& a);

/// Q diag(lambda^alpha) Q^T.  Throws NotPositiveDefinite when the smallest
/// eigenvalue falls below eps_spd(a).
SmallMat spd_power(const SmallMat& a, double alpha);

SmallMat spd_sqrt(const SmallMat& a);
SmallMat spd_inv(const SmallMat& a);
double spd_det(const SmallMat& a);

/// Matrix logarithm of a symmetric positive definite matrix.
SmallMat spd_log(const SmallMat& a);
/// Matrix exponential of a symmetric matrix (always SPD output).
SmallMat sym_exp(const SmallMat& s);

/// Extremal generalized eigenvalues of G u = lambda H u, computed through the
/// symmetric pencil H^{-1/2} G H^{-1/2}.
std::pair<double, double> gen_eig_extrema(const SmallMat& g, const SmallMat& h);

/// Spectral norm of a symmetric matrix (largest |eigenvalue|).
double sym_op_norm(const SmallMat& a);

/// True when `a` is symmetric and all eigenvalues exceed eps_spd(a).
bool is_spd(const SmallMat& a);

}  // namespace metspace
