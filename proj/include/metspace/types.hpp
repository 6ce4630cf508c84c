#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace metspace {

// Pointwise metric data lives in tangent dimensions 1..4; fixed max size keeps
// everything on the stack.
using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;

using NodeIndex = std::int64_t;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonFinite : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct NotSymmetric : Error { using Error::Error; };
struct ChartMismatch : Error { using Error::Error; };
struct AllSingular : Error { using Error::Error; };
struct TooSingular : Error { using Error::Error; };
struct EmptyRegion : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };
struct ChecksumMismatch : Error { using Error::Error; };
struct SourceSingular : Error { using Error::Error; };
struct NotInSameComponent : Error { using Error::Error; };
struct NotCauchy : Error { using Error::Error; };
struct EpsilonTooLarge : Error { using Error::Error; };
struct ImageOutOfChart : Error { using Error::Error; };
struct DimensionError : Error { using Error::Error; };
struct SingularCell : Error { using Error::Error; };
struct SolverDivergence : Error { using Error::Error; };
struct NonPositiveKernel : Error { using Error::Error; };
struct BallTooSmall : Error { using Error::Error; };

}  // namespace metspace
