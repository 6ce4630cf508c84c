#pragma once

#include "metspace/fields.hpp"

#include <optional>
#include <span>
#include <vector>

namespace metspace {

struct DivergenceCertificate {
  std::vector<double> radii;
  std::vector<double> values;
};

/// Value of the extended distance between two metric fields.  `value` is +inf
/// exactly when a divergence certificate is attached (only dl_exhaustion can
/// certify infinity; a single finite grid always yields a finite value).
struct ExtendedDistance {
  double value = 0.0;
  bool is_infinite = false;
  NodeIndex argmax_node = -1;
  bool truncated = false;
  std::optional<DivergenceCertificate> certificate;
};

/// Smallest C >= 1 with e^{-log C}|u|_h <= |u|_g <= e^{log C}|u|_h at every
/// non-singular node.  `argmax_node`, when non-null, receives the node where
/// the bound is tight.
double closeness_constant(const MetricField& g, const MetricField& h,
                          NodeIndex* argmax_node = nullptr);

/// log of the closeness constant; the optimal sandwiching exponent.
ExtendedDistance dl(const MetricField& g, const MetricField& h);

/// The unique h-self-adjoint transport with B^T H B = G per node:
/// B = H^{-1/2} (H^{-1/2} G H^{-1/2})^{1/2} H^{1/2}.
/// Orientation fixed throughout the library: g = h[B., B.].
EllField transport_B(const MetricField& g, const MetricField& h);

/// Group action (B, g) -> g[B., B.], per node B^T G B.  Composition order:
/// act(B2, act(B1, g)) == act(B1*B2, g).
MetricField act(const EllField& b, const MetricField& g);

/// Pointwise inverse of an Ell element.
EllField ell_inverse(const EllField& b);
/// Pointwise composition (matrix product per node).
EllField ell_compose(const EllField& a, const EllField& b);
EllField ell_identity(const GridChart& chart);

/// Path t -> g_t with g_t = g0[B^t ., B^t .] for the transport B taking g0 to
/// g1.  Endpoints reproduce g0 and g1; the path is Lipschitz in the extended
/// distance with constant log ess-sup ||B||.
class GeodesicPath {
 public:
  GeodesicPath(const MetricField& g0, const MetricField& g1);

  MetricField eval(double t) const;
  const EllField& transport() const { return transport_; }
  const std::string& g0_label() const { return g0_label_; }
  const std::string& g1_label() const { return g1_label_; }

  /// Eigenvalue range of B^t over all nodes (min, max); obeys
  /// a^{-t} <= ||B^t|| <= a^t for a = e^{dl(g0,g1)}.
  std::pair<double, double> power_spectrum_range(double t) const;

 private:
  std::string g0_label_, g1_label_;
  GridChart chart_;
  std::vector<std::uint8_t> mask_;
  std::vector<SmallMat> g0_sqrt_;   // G0^{1/2}
  std::vector<SmallMat> middle_;    // (G0^{-1/2} G1 G0^{-1/2})^{1/2}, symmetric
  EllField transport_;
};

GeodesicPath geodesic(const MetricField& g0, const MetricField& g1);

/// Geodesic midpoint h = g_{1/2}; satisfies
/// dl(g0,h) = dl(h,g1) = dl(g0,g1)/2.
MetricField midpoint(const MetricField& g0, const MetricField& g1);

struct CauchyLimitOptions {
  double tail_tolerance = 1e-3;  // last consecutive gap must fall below this
};

/// Limit of a Cauchy sequence of metric fields.  Expresses every element
/// through the self-adjoint square relative to gs[0], extrapolates the
/// per-node logs to the tail, and rebuilds the limit metric.  Throws NotCauchy
/// when consecutive distances do not settle.
MetricField cauchy_limit(std::span<const MetricField> gs,
                         const CauchyLimitOptions& opts = {});

struct SmoothApproxOptions {
  double sing_fraction_max = kDefaultSingFractionMax;
};

/// Mollification by a tensor-product quadratic B-spline of support radius
/// `epsilon` (chart length units).  Weights are positive and renormalized per
/// node (boundary clipping, masked sources skipped), so convex combinations
/// keep every node SPD.
MetricField smooth_approx(const MetricField& g, double epsilon,
                          const SmoothApproxOptions& opts = {});

struct ExhaustionOptions {
  std::int64_t nodes_per_axis = 33;
  double infinity_threshold = 50.0;  // dl level that certifies divergence
};

/// Extended distance over an exhaustion by concentric boxes [-r, r]^dim.
/// Certifies +inf when the per-box values climb past the threshold while
/// strictly increasing across the last three radii; otherwise returns the
/// last finite value flagged as truncated.
ExtendedDistance dl_exhaustion(const FieldGenerator& g_gen,
                               const FieldGenerator& h_gen,
                               const std::vector<double>& radii,
                               const ExhaustionOptions& opts = {});

}  // namespace metspace
