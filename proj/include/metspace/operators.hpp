#pragma once

#include "metspace/fields.hpp"
#include "metspace/geometry.hpp"

#include <Eigen/SparseCore>

#include <cstdint>
#include <string>
#include <vector>

namespace metspace {

enum class Bc { Neumann, Dirichlet };

/// Assembled divergence-form operator u -> m^{-1} S u on chart nodes.  The
/// stiffness is symmetric; under Neumann assembly interior row sums vanish,
/// so total mass is conserved by implicit stepping.
struct SparseOperator {
  GridChart chart;
  NodeIndex n = 0;
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass;
  bool symmetric = true;
  Bc bc = Bc::Neumann;

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
};

/// Laplace-Beltrami assembly: stiffness from the weak form with the inverse
/// metric on gradients, flux weight sqrt(det g) g^{-1} A, mass sqrt(det g)
/// per node cell.  A is an optional coefficient on covectors (defaults to the
/// identity) and must be self-adjoint against g^{-1}.
SparseOperator assemble_laplacian(const MetricField& g,
                                  const EllField* coeff = nullptr,
                                  Bc bc = Bc::Neumann);

/// Assembly from explicit flux weights: diagonal entries through cell faces
/// (coefficients averaged between adjacent nodes), off-diagonal entries
/// through node-centered difference products.  `active` restricts the
/// operator to a node subset (empty = all nodes).
SparseOperator assemble_weighted(const GridChart& chart,
                                 const std::vector<SmallMat>& flux_weight,
                                 const std::vector<double>& mass_density,
                                 Bc bc = Bc::Neumann,
                                 const std::vector<std::uint8_t>& active = {});

/// The metric whose divergence-form Laplacian matches -div_g A grad up to the
/// scalar multiplier f = det(A)^{-1/(n+2)}:  H = f * (G A), per node.  Also
/// verifies det(G^{-1} H) = det(A)^{2/(n+2)} to 1e-12.
MetricField divform_to_metric(const EllField& coeff, const MetricField& g);

struct CorrespondenceReport {
  double max_rel_deviation = 0.0;
  int trials = 0;
};

/// Applies the dictionary operator of divform_to_metric(A,g) and the
/// multiplier-scaled -div_g A grad to random smooth test fields and reports
/// the worst nodewise relative deviation on interior nodes.  Both sides are
/// assembled with the gradient pairing the dictionary is derived in, which
/// makes the two stiffness forms coincide identically.
CorrespondenceReport operator_correspondence_check(const EllField& coeff,
                                                   const MetricField& g,
                                                   int trials,
                                                   std::uint64_t seed = 1);

struct HeatOptions {
  int steps_per_interval = 32;
  double solve_tolerance = 1e-12;
  double residual_limit = 1e-10;
};

struct HeatRun {
  std::vector<double> times;
  std::vector<ScalarField> fields;  // mass-weighted kernel columns
  NodeIndex source = 0;
  std::string method = "backward-euler+rannacher";
  Eigen::VectorXd mass;

  /// Total heat sum rho * m at a recorded time.
  double total_mass(std::size_t k) const;
};

/// Backward-Euler heat flow from a mass-normalized discrete delta at `source`
/// with Rannacher startup (two half steps).  Recorded fields are the
/// mass-weighted kernel columns rho(t, source, .), so sum rho m = 1.
HeatRun heat_run(const SparseOperator& op, NodeIndex source,
                 const std::vector<double>& times, const HeatOptions& opts = {});

struct VaradhanEstimate {
  std::vector<double> per_time;  // -4 t log rho(t, source, target)
  double extrapolated = 0.0;     // linear-in-t extrapolation to t -> 0
};

VaradhanEstimate varadhan_estimate(const HeatRun& run, NodeIndex target);

struct PoincareResult {
  double c1 = 0.0;       // 1/sqrt(lambda1)
  double lambda1 = 0.0;  // smallest nonzero Neumann eigenvalue on the ball
  NodeIndex ball_nodes = 0;
};

/// Measured optimal homogeneous (2,2)-Poincare constant of the metric ball
/// B_g(center, r): inverse iteration with constant deflation on the Neumann
/// Laplacian restricted to the ball.
PoincareResult poincare_measure(const MetricField& g, NodeIndex center, double r,
                                int p = 2, int stencil_order = 2);

struct PoincareConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double eta = 0.0;
};

/// Closed-form propagation of Poincare data across a component:
///   C1' = 2 C1 e^{(n/2p + n/2q + 1) dl},  C2' = 2 C2 e^{(n/2p + n/2q) dl},
///   eta' = eta e^{2 dl}.   p or q may be infinite.
PoincareConstants poincare_propagate(double c1_h, double c2_h, double eta_h,
                                     double dl_gh, int n, double p, double q);

/// Discrete L^p norm with induced-measure weights; the node norm uses the
/// g-induced tensor metric for ranks (0,0), (1,0), (0,1), (1,1).
double lp_norm(const TensorField& u, double p, const MetricField& g);
double lp_norm(const ScalarField& u, double p, const MetricField& g);

/// Two-sided norm-equivalence factors e^{-(r+s+n/2p) dl}, e^{(r+s+n/2p) dl}
/// (the n/2p term vanishes at p = infinity).
std::pair<double, double> norm_preservation_bounds(int r, int s, int n, double p,
                                                   double dl);

}  // namespace metspace
