#pragma once

#include "metspace/fields.hpp"
#include "metspace/geometry.hpp"

#include <string>
#include <vector>

namespace metspace {

/// Conformal jump metric f * delta with f = 1 inside the ball |x| < R and
/// f = K outside; the standard witness that rough metrics need not admit
/// smooth approximation (the jump survives every mollification radius).
MetricField nonapprox_metric(const GridChart& chart, double jump,
                             double ball_radius);

/// Analytic generator 2^j * delta on concentric max-norm shells of the given
/// width; fed against the flat generator it drives the exhaustion distance to
/// a divergence certificate.
FieldGenerator unbounded_conformal(int dim, double shell_width);

FieldGenerator flat_generator(int dim);

/// Sampled network of near-straight curves between designated points.
/// Curve (k,l,m) joins points k and l with length at most (1+1/m)|x_k - x_l|;
/// its tube radius is trimmed so the bump's superlevel sets respect the
/// 2^{-k-l-m} epsilon measure budget.
struct CurveNetwork {
  struct Curve {
    int k = 1, l = 1, m = 1;  // 1-based indices into points, plus the m index
    std::vector<SmallVec> polyline;
    double length = 0.0;
    double radius = 0.0;
  };
  std::vector<SmallVec> points;
  std::vector<Curve> curves;
  double tube_radius = 0.25;
  double epsilon_budget = 1024.0;
};

CurveNetwork make_network(const std::vector<SmallVec>& points,
                          const std::vector<int>& m_values, double tube_radius,
                          double epsilon_budget);

struct SturmPair {
  MetricField g;        // (Psi^alpha delta_{R2}) (+) delta_{R2}
  MetricField g_prime;  // Psi^{alpha/2} delta_{R4}
  double max_det_mismatch = 0.0;

  struct BudgetRow {
    int k = 0, l = 0, m = 0;
    double level = 0.0;
    double measured = 0.0;
    double budget = 0.0;
    bool ok = true;
  };
  std::vector<BudgetRow> budgets;
};

/// Two distinct metrics on a 4-d product chart with identical induced volume
/// densities and (along the network) matching distances: the witness that the
/// induced measure-distance pair does not determine the metric.  Psi is the
/// floored tube envelope 1/2 + sup of bump functions; the exponent pair
/// (alpha, alpha/2) keeps the determinants equal exactly.
SturmPair sturm_pair(const GridChart& chart, const CurveNetwork& network,
                     double alpha = 1.0);

/// Psi evaluated on the chart (exposed for tests).
ScalarField sturm_envelope(const GridChart& chart, const CurveNetwork& network);

struct GraphSuiteResult {
  MetricField field;
  double mask_fraction = 0.0;
};

/// Library of Lipschitz-graph metrics over the flat base: "zero", "cone",
/// "affine" (slope), "sawtooth" (period), "creases" (seeded random folds).
GraphSuiteResult lipschitz_graph_suite(const std::string& name,
                                       const GridChart& chart,
                                       double param = 1.0);

}  // namespace metspace
