#pragma once

#include "metspace/fields.hpp"
#include "metspace/metric_space.hpp"

#include <functional>
#include <vector>

namespace metspace {

struct MeasureReport {
  NodeIndex region_nodes = 0;
  double volume = 0.0;
};

/// Volume of `region` under the induced measure: sum over non-singular region
/// nodes of sqrt(det g) times the node cell volume, boundary cells clipped to
/// the chart.
MeasureReport measure(const MetricField& g, const NodeSet& region);

/// Relative error budget of the shortest-path solver per stencil order,
/// calibrated on the flat case.  Distance checks use
///   slack(d) = rel[order] * d + 1.0 * max spacing.
struct SolverTolerances {
  static double stencil_rel(int order);
  static double slack(double distance, double max_spacing, int order);
};

struct DistanceMap {
  GridChart chart;
  NodeIndex source = 0;
  int stencil_order = 2;
  std::vector<double> values;

  double at(NodeIndex i) const { return values[i]; }
};

/// Single-source metric distances by Dijkstra relaxation over an extended
/// neighbor stencil (primitive offsets with max coordinate <= order).  Edge
/// weight between a and b is the trapezoid metric length
/// (|dx|_{g(a)} + |dx|_{g(b)}) / 2; edges touching singular nodes substitute
/// the nearest non-singular value.  Accuracy is O(h) plus the angular stencil
/// error covered by SolverTolerances.
DistanceMap distance_map(const MetricField& g, NodeIndex source,
                         int stencil_order = 2);

double distance(const MetricField& g, NodeIndex x, NodeIndex y,
                int stencil_order = 2);

ScalarField to_scalar_field(const DistanceMap& map);

struct ComparabilityRow {
  NodeIndex x = 0, y = 0;
  double d_g = 0.0, d_h = 0.0, ratio = 1.0;
};

struct ComparabilityReport {
  double dl_value = 0.0;
  double worst_ratio_deviation = 0.0;  // max |log ratio| - dl over the pairs
  bool within_bounds = true;
  std::vector<ComparabilityRow> rows;
};

/// Verifies e^{-dl} d_g <= d_h <= e^{dl} d_g on the given node pairs, with
/// two-sided stencil slack.
ComparabilityReport distance_comparability_check(
    const MetricField& g, const MetricField& h,
    const std::vector<std::pair<NodeIndex, NodeIndex>>& pairs,
    int stencil_order = 2);

using CoordinateMap = std::function<SmallVec(const SmallVec&)>;

/// Pullback of `h` through F: per source node, G = J^T h(F(x)) J with J the
/// central finite-difference Jacobian and h evaluated by multilinear
/// interpolation.  Rank-deficient nodes are masked singular.
MetricField pullback_metric(const CoordinateMap& f, const MetricField& h,
                            const GridChart& source_chart,
                            double sing_fraction_max = kDefaultSingFractionMax);

/// Metric induced on the graph of a scalar Lipschitz field: the pullback of
/// g (+) g' through x -> (x, f(x)); closed form G + g'(f(x)) grad f grad f^T.
MetricField graph_metric(const ScalarField& f, const MetricField& g,
                         const MetricField& g_prime,
                         double sing_fraction_max = kDefaultSingFractionMax);

/// Multilinear interpolation of a metric field at a chart point.  Returns
/// false when a contributing corner is singular or the point leaves the chart.
bool interpolate_metric(const MetricField& h, const SmallVec& y, SmallMat& out);

}  // namespace metspace
