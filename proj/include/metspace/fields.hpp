#pragma once

#include "metspace/grid.hpp"
#include "metspace/linalg.hpp"
#include "metspace/types.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace metspace {

/// Fraction of nodes that may be flagged singular before a field is rejected.
/// Discrete stand-in for "the singular set has measure zero".
inline constexpr double kDefaultSingFractionMax = 0.01;

struct FieldBuildOptions {
  double sing_fraction_max = kDefaultSingFractionMax;
  std::string label;
};

/// Per-node SPD matrix field over a grid chart, with a singular-node mask.
class MetricField {
 public:
  MetricField() = default;
  MetricField(GridChart chart, std::vector<SmallMat> values,
              std::vector<std::uint8_t> singular_mask, std::string label = {},
              double sing_fraction_max = kDefaultSingFractionMax);

  const GridChart& chart() const { return chart_; }
  const std::string& label() const { return label_; }
  const SmallMat& value(NodeIndex i) const { return values_[i]; }
  const std::vector<SmallMat>& values() const { return values_; }
  bool singular(NodeIndex i) const { return mask_[i] != 0; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  NodeIndex node_count() const { return static_cast<NodeIndex>(values_.size()); }
  NodeIndex singular_count() const;

 private:
  GridChart chart_;
  std::vector<SmallMat> values_;
  std::vector<std::uint8_t> mask_;
  std::string label_;
};

/// Per-node invertible matrix field (element of the locally elliptic group).
struct EllField {
  GridChart chart;
  std::vector<SmallMat> values;
  std::string selfadjoint_wrt;  // label of the reference metric, if any

  const SmallMat& value(NodeIndex i) const { return values[i]; }
  /// ess-sup of the operator norms of B and B^{-1} over the chart.
  std::pair<double, double> ess_sup_norms() const;
};

struct ScalarField {
  GridChart chart;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;  // empty means all regular

  bool singular(NodeIndex i) const { return !mask.empty() && mask[i] != 0; }
};

/// Tensor field of rank (r,s) with r,s in {0,1}.  Scalars are 1x1 blocks,
/// vectors/covectors dim x 1, endomorphisms dim x dim.
struct TensorField {
  GridChart chart;
  int rank_cov = 0;  // r
  int rank_con = 0;  // s
  std::vector<SmallMat> values;
  std::vector<std::uint8_t> mask;
};

using FieldGeneratorFn = std::function<SmallMat(const SmallVec&)>;

struct FieldGenerator {
  int dim = 2;
  FieldGeneratorFn at;
};

/// Samples `generator` at every chart node.  Nodes where the generator yields
/// non-finite or non-SPD output are flagged singular; throws TooSingular when
/// the flagged fraction exceeds the configured cap.
MetricField build_metric(const GridChart& chart, const FieldGeneratorFn& generator,
                         const FieldBuildOptions& opts = {});

MetricField constant_metric(const GridChart& chart, const SmallMat& value,
                            std::string label = {});

/// Flat chart metric (identity at every node).
MetricField euclidean_metric(const GridChart& chart, std::string label = "delta");

EllField build_ell(const GridChart& chart, const FieldGeneratorFn& generator,
                   std::string selfadjoint_wrt = {});

ScalarField build_scalar(const GridChart& chart,
                         const std::function<double(const SmallVec&)>& f);

using NodeSet = std::vector<NodeIndex>;

NodeSet all_nodes(const GridChart& chart);

/// Tightest constants comparing g to the flat chart metric over the
/// non-singular nodes of `region`: (min lambda_min, max lambda_max).
/// The field is a rough Riemannian metric on the region iff both are finite
/// and the lower constant is positive.
std::pair<double, double> validate_rrm(const MetricField& g, const NodeSet& region);

}  // namespace metspace
