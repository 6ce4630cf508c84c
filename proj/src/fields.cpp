#include "metspace/fields.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace metspace {

MetricField::MetricField(GridChart chart, std::vector<SmallMat> values,
                         std::vector<std::uint8_t> singular_mask,
                         std::string label, double sing_fraction_max)
    : chart_(std::move(chart)),
      values_(std::move(values)),
      mask_(std::move(singular_mask)),
      label_(std::move(label)) {
  chart_.validate();
  const NodeIndex n = chart_.node_count();
  if (static_cast<NodeIndex>(values_.size()) != n)
    throw Error("MetricField: value count does not match chart");
  if (mask_.empty()) mask_.assign(n, 0);
  if (static_cast<NodeIndex>(mask_.size()) != n)
    throw Error("MetricField: mask size does not match chart");

  NodeIndex flagged = 0;
  for (NodeIndex i = 0; i < n; ++i) {
    if (mask_[i]) {
      ++flagged;
      continue;
    }
    SmallMat& v = values_[i];
    if (v.rows() != chart_.dim || v.cols() != chart_.dim)
      throw DimensionError("MetricField: node value dimension mismatch");
    v = 0.5 * (v + v.transpose()).eval();
    if (!is_spd(v)) {
      mask_[i] = 1;
      ++flagged;
    }
  }
  const double fraction = static_cast<double>(flagged) / static_cast<double>(n);
  if (fraction > sing_fraction_max)
    throw TooSingular("MetricField: singular fraction " + std::to_string(fraction) +
                      " exceeds cap " + std::to_string(sing_fraction_max));
}

NodeIndex MetricField::singular_count() const {
  NodeIndex c = 0;
  for (auto b : mask_) c += (b != 0);
  return c;
}

std::pair<double, double> EllField::ess_sup_norms() const {
  double nb = 0.0, nbi = 0.0;
  for (const auto& b : values) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
    const auto& sv = svd.singularValues();
    nb = std::max(nb, sv(0));
    nbi = std::max(nbi, 1.0 / sv(sv.size() - 1));
  }
  return {nb, nbi};
}

MetricField build_metric(const GridChart& chart, const FieldGeneratorFn& generator,
                         const FieldBuildOptions& opts) {
  chart.validate();
  const NodeIndex n = chart.node_count();
  std::vector<SmallMat> values(n);
  std::vector<std::uint8_t> mask(n, 0);
  for (NodeIndex i = 0; i < n; ++i) {
    SmallMat v;
    bool ok = true;
    try {
      v = generator(chart.coord(i));
    } catch (const std::exception&) {
      ok = false;
    }
    if (!ok || v.rows() != chart.dim || v.cols() != chart.dim || !v.allFinite()) {
      mask[i] = 1;
      values[i] = SmallMat::Identity(chart.dim, chart.dim);
      continue;
    }
    values[i] = v;
  }
  return MetricField(chart, std::move(values), std::move(mask), opts.label,
                     opts.sing_fraction_max);
}

MetricField constant_metric(const GridChart& chart, const SmallMat& value,
                            std::string label) {
  chart.validate();
  std::vector<SmallMat> values(chart.node_count(), value);
  return MetricField(chart, std::move(values), {}, std::move(label));
}

MetricField euclidean_metric(const GridChart& chart, std::string label) {
  return constant_metric(chart, SmallMat::Identity(chart.dim, chart.dim),
                         std::move(label));
}

EllField build_ell(const GridChart& chart, const FieldGeneratorFn& generator,
                   std::string selfadjoint_wrt) {
  chart.validate();
  const NodeIndex n = chart.node_count();
  EllField f;
  f.chart = chart;
  f.selfadjoint_wrt = std::move(selfadjoint_wrt);
  f.values.resize(n);
  for (NodeIndex i = 0; i < n; ++i) {
    SmallMat v = generator(chart.coord(i));
    if (v.rows() != chart.dim || v.cols() != chart.dim || !v.allFinite())
      throw NonFinite("build_ell: generator produced invalid value");
    if (std::abs(v.determinant()) <= 1e-300)
      throw NotPositiveDefinite("build_ell: node value not invertible");
    f.values[i] = v;
  }
  return f;
}

ScalarField build_scalar(const GridChart& chart,
                         const std::function<double(const SmallVec&)>& fn) {
  chart.validate();
  ScalarField f;
  f.chart = chart;
  const NodeIndex n = chart.node_count();
  f.values.resize(n);
  f.mask.assign(n, 0);
  for (NodeIndex i = 0; i < n; ++i) {
    const double v = fn(chart.coord(i));
    f.values[i] = v;
    if (!std::isfinite(v)) f.mask[i] = 1;
  }
  return f;
}

NodeSet all_nodes(const GridChart& chart) {
  NodeSet s(chart.node_count());
  std::iota(s.begin(), s.end(), NodeIndex{0});
  return s;
}

std::pair<double, double> validate_rrm(const MetricField& g, const NodeSet& region) {
  if (region.empty()) throw EmptyRegion("validate_rrm: empty region");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (NodeIndex i : region) {
    if (g.singular(i)) continue;
    const EigenDecomposition ed = eig_sym(g.value(i));
    lo = std::min(lo, ed.eigenvalues(0));
    hi = std::max(hi, ed.eigenvalues(g.chart().dim - 1));
    any = true;
  }
  if (!any) throw AllSingular("validate_rrm: all region nodes singular");
  return {lo, hi};
}

}  // namespace metspace
