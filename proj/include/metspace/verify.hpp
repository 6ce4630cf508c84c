#pragma once

#include "metspace/fields.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace metspace {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Names of the verification suites, in criterion order.
const std::vector<std::string>& verify_suite_names();

/// Runs one suite by id (1-based).  All tolerances are pinned inside.
CriterionResult run_criterion(int id, std::uint64_t seed);

CriterionResult run_suite(const std::string& name, std::uint64_t seed);

std::vector<CriterionResult> run_all_criteria(std::uint64_t seed);

// --- seeded random field helpers (shared with the unit tests) --- //

/// Random SPD matrix with log-eigenvalues uniform in [-spread, spread].
SmallMat random_spd(int dim, std::uint64_t& state, double spread = 0.7);

/// Random SPD field over the chart.
MetricField random_metric_field(const GridChart& chart, std::uint64_t seed,
                                double spread = 0.7, std::string label = {});

/// Random g-self-adjoint Ell field whose action moves g by exactly `dl_target`
/// in the extended distance (the extremal node is pinned).
EllField random_selfadjoint_ell(const MetricField& g, std::uint64_t seed,
                                double dl_target);

}  // namespace metspace
