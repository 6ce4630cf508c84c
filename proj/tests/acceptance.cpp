// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.

#include "metspace/verify.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
  std::uint64_t seed = 20240521;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);

  // Stated runtime budgets (seconds) for the timed criteria.
  const auto budget = [](int id) -> double {
    if (id == 1) return 10.0;
    if (id == 5) return 5.0;
    if (id == 10) return 60.0;
    return 0.0;  // untimed
  };

  int failures = 0;
  for (int id = 1; id <= 13; ++id) {
    metspace::CriterionResult r;
    try {
      r = metspace::run_criterion(id, seed);
    } catch (const std::exception& e) {
      r.id = id;
      r.name = metspace::verify_suite_names()[id - 1];
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    if (r.passed && budget(id) > 0.0 && r.seconds > budget(id)) {
      r.passed = false;
      r.detail += " [runtime budget exceeded]";
    }
    std::printf("%s  C%02d %-18s  %6.2fs  %s\n", r.passed ? "PASS" : "FAIL",
                r.id, r.name.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
    if (!r.passed) ++failures;
  }
  std::printf("%d/13 criteria passed\n", 13 - failures);
  return failures;
}
