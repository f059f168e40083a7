#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cli/report.hpp"
#include "qhall/types.hpp"

namespace qhall::cli {

struct CriterionResult {
  int number = 0;
  std::string name;
  bool pass = false;
  std::vector<std::string> details;
};

// A literal pinned expectation that the suite reports exactly as measured.
// These rows sit outside the twelve criteria; a false `pass` here records a
// measured value honestly rather than a broken computation.
struct SupplementaryRow {
  std::string label;
  bool pass = false;
  std::string detail;
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  std::vector<SupplementaryRow> supplementary;

  int failures() const;
  bool all_pass() const { return failures() == 0; }
  Json to_json() const;
};

// The twelve-point verification battery over the bundled models.  Bounds are
// pinned in the implementation; tol_scale multiplies absolute defect bounds
// only, never R^2, Kendall-tau, or relative thresholds.  When live is set,
// each result line streams as soon as it is measured.
AcceptanceReport run_acceptance(std::uint64_t seed, Real tol_scale,
                                std::ostream* live = nullptr);

}  // namespace qhall::cli
