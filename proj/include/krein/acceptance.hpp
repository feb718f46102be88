#pragma once

#include <string>
#include <vector>

#include "krein/krein_core.hpp"

namespace krein {

struct CheckResult {
  int id = 0;
  std::string title;
  bool passed = false;
  /// Measured values against their thresholds.
  std::string detail;
};

struct AcceptanceOptions {
  /// Passed to every spectral classification the checks perform.
  ClassifyOptions classify{};
  /// Check ids to run; empty runs all of them.
  std::vector<int> only;
  /// Concurrent solves in the lattice scans.
  int jobs = 1;
};

/// Number of checks in the suite; ids run from 1 to this.
inline constexpr int kAcceptanceChecks = 13;

/// Runs the checks in id order. A check that throws is reported as failed
/// with the exception message. Output contains no timings, so two runs of the
/// same build produce identical results.
std::vector<CheckResult> run_acceptance(const AcceptanceOptions& options = {});

/// "PASS  3  title: detail"
std::string format_check(const CheckResult& result);

}  // namespace krein
