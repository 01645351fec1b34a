// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sectorial/tolerances.hpp"

namespace sectorial::acceptance {

struct Options {
  std::uint64_t seed = 20240601;
  Tolerances tol = default_tolerances();
  std::vector<int> only;  // empty runs every criterion
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool check_passed = false;
  double seconds = 0.0;
  double time_limit = 0.0;  // 0 when unbounded
  std::string detail;

  bool within_time() const { return time_limit <= 0.0 || seconds <= time_limit; }
  bool pass() const { return check_passed && within_time(); }
};

int criterion_count();

/// Runs the selected criteria in order; on_result sees each result as it finishes.
std::vector<CriterionResult> run(const Options& options,
                                 const std::function<void(const CriterionResult&)>& on_result = {});

/// One line: status, id, name, timing, detail.
std::string format_line(const CriterionResult& r);

}  // namespace sectorial::acceptance
