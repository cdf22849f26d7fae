#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "linearize4/odemodel.hpp"

namespace lin4 {

struct ConditionEntry {
  int index = 0;  // 1..10, in the fixed order of condition_set
  Expr expression;
  bool satisfied = false;
  double max_sample_residual = 0.0;
  std::string status;  // "zero (exact)", "zero (sampled)", "nonzero", "inconclusive"
};

struct LinearizationReport {
  std::vector<ConditionEntry> conditions;
  bool verdict = false;  // conjunction of entry.satisfied
};

// The ten algebraic expressions whose simultaneous vanishing characterizes
// linearizability of the class equation by a point transformation.
// Derivatives are exact; the result order is fixed and deterministic.
std::array<Expr, 10> condition_set(const OdeCoefficients& c);

// Runs the zero test on every condition. Symbolic family parameters are
// sampled alongside x and y; an inconclusive test marks the condition
// unsatisfied (conservative) and records the failure mode.
LinearizationReport is_linearizable(const OdeCoefficients& c, std::uint64_t seed);

}  // namespace lin4
