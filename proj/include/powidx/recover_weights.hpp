#pragma once

// Dynamic program over (position, l1 target, squared-l2 target) recovering a
// nonnegative grid weight vector that minimizes
//     sum over provided positions of (alpha_i - slope * w_i + offset)^2
// subject to: w_i in gamma * Z>=0, w_i <= tau * w2, ||w||_1 = w1,
// ||w||_2 = w2. Infeasibility is a valid outcome, not an error.
//
// Table keys are integers (w1/gamma and w2^2/gamma^2), so w1 must be an
// integer multiple of gamma and w2^2 an integer multiple of gamma^2.
// Ties are broken toward the lexicographically smallest weight sequence.

#include <cstddef>
#include <utility>
#include <vector>

namespace powidx {

struct RecoverWeightsInput {
  // (position in 1..n, target value); positions sorted, distinct
  std::vector<std::pair<std::size_t, double>> targets;
  std::size_t n = 0;
  double gamma = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  double tau = 1.0;
  double slope = 1.0;   // A in (alpha - A w + B)^2
  double offset = 0.0;  // B in (alpha - A w + B)^2
};

struct RecoverWeightsResult {
  bool feasible = false;
  std::vector<double> weights;
  double cost = 0.0;
};

RecoverWeightsResult recover_weights(const RecoverWeightsInput& in);

// Exhaustive reference used by the tests and the selftest; identical
// objective, constraint, and tie-breaking semantics.
RecoverWeightsResult recover_weights_bruteforce(const RecoverWeightsInput& in);

}  // namespace powidx
