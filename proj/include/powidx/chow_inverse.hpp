#pragma once

// Three-step partial Chow reconstruction: head/tail split of the input
// indices, candidate enumeration (junta LTFs on the head, plus structured
// candidates whose tail is the rescaled input Chow vector padded with a
// constant weight on the missing coordinates), and estimate-and-verify
// selection of the first acceptable candidate.

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "powidx/ltf.hpp"
#include "powidx/power_indices.hpp"
#include "powidx/rng.hpp"
#include "powidx/shapley_inverse.hpp"  // VerifyMode, ReconstructionResult

namespace powidx {

struct ChowReconConfig {
  double eps = 0.2;
  double delta = 0.05;
  double tau = 0.0;  // 0 -> eps^2 / 4
  std::size_t head_cap = 6;
  int junta_weight_bound = 8;
  // full signed junta enumeration up to this head size; above it the
  // enumeration is restricted to nonincreasing weight vectors aligned with
  // the input magnitudes (the targets are monotone games)
  std::size_t full_junta_head_limit = 2;
  std::size_t structured_head_limit = 3;
  double head_grid_step = 0.0;  // 0 -> max(sqrt(tau)/|H|, 0.25)
  double head_weight_max = 2.0;
  double theta_step = 0.25;
  double theta_max = 3.0;
  double gamma_prime_step = 0.0;  // 0 -> max(tau, 0.125)
  VerifyMode verify = VerifyMode::Exact;
  double accept_factor = 2.0;
  std::size_t chow_cap = kDefaultChowCap;
  std::uint64_t max_candidates = 4'000'000;
};

// All distinct truth tables of integer-weight LTFs on h variables with
// |weights| <= bound (signed mode) or bound >= weights[0] >= ... >= 0
// (sorted mode), thresholds on the matching integer grid. h <= 6.
struct JuntaLTF {
  std::vector<double> weights;  // length h
  double theta = 0.0;
};
std::vector<JuntaLTF> enumerate_junta_candidates(std::size_t h, int weight_bound,
                                                 bool signed_mode = true);

// Step 1a split: indices of S (excluding 0) with |value| >= tau^2 versus the
// rest. The boundary |value| == tau^2 goes to the head.
struct HeadTailSplit {
  std::vector<std::size_t> head_in_s;
  std::vector<std::size_t> tail_in_s;
};
HeadTailSplit split_head_tail(const PartialIndexVector& input, double tau);

// One structured candidate of the reconstruction (tail rescaled from the
// input values, missing coordinates filled with the balancing weight r).
// Returns false when the radicand for r is negative beyond rounding slack.
bool build_structured_candidate(const PartialIndexVector& input,
                                const std::vector<std::size_t>& head,
                                const std::vector<double>& head_weights,
                                double theta_prime, double gamma_prime, std::size_t n,
                                WeightedLTF* out);

ReconstructionResult reconstruct_partial_chow(const PartialIndexVector& input,
                                              std::size_t n, const ChowReconConfig& cfg,
                                              Rng& rng);

// Step-3 selection on an explicit candidate list: returns the first
// candidate whose verified distance to the input is at most
// accept_factor * eps, else the best-scoring one flagged uncertified.
// Works for Chow and Shapley inputs alike.
struct VerifyOutcome {
  std::size_t chosen = 0;  // index into the candidate list
  bool certified = false;
  double distance = 0.0;   // verified distance of the chosen candidate
  std::size_t tried = 0;
};
VerifyOutcome verify_candidates(const std::vector<WeightedLTF>& candidates,
                                const PartialIndexVector& input, double eps,
                                double delta, VerifyMode mode, Rng& rng,
                                double accept_factor = 2.0);

std::string chow_paper_parameter_table(double eps);

}  // namespace powidx
