#pragma once

// Partial Shapley indices solver: head guessing by index magnitude, grid
// enumeration over (head weights, threshold, tail norms), affine-constant
// computation by quadrature over the truncated bias mixture, tail recovery
// through the RecoverWeights dynamic program, and estimate-and-verify
// selection of the first acceptable candidate.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "powidx/ltf.hpp"
#include "powidx/power_indices.hpp"
#include "powidx/recover_weights.hpp"
#include "powidx/rng.hpp"

namespace powidx {

struct AffineConstants {
  double slope = 0.0;      // multiplies a tail weight
  double intercept = 0.0;  // additive part
  // defining parameters
  std::vector<double> head;
  double tail_l1 = 0.0;
  double tail_l2 = 0.0;
  double theta = 0.0;
  double delta = 0.0;
  std::size_t n = 0;  // ambient dimension (head plus tail)
};

// Tail Shapley indices of an LTF with regular tail are approximately
// slope * w_i + intercept. Computed by quadrature of the truncated bias
// mixture; depends on the tail only through its norms.
AffineConstants affine_constants(const std::vector<double>& head, double tail_l1,
                                 double tail_l2, double theta, double delta,
                                 std::size_t n, double quad_tol = 1e-10);

enum class VerifyMode { Exact, Sampled };

struct ShapReconConfig {
  double eps = 0.25;
  double delta_fail = 0.05;
  // regularity cap passed to the weight recovery; the full-scale theoretical
  // value is printed by shapley_paper_parameter_table() instead of being run
  double tau_star = 0.5;
  double gamma = 0.125;  // weight granularity
  std::size_t head_cap = 3;
  double head_weight_max = 1.0;
  double head_grid_step = 0.25;  // must be a multiple of gamma
  double theta_max = 2.0;
  double theta_step = 0.25;  // must be a multiple of gamma
  std::vector<double> w1_grid;  // defaults if empty; entries on the gamma grid
  std::vector<double> w2_grid;  // defaults if empty; squares on the gamma^2 grid
  int junta_weight_bound = 6;
  VerifyMode verify = VerifyMode::Exact;
  double accept_factor = 2.0;  // accept at accept_factor * eps
  std::size_t shapley_cap = kDefaultShapleyCap;
  double quad_tol = 1e-10;
  std::uint64_t max_candidates = 2'000'000;  // hard stop for degenerate configs
};

struct ReconstructionResult {
  WeightedLTF ltf;
  bool certified = false;
  double achieved_distance = 0.0;  // exact recomputation when within caps
  std::uint64_t candidates_tried = 0;
  std::string provenance;  // "junta" or "structured"
  // Shapley-specific extras
  std::size_t head_size_guess = 0;
  double w1 = 0.0, w2 = 0.0;
};

ReconstructionResult reconstruct_partial_shapley(const PartialIndexVector& input,
                                                 std::size_t n, const ShapReconConfig& cfg,
                                                 Rng& rng);

// The parameter formulas at full theoretical scale, evaluated (not run).
std::string shapley_paper_parameter_table(std::size_t n, double eps);

// Discretization helper used by the reconstruction tests: rescale so the
// largest weight is 1, then round weights and threshold to the gamma grid.
DiscretizeResult discretize_for_reconstruction(const WeightedLTF& f, double gamma);

}  // namespace powidx
