#pragma once

// Linear threshold functions over {-1,1}^n: f(x) = sign(w.x - theta) with
// sign(0) = +1, plus the 0/1 coalition view of the same game and the
// regularity / critical-index analysis of the weight vector.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace powidx {

// Tolerance for "is this real on the grid" style comparisons.
inline constexpr double kGridRelTol = 1e-9;

struct WeightedLTF {
  std::vector<double> weights;
  double threshold = 0.0;

  WeightedLTF() = default;
  WeightedLTF(std::vector<double> w, double theta);

  std::size_t n() const { return weights.size(); }
  bool is_monotone() const;  // all weights nonnegative
  double weight_sum() const;
  double weight_l1() const;
  double weight_l2() const;

  // sign(w.x - theta), sign(0) = +1; x entries must be +/-1
  int evaluate(const std::vector<int>& x) const;
  // same function with the +1-coordinates given as a bitmask
  int evaluate_mask(std::uint64_t mask) const;
  // sign on a real-valued point (Gaussian inputs)
  int evaluate_real(const std::vector<double>& x) const;
};

struct GameSpec {
  std::vector<double> raw_weights;
  double quota = 0.0;

  GameSpec() = default;
  GameSpec(std::vector<double> v, double q);
};

// w = raw_weights, theta = 2q - sum(v): coalition S passes iff the +/-1
// indicator of S evaluates to +1.
WeightedLTF from_game(const GameSpec& g);

struct SortResult {
  WeightedLTF ltf;                 // weights nonincreasing by magnitude
  std::vector<std::size_t> perm;   // perm[new_index] = original index
};

// Stable sort by |w| descending.
SortResult sort_by_magnitude(const WeightedLTF& f);

// ||w||_inf / ||w||_2, in (0,1]; throws on the zero vector.
double regularity(const std::vector<double>& w);

struct CriticalIndexReport {
  double tau = 0.0;
  std::optional<std::size_t> critical_index;  // 1-based; nullopt = infinite
  std::vector<double> tail_norms;             // sigma_1..sigma_n
};

// Smallest 1-based i with |w_i| <= tau * sigma_i for magnitude-sorted w.
CriticalIndexReport critical_index(const std::vector<double>& sorted_w, double tau);

// |theta| <= (1 - eta) * ||w||_1
bool is_eta_restricted(const WeightedLTF& f, double eta);

struct DiscretizeResult {
  WeightedLTF ltf;
  bool granularity_warning = false;  // gamma exceeded every weight magnitude
  // largest eta for which the rounded game is still eta-restricted
  // (1 - |theta| / ||w||_1); reported rather than silently re-normalized
  double eta_headroom = 0.0;
};

// Round every weight and theta to the nearest integer multiple of gamma.
// Pre: weights rescaled so the largest magnitude is 1.
DiscretizeResult discretize(const WeightedLTF& f, double gamma);

// Rescale so the largest |weight| is 1 (helper for the discretization pre).
WeightedLTF normalize_max_weight(const WeightedLTF& f);

}  // namespace powidx
