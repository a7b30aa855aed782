#pragma once

// Exact and Monte-Carlo power indices of LTFs: Chow parameters (uniform and
// p-biased), generalized Shapley indices, Gaussian degree-1 coefficients,
// and the distance measures between games.
//
// Index conventions: variables are 1..n. Chow-family vectors carry an extra
// slot 0 holding the degree-0 coefficient (E[f] under the relevant
// distribution); Shapley vectors have no slot 0.

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "powidx/ltf.hpp"
#include "powidx/rng.hpp"

namespace powidx {

enum class IndexKind { Chow, ChowP, Shapley, CorrP, Hermite };

const char* index_kind_name(IndexKind k);
IndexKind index_kind_from_name(const std::string& s);

struct IndexVector {
  IndexKind kind = IndexKind::Chow;
  std::size_t n = 0;
  std::optional<double> p;      // bias, for ChowP / CorrP
  std::vector<double> values;   // size n+1 with slot 0, or n for Shapley

  bool has_slot0() const { return kind != IndexKind::Shapley; }
  // i in [0..n] for slot-0 kinds, [1..n] for Shapley
  double value(std::size_t i) const;
  double& value_ref(std::size_t i);
  static IndexVector zeros(IndexKind kind, std::size_t n);
};

struct PartialIndexVector {
  IndexKind kind = IndexKind::Chow;
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, double>> entries;  // sorted, distinct indices

  void validate() const;
  bool has(std::size_t i) const;
  double at(std::size_t i) const;
  std::vector<std::size_t> indices() const;
};

// Keep only the indices in s (s may contain 0 for Chow-family kinds).
PartialIndexVector mask_to_partial(const IndexVector& v, const std::set<std::size_t>& s);

inline constexpr std::size_t kDefaultChowCap = 24;
inline constexpr std::size_t kDefaultShapleyCap = 20;

// Exact degree-0/1 Fourier coefficients by full enumeration. Integer counts
// internally, so the values are exact multiples of 2^(1-n).
IndexVector chow_exact(const WeightedLTF& f, std::size_t cap = kDefaultChowCap);

// p-biased degree-1 coefficients f^(i,p) = E[f * psi_p(x_i)], slot 0 = E[f].
IndexVector chow_pbiased_exact(const WeightedLTF& f, double p,
                               std::size_t cap = kDefaultChowCap);

// f*(i,p) = E[f * x_i] under u_p^n, slot 0 = E[f].
IndexVector coordinate_correlation_pbiased(const WeightedLTF& f, double p,
                                           std::size_t cap = kDefaultChowCap);

// Generalized Shapley indices of a monotone LTF by size-stratified coalition
// counting, O(2^(n-1) * n).
IndexVector shapley_exact(const WeightedLTF& f, std::size_t cap = kDefaultShapleyCap);

// Pseudo-polynomial variant for integer weights (sum of weights bounded),
// usable up to n = 64. Weights must be nonnegative integers.
IndexVector shapley_exact_integer(const std::vector<std::int64_t>& weights, double threshold);

using Oracle = std::function<int(const std::vector<int>&)>;

Oracle make_oracle(const WeightedLTF& f);

// EstimateShapley: random permutations, each walked as a prefix chain so one
// permutation yields a pivot observation for every coordinate. Sample count
// m = ceil((2 n / gamma^2) * ln(2 n / delta_fail)) (Hoeffding constant 2).
IndexVector shapley_estimate(const Oracle& f, std::size_t n, double gamma,
                             double delta_fail, Rng& rng);
std::size_t shapley_estimate_sample_count(std::size_t n, double gamma, double delta_fail);

// Chow estimates on a subset S of {0..n}: each coordinate within
// eps/sqrt(|S|) with confidence 1 - delta/|S|;
// N = ceil((2 |S| / eps^2) * ln(2 |S| / delta)).
PartialIndexVector chow_estimate(const Oracle& f, std::size_t n,
                                 const std::set<std::size_t>& s, double eps,
                                 double delta, Rng& rng);
std::size_t chow_estimate_sample_count(std::size_t s_size, double eps, double delta);

// Monte-Carlo degree-0/1 Hermite coefficients under N(0,1)^n; requires
// ||w||_2 = 1.
IndexVector hermite_degree1_estimate(const WeightedLTF& f, std::size_t samples, Rng& rng);

// Distances (exact, enumeration; n <= cap).
double d_hamming(const WeightedLTF& f, const WeightedLTF& g,
                 std::size_t cap = kDefaultChowCap);
double d_chow(const WeightedLTF& f, const WeightedLTF& g,
              std::size_t cap = kDefaultChowCap);
double d_chow_partial(const WeightedLTF& f, const WeightedLTF& g,
                      const std::set<std::size_t>& s, std::size_t cap = kDefaultChowCap);
double d_shapley(const WeightedLTF& f, const WeightedLTF& g,
                 std::size_t cap = kDefaultShapleyCap);
double d_shapley_partial(const WeightedLTF& f, const WeightedLTF& g,
                         const std::set<std::size_t>& s,
                         std::size_t cap = kDefaultShapleyCap);

// l2 distance between an index vector restricted to S and the matching
// indices of a partial vector.
double partial_distance(const PartialIndexVector& input, const IndexVector& v);

// Per-slice acceptance counts: [k] = #{x : popcount(x) = k, f(x) = +1}.
// Shared by the p-biased quadrature and D_Shap machinery.
std::vector<std::uint64_t> slice_positive_counts(const WeightedLTF& f);

// [k][i] = #{x : popcount(x) = k, x_i = +1, f(x) = +1} (i is 0-based here).
std::vector<std::vector<std::uint64_t>> slice_positive_counts_per_coord(const WeightedLTF& f);

// E_{u_p^n}[f] from slice counts.
double pbiased_mean_from_slices(const std::vector<std::uint64_t>& pos, std::size_t n, double p);

// binomial(n, k) as double
double binomial(std::size_t n, std::size_t k);

}  // namespace powidx
