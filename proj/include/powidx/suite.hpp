#pragma once

// Seeded game generators shared by the tests and the selftest suites.

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "powidx/ltf.hpp"
#include "powidx/rng.hpp"

namespace powidx::suite {

// weights |N(0,1)| scaled, threshold uniform in (-||w||_1, ||w||_1)
WeightedLTF random_monotone_ltf(Rng& rng, std::size_t n);

// as above with |theta| <= (1 - eta) ||w||_1
WeightedLTF random_eta_restricted_ltf(Rng& rng, std::size_t n, double eta);

// near-uniform weights (1 + small jitter)
WeightedLTF random_regular_ltf(Rng& rng, std::size_t n);

// k active coordinates with small integer weights, quota-style threshold
WeightedLTF random_junta_ltf(Rng& rng, std::size_t n, std::size_t k);

// one or two heavy coordinates on top of a near-uniform tail
WeightedLTF random_mixed_ltf(Rng& rng, std::size_t n);

// subset of {lo..n} covering between frac_lo and frac_hi of the indices
std::set<std::size_t> random_index_subset(Rng& rng, std::size_t n, double frac_lo,
                                          double frac_hi, bool may_include_zero);

struct ReconCase {
  WeightedLTF ltf;
  std::set<std::size_t> s;
  std::string name;
};

// mixed junta / regular / heavy+tail games, n in [6..n_max]
std::vector<ReconCase> chow_recon_suite(std::uint64_t seed, std::size_t count,
                                        std::size_t n_max);

// eta-restricted monotone games, n in [6..n_max]
std::vector<ReconCase> shapley_recon_suite(std::uint64_t seed, std::size_t count,
                                           std::size_t n_max);

}  // namespace powidx::suite
