#include "powidx/suite.hpp"

#include <algorithm>
#include <cmath>

namespace powidx::suite {

WeightedLTF random_monotone_ltf(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (double& wi : w) wi = std::fabs(rng.normal()) + 0.05;
  double l1 = 0.0;
  for (double wi : w) l1 += wi;
  const double theta = rng.uniform(-0.9 * l1, 0.9 * l1);
  return WeightedLTF(std::move(w), theta);
}

WeightedLTF random_eta_restricted_ltf(Rng& rng, std::size_t n, double eta) {
  std::vector<double> w(n);
  for (double& wi : w) wi = std::fabs(rng.normal()) + 0.05;
  double l1 = 0.0;
  for (double wi : w) l1 += wi;
  const double bound = (1.0 - eta) * l1;
  const double theta = rng.uniform(-bound, bound);
  return WeightedLTF(std::move(w), theta);
}

WeightedLTF random_regular_ltf(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (double& wi : w) wi = 1.0 + 0.25 * rng.uniform01();
  double l1 = 0.0;
  for (double wi : w) l1 += wi;
  const double theta = rng.uniform(-0.4 * l1, 0.4 * l1);
  return WeightedLTF(std::move(w), theta);
}

WeightedLTF random_junta_ltf(Rng& rng, std::size_t n, std::size_t k) {
  k = std::min(k, n);
  std::vector<double> w(n, 0.0);
  std::vector<std::size_t> order = rng.permutation(n);
  double sum = 0.0;
  for (std::size_t t = 0; t < k; ++t) {
    const double wt = 1.0 + static_cast<double>(rng.below(4));
    w[order[t]] = wt;
    sum += wt;
  }
  const double quota = 1.0 + static_cast<double>(rng.below(
                                 std::max<std::uint64_t>(1, std::uint64_t(sum))));
  return WeightedLTF(std::move(w), 2.0 * quota - sum);
}

WeightedLTF random_mixed_ltf(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (double& wi : w) wi = 0.8 + 0.4 * rng.uniform01();
  const std::size_t heavies = 1 + rng.below(2);
  std::vector<std::size_t> order = rng.permutation(n);
  for (std::size_t t = 0; t < heavies && t < n; ++t)
    w[order[t]] = 3.0 + 2.0 * rng.uniform01();
  double l1 = 0.0;
  for (double wi : w) l1 += wi;
  const double theta = rng.uniform(-0.5 * l1, 0.5 * l1);
  return WeightedLTF(std::move(w), theta);
}

std::set<std::size_t> random_index_subset(Rng& rng, std::size_t n, double frac_lo,
                                          double frac_hi, bool may_include_zero) {
  const double frac = rng.uniform(frac_lo, frac_hi);
  std::size_t want = std::max<std::size_t>(1, static_cast<std::size_t>(frac * n + 0.5));
  want = std::min(want, n);
  std::vector<std::size_t> order = rng.permutation(n);
  std::set<std::size_t> s;
  for (std::size_t t = 0; t < want; ++t) s.insert(order[t] + 1);
  if (may_include_zero && rng.bernoulli(0.5)) s.insert(0);
  return s;
}

std::vector<ReconCase> chow_recon_suite(std::uint64_t seed, std::size_t count,
                                        std::size_t n_max) {
  Rng rng(seed);
  std::vector<ReconCase> out;
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t n = 6 + rng.below(n_max - 5);
    ReconCase c;
    switch (t % 3) {
      case 0:
        c.ltf = random_junta_ltf(rng, n, 1 + rng.below(3));
        c.name = "junta";
        break;
      case 1:
        c.ltf = random_regular_ltf(rng, n);
        c.name = "regular";
        break;
      default:
        c.ltf = random_mixed_ltf(rng, n);
        c.name = "mixed";
        break;
    }
    c.s = random_index_subset(rng, n, 0.3, 1.0, true);
    c.name += "/n" + std::to_string(n);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ReconCase> shapley_recon_suite(std::uint64_t seed, std::size_t count,
                                           std::size_t n_max) {
  Rng rng(seed);
  std::vector<ReconCase> out;
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t n = 6 + rng.below(n_max - 5);
    ReconCase c;
    // keep drawing until the game is eta-restricted (eta = 0.3)
    for (int attempt = 0; attempt < 200; ++attempt) {
      switch (t % 3) {
        case 0:
          c.ltf = random_junta_ltf(rng, n, 1 + rng.below(3));
          c.name = "junta";
          break;
        case 1:
          c.ltf = random_regular_ltf(rng, n);
          c.name = "regular";
          break;
        default:
          c.ltf = random_eta_restricted_ltf(rng, n, 0.5);
          c.name = "restricted";
          break;
      }
      if (is_eta_restricted(c.ltf, 0.3)) break;
    }
    c.s = random_index_subset(rng, n, 0.3, 1.0, false);
    c.name += "/n" + std::to_string(n);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace powidx::suite
