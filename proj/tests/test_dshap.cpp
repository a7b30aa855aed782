#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "powidx/dshap.hpp"
#include "powidx/power_indices.hpp"
#include "powidx/rng.hpp"
#include "powidx/suite.hpp"

using namespace powidx;

TEST_CASE("pmf at n = 3 is uniform on the non-constant strings") {
  DShapParams d = make_dshap(3);
  CHECK(d.lambda_n == doctest::Approx(3.0));  // 2 H_2 = 2(1 + 1/2)
  for (std::size_t k : {std::size_t{1}, std::size_t{2}})
    CHECK(dshap_pmf_slice(d, k) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(dshap_pmf(d, {1, 1, 1}) == 0.0);
  CHECK(dshap_pmf(d, {-1, -1, -1}) == 0.0);
}

TEST_CASE("pmf sums to one") {
  for (std::size_t n = 2; n <= 14; ++n) {
    DShapParams d = make_dshap(n);
    double total = 0.0;
    for (std::size_t k = 1; k < n; ++k) total += binomial(n, k) * dshap_pmf_slice(d, k);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    double slices = 0.0;
    for (std::size_t k = 1; k < n; ++k) slices += d.slice_prob(k);
    CHECK(slices == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("sampler never emits constants and matches slice frequencies") {
  DShapParams d = make_dshap(5);
  Rng rng(77);
  std::vector<std::size_t> slice_counts(6, 0);
  const std::size_t draws = 200000;
  for (std::size_t t = 0; t < draws; ++t) {
    std::vector<int> x = dshap_sample(d, rng);
    std::size_t k = 0;
    for (int xi : x) k += xi > 0;
    REQUIRE(k >= 1);
    REQUIRE(k <= 4);
    ++slice_counts[k];
  }
  for (std::size_t k = 1; k < 5; ++k) {
    const double expect = d.slice_prob(k) * draws;
    const double sd = std::sqrt(expect * (1.0 - d.slice_prob(k)));
    CHECK(std::fabs(double(slice_counts[k]) - expect) <= 3.5 * sd);
  }
}

TEST_CASE("sampler chi-square against the pmf") {
  const std::size_t n = 4;
  DShapParams d = make_dshap(n);
  Rng rng(1007);
  std::map<std::size_t, std::size_t> counts;
  const std::size_t draws = 200000;
  for (std::size_t t = 0; t < draws; ++t) {
    std::vector<int> x = dshap_sample(d, rng);
    std::size_t mask = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (x[i] > 0) mask |= std::size_t{1} << i;
    ++counts[mask];
  }
  double chi2 = 0.0;
  int cells = 0;
  for (std::size_t m = 1; m + 1 < (std::size_t{1} << n); ++m) {
    const std::size_t k = std::size_t(__builtin_popcountll(m));
    const double expect = double(draws) * dshap_pmf_slice(d, k);
    const double obs = counts.count(m) ? double(counts[m]) : 0.0;
    chi2 += (obs - expect) * (obs - expect) / expect;
    ++cells;
  }
  CHECK(chi_square_sf(chi2, cells - 1) > 0.001);
}

TEST_CASE("chi-square survival function sanity") {
  CHECK(chi_square_sf(0.0, 5) == doctest::Approx(1.0));
  // median of chi2 with k dof is about k(1 - 2/(9k))^3
  CHECK(chi_square_sf(4.35, 5) == doctest::Approx(0.5).epsilon(0.01));
  CHECK(chi_square_sf(100.0, 5) < 1e-10);
}

TEST_CASE("basis orthonormality under direct enumeration") {
  for (std::size_t n : {std::size_t{3}, std::size_t{5}, std::size_t{8}}) {
    DShapParams d = make_dshap(n);
    ShapleyBasis b = shapley_basis(d);
    CHECK(b.sum_coeff < 0.0);
    CHECK(b.coord_coeff > 0.0);
    std::vector<std::vector<double>> gram(n + 1, std::vector<double>(n + 1, 0.0));
    for (std::uint64_t m = 1; m + 1 < (std::uint64_t{1} << n); ++m) {
      const std::size_t k = std::size_t(__builtin_popcountll(m));
      const double pr = dshap_pmf_slice(d, k);
      const double cs = 2.0 * double(k) - double(n);
      for (std::size_t i = 0; i <= n; ++i) {
        const double li = b.evaluate(i, cs, i == 0 ? 1 : ((m >> (i - 1)) & 1 ? 1 : -1));
        for (std::size_t j = i; j <= n; ++j) {
          const double lj = b.evaluate(j, cs, j == 0 ? 1 : ((m >> (j - 1)) & 1 ? 1 : -1));
          gram[i][j] += pr * li * lj;
        }
      }
    }
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = i; j <= n; ++j)
        CHECK(gram[i][j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
  }
}

TEST_CASE("shapley indices via correlations match the permutation definition") {
  Rng rng(79);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 2 + rng.below(9);
    WeightedLTF f = suite::random_monotone_ltf(rng, n);
    IndexVector a = shapley_exact(f);
    IndexVector b = shapley_from_correlations(f);
    for (std::size_t i = 1; i <= n; ++i)
      CHECK(a.value(i) == doctest::Approx(b.value(i)).epsilon(1e-10));
  }
}

TEST_CASE("coordinate correlation: pmf sum and monte carlo agree") {
  WeightedLTF dict({1, 0, 0}, 0.5);
  const double exact = coordinate_correlation_shap(dict, 1);
  Rng rng(84);
  DShapParams d = make_dshap(3);
  double mc = 0.0;
  const std::size_t draws = 400000;
  for (std::size_t t = 0; t < draws; ++t) {
    std::vector<int> x = dshap_sample(d, rng);
    mc += dict.evaluate(x) * x[0];
  }
  mc /= double(draws);
  CHECK(mc == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("symmetric games have equal coordinate correlations") {
  WeightedLTF maj({1, 1, 1, 1, 1}, 0);
  DShapMoments m = dshap_moments(maj);
  for (std::size_t i = 1; i < 5; ++i)
    CHECK(m.corr[i] == doctest::Approx(m.corr[0]).epsilon(1e-13));
}

TEST_CASE("fourier distance inequalities") {
  Rng rng(80);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 3 + rng.below(8);
    WeightedLTF f = suite::random_monotone_ltf(rng, n);
    WeightedLTF g = suite::random_monotone_ltf(rng, n);
    const double dsf = shapley_fourier_distance(f, g);
    const double pr = dshap_prob_disagree(f, g);
    CHECK(dsf <= 2.0 * std::sqrt(pr) + 1e-10);
    const double ds = d_shapley(f, g);
    const double h = 2.0 * harmonic(n - 1);
    CHECK(ds <= std::sqrt(h) * dsf + 4.0 / std::sqrt(double(n)) + 1e-10);
    CHECK(shapley_fourier_distance(f, f) == 0.0);
  }
}

TEST_CASE("truncated bias mixture approximates the distribution") {
  // TV bound at delta = n^-2
  for (std::size_t n = 4; n <= 8; ++n) {
    DShapParams d = make_dshap(n);
    const double delta = 1.0 / double(n * n);
    const double tv = tv_qdelta_dshap(n, delta);
    CHECK(tv <= 4.0 * double(n) * delta / d.lambda_n);
  }
  // mixture density integrates to 1
  for (std::size_t n : {std::size_t{4}, std::size_t{9}}) {
    DShapParams d = make_dshap(n);
    KDeltaParams k = make_kdelta(d, 1.0 / double(n * n));
    double mass = 0.0;
    const int steps = 200000;
    const double a = k.delta, b = 1.0 - k.delta;
    for (int i = 0; i < steps; ++i) {
      const double p0 = a + (b - a) * (i + 0.0) / steps;
      const double p1 = a + (b - a) * (i + 1.0) / steps;
      mass += 0.5 * (kdelta_density(k, p0) + kdelta_density(k, p1)) * (p1 - p0);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("qdelta expectation approximates the distribution mean") {
  Rng rng(81);
  for (int t = 0; t < 15; ++t) {
    const std::size_t n = 4 + rng.below(6);
    WeightedLTF f = suite::random_monotone_ltf(rng, n);
    const double delta = 1.0 / double(n * n);
    DShapMoments m = dshap_moments(f);
    DShapParams d = make_dshap(n);
    QDeltaOptions opts;
    const double q = qdelta_expectation(f, delta, &opts);
    CHECK_FALSE(opts.warned_delta_too_large);
    CHECK(std::fabs(q - m.mean) <= 8.0 * double(n) * delta / d.lambda_n);
  }
  // warn flag for delta too large
  WeightedLTF f = suite::random_monotone_ltf(rng, 6);
  QDeltaOptions opts;
  qdelta_expectation(f, 0.4, &opts);
  CHECK(opts.warned_delta_too_large);
  // constant -1 off the endpoints: the truncation loses only O(n delta / Lambda) mass
  WeightedLTF neg({1, 1, 1, 1}, 9);
  DShapParams d4 = make_dshap(4);
  const double q4 = qdelta_expectation(neg, 1.0 / 16.0);
  CHECK(std::fabs(q4 - (-1.0)) <= 8.0 * 4.0 * (1.0 / 16.0) / d4.lambda_n);
}

TEST_CASE("qdelta correlations approximate the shapley indices") {
  Rng rng(82);
  double worst_ratio = 0.0;
  for (int t = 0; t < 12; ++t) {
    const std::size_t n = 4 + rng.below(7);
    WeightedLTF f = suite::random_monotone_ltf(rng, n);
    const double delta = 1.0 / double(n * n);
    IndexVector approx = qdelta_correlations(f, delta);
    IndexVector exact = shapley_exact(f);
    for (std::size_t i = 1; i <= n; ++i) {
      const double err = std::fabs(approx.value(i) - exact.value(i));
      worst_ratio = std::max(worst_ratio, err / (double(n) * delta));
    }
  }
  // empirical constant in the O(n delta) bound, frozen with slack
  CHECK(worst_ratio <= 8.0);
}

TEST_CASE("anti-concentration trend: more medium weights, less mass near zero") {
  // eta-restricted linear forms with k weights >= r; the probability of
  // |l(x)| < r should fall as k grows
  const std::size_t n = 14;
  const double r = 1.0;
  auto prob_small = [&](std::size_t k) {
    std::vector<double> w(n, 0.45);  // below r
    for (std::size_t i = 0; i < k; ++i) w[i] = 1.0;
    WeightedLTF f(w, 0.0);
    DShapParams d = make_dshap(n);
    std::vector<double> sums(std::size_t{1} << n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t half = std::size_t{1} << j;
      for (std::size_t m = 0; m < half; ++m) sums[m + half] = sums[m] + w[j];
    }
    const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
    double pr = 0.0;
    for (std::size_t m = 1; m + 1 < sums.size(); ++m) {
      const double lin = 2.0 * sums[m] - wsum;  // theta = 0
      if (std::fabs(lin) < r)
        pr += dshap_pmf_slice(d, std::size_t(__builtin_popcountll(m)));
    }
    return pr;
  };
  const double p4 = prob_small(4), p8 = prob_small(8), p12 = prob_small(12);
  CHECK(p8 <= p4 + 1e-12);
  CHECK(p12 <= p8 + 1e-12);
}

TEST_CASE("closeness from pointwise-close linear forms") {
  // |l - l'| <= eps pointwise and Pr[|l| <= eps] <= delta imply the signs
  // disagree with probability at most delta
  Rng rng(83);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 4 + rng.below(7);
    WeightedLTF f = suite::random_monotone_ltf(rng, n);
    const double eps = rng.uniform(0.01, 0.4);
    // perturb each weight by at most eps / (n + 1), threshold too
    WeightedLTF g = f;
    double moved = 0.0;
    for (double& w : g.weights) {
      const double dw = rng.uniform(-eps / double(n + 1), eps / double(n + 1));
      w = std::max(0.0, w + dw);
      moved += std::fabs(dw);
    }
    DShapParams d = make_dshap(n);
    // exact Pr[|l| <= eps] and disagreement probability
    std::vector<double> sums(std::size_t{1} << n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t half = std::size_t{1} << j;
      for (std::size_t m = 0; m < half; ++m) sums[m + half] = sums[m] + f.weights[j];
    }
    const double wsum = f.weight_sum();
    double small = 0.0;
    for (std::size_t m = 1; m + 1 < sums.size(); ++m) {
      const double lin = 2.0 * sums[m] - wsum - f.threshold;
      if (std::fabs(lin) <= eps)
        small += dshap_pmf_slice(d, std::size_t(__builtin_popcountll(m)));
    }
    const double disagree = dshap_prob_disagree(f, g);
    CHECK(disagree <= small + 1e-12);
  }
}
