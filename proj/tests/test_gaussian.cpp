#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "powidx/gaussian.hpp"
#include "powidx/ltf.hpp"
#include "powidx/power_indices.hpp"
#include "powidx/quadrature.hpp"
#include "powidx/rng.hpp"

using namespace powidx;
using namespace powidx::gauss;

TEST_CASE("sign expectation endpoints and symmetry") {
  CHECK(sign_expectation(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(sign_expectation(-100.0) == 1.0);
  CHECK(sign_expectation(100.0) == -1.0);
  // 2(1 - Phi(1)) - 1
  CHECK(sign_expectation(1.0) == doctest::Approx(-0.6826894921370859).epsilon(1e-12));
}

TEST_CASE("sign expectation inverse round trips") {
  CHECK(sign_expectation_inverse(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  for (double theta = -5.0; theta <= 5.0; theta += 0.25) {
    const double nu = sign_expectation(theta);
    CHECK(sign_expectation_inverse(nu) == doctest::Approx(theta).epsilon(1e-10));
    CHECK(sign_expectation(sign_expectation_inverse(nu)) ==
          doctest::Approx(nu).epsilon(1e-12));
  }
  // near-degenerate values clamp without overflow
  CHECK(std::fabs(sign_expectation_inverse(1.0 - 1e-15)) <= kThetaClamp);
  CHECK(std::fabs(sign_expectation_inverse(-1.0 + 1e-15)) <= kThetaClamp);
  CHECK_THROWS(sign_expectation_inverse(1.0));
}

TEST_CASE("degree-1 mass") {
  CHECK(degree1_mass(0.0) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-12));
  CHECK(degree1_mass(1.0) == 0.0);
  CHECK(degree1_mass(-1.0) == 0.0);
  for (double nu = -0.95; nu <= 0.95; nu += 0.05)
    CHECK(degree1_mass(nu) == doctest::Approx(degree1_mass(-nu)).epsilon(1e-10));
  // |W'| < 1 numerically
  for (double nu = -0.9; nu <= 0.9; nu += 0.05) {
    const double h = 1e-5;
    const double d = (degree1_mass(nu + h) - degree1_mass(nu - h)) / (2 * h);
    CHECK(std::fabs(d) < 1.0);
  }
}

TEST_CASE("proportionality scale equals twice the density") {
  CHECK(proportionality_scale(0.0) ==
        doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-12));
  for (double theta = -4.0; theta <= 4.0; theta += 0.25) {
    CHECK(std::sqrt(degree1_mass(sign_expectation(theta))) ==
          doctest::Approx(proportionality_scale(theta)).epsilon(1e-10));
  }
  CHECK(proportionality_scale(60.0) <= 1e-100);
}

TEST_CASE("bias moments") {
  Bias half(0.5);
  CHECK(half.mean == 0.0);
  CHECK(half.sd == 1.0);
  Bias b(0.75);
  CHECK(b.mean == doctest::Approx(0.5));
  CHECK(b.sd == doctest::Approx(2.0 * std::sqrt(0.1875)));
  CHECK_THROWS(Bias(0.0));
  CHECK_THROWS(Bias(1.0));
}

TEST_CASE("psi scaling property") {
  Rng rng(21);
  for (int t = 0; t < 50; ++t) {
    const double p = rng.uniform(0.1, 0.9);
    Bias b(p);
    const double l1 = rng.uniform(0.5, 5.0);
    const double l2 = rng.uniform(0.3, 2.0);
    const double x = rng.uniform(-4.0, 4.0);
    const double c = b.sd * l2;
    // psi_[w](x) = psi_[w / (sd l2)](x / (sd l2))
    CHECK(standardized_threshold(x, l1, l2, b) ==
          doctest::Approx(standardized_threshold(x / c, l1 / c, l2 / c, b)).epsilon(1e-12));
  }
}

TEST_CASE("head averaged scale") {
  Bias b(0.5);
  // no head: plain proportionality at the standardized threshold
  CHECK(head_averaged_scale(0.7, {}, 3.0, 1.0, b) ==
        doctest::Approx(proportionality_scale(standardized_threshold(0.7, 3.0, 1.0, b))));
  // one symmetric head coordinate at p = 1/2 averages the two offsets
  const double got = head_averaged_scale(0.0, {1.0}, 2.0, 1.0, b);
  const double want = 0.5 * (proportionality_scale(standardized_threshold(-1.0, 2.0, 1.0, b)) +
                             proportionality_scale(standardized_threshold(1.0, 2.0, 1.0, b)));
  CHECK(got == doctest::Approx(want).epsilon(1e-12));
  CHECK_THROWS(head_averaged_scale(0.0, {1.0}, 1.0, 0.0, b));
}

TEST_CASE("head averaged scale depends on the tail only through its norms") {
  Rng rng(22);
  for (int t = 0; t < 20; ++t) {
    const double p = rng.uniform(0.2, 0.8);
    Bias b(p);
    std::vector<double> head = {rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)};
    const double l1 = rng.uniform(1.0, 4.0), l2 = rng.uniform(0.5, 1.5);
    const double theta = rng.uniform(-2.0, 2.0);
    // the API takes norms, so sameness is structural; check the MC variant
    // converges to the exact value
    const double exact = head_averaged_scale(theta, head, l1, l2, b);
    Rng mc(55 + t);
    const double approx = head_averaged_scale_mc(theta, head, l1, l2, b, 40000, mc);
    CHECK(approx == doctest::Approx(exact).epsilon(0.05));
  }
}

TEST_CASE("gaussian interval surrogate with error bound") {
  // tau-regular weights at n = 16 stay within 4 tau / sd_p of the Gaussian
  Rng rng(23);
  std::vector<double> w(16);
  double l2 = 0.0;
  for (double& wi : w) {
    wi = 1.0 + 0.2 * rng.uniform01();
    l2 += wi * wi;
  }
  l2 = std::sqrt(l2);
  for (double& wi : w) wi /= l2;
  for (double p : {0.2, 0.5, 0.8}) {
    for (int t = 0; t < 8; ++t) {
      Bias b(p);
      const double mu = b.mean * std::accumulate(w.begin(), w.end(), 0.0);
      const double a = mu - rng.uniform(0.0, 2.0) * b.sd;
      const double bb = mu + rng.uniform(0.0, 2.0) * b.sd;
      auto res = pbiased_cdf_gaussian_bound(w, p, a, bb);
      const double exact = exact_pbiased_interval_prob(w, p, a, bb);
      CHECK(std::fabs(exact - res.gaussian_prob) <= res.error_bound);
    }
  }
  // anti-concentration form: Pr[|w.x - theta| <= lambda] <= 2 lambda/(sd ||w||) + 2 tau/sd
  const double tau = regularity(w);
  for (double p : {0.3, 0.5, 0.7}) {
    Bias b(p);
    for (int t = 0; t < 8; ++t) {
      const double theta = rng.uniform(-1.0, 1.0);
      const double lambda = rng.uniform(0.01, 0.5);
      const double exact = exact_pbiased_interval_prob(w, p, theta - lambda, theta + lambda);
      CHECK(exact <= 2.0 * lambda / b.sd + 2.0 * tau / b.sd + 1e-12);
    }
  }
  // degenerate interval
  auto deg = pbiased_cdf_gaussian_bound(w, 0.5, 1.0, 1.0);
  CHECK(deg.gaussian_prob == 0.0);
}

TEST_CASE("gaussian surrogates for regular games at n = 16") {
  // The three approximation laws with empirical constants measured on a
  // calibration run (0.18, 0.05, 0.011) and frozen at twice that slack.
  Rng rng(4321);
  const std::size_t n = 16;
  for (int t = 0; t < 6; ++t) {
    std::vector<double> w(n);
    double l2 = 0.0;
    for (double& wi : w) {
      wi = 1.0 + 0.6 * rng.uniform01();
      l2 += wi * wi;
    }
    l2 = std::sqrt(l2);
    for (double& wi : w) wi /= l2;
    const double tau = powidx::regularity(w);
    double wsum = 0.0;
    for (double wi : w) wsum += wi;
    for (double p : {0.25, 0.5, 0.75}) {
      Bias b(p);
      for (double theta : {-0.6, 0.0, 0.7}) {
        powidx::WeightedLTF f(w, theta);
        const double psi = standardized_threshold(theta, wsum, 1.0, b);

        // mean: E_{u_p}[f] tracks the one-dimensional surrogate
        auto pos = powidx::slice_positive_counts(f);
        const double mean = powidx::pbiased_mean_from_slices(pos, n, p);
        CHECK(std::fabs(mean - sign_expectation(psi)) <= 0.35 * tau / b.sd);

        // magnitude: E|w.x - theta| tracks the folded-Gaussian surrogate
        double emag = 0.0;
        std::vector<double> pr(n + 1);
        for (std::size_t k = 0; k <= n; ++k)
          pr[k] = std::pow(p, double(k)) * std::pow(1.0 - p, double(n - k));
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) s += (m >> i) & 1 ? w[i] : -w[i];
          emag += pr[std::size_t(__builtin_popcountll(m))] * std::fabs(s - theta);
        }
        const double mag_surrogate =
            b.sd * (2.0 * normal_pdf(psi) - psi * sign_expectation(psi));
        CHECK(std::fabs(emag - mag_surrogate) <= 0.1 * tau);

        // proportionality: degree-1 coefficients track scale * weights
        powidx::IndexVector ch = powidx::chow_pbiased_exact(f, p);
        const double scale = proportionality_scale(psi);
        double resid = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = ch.values[i + 1] - scale * w[i];
          resid += d * d;
        }
        CHECK(resid <= 0.021 * std::sqrt(tau / (b.sd * b.sd)));
      }
    }
  }
}

TEST_CASE("quadrature reaches the requested tolerance") {
  auto r = quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi,
                           1e-12);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));

  // endpoint-steep integrand of the truncated bias mixture
  auto s = quad::integrate([](double p) { return 1.0 / p + 1.0 / (1.0 - p); }, 1e-4,
                           1.0 - 1e-4, 1e-10);
  CHECK(s.converged);
  CHECK(s.value == doctest::Approx(2.0 * std::log(1.0 / 1e-4 - 1.0)).epsilon(1e-12));
}
