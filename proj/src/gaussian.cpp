#include "powidx/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace powidx::gauss {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2*pi)
constexpr double kInvSqrt2 = 0.7071067811865475244;    // 1/sqrt(2)
}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double sign_expectation(double theta) {
  if (theta <= -kThetaClamp) return 1.0;
  if (theta >= kThetaClamp) return -1.0;
  // 2*(1 - Phi(theta)) - 1 simplifies to -erf(theta/sqrt(2))
  return -std::erf(theta * kInvSqrt2);
}

double sign_expectation_inverse(double nu) {
  if (!(std::fabs(nu) < 1.0))
    throw std::invalid_argument("sign_expectation_inverse: |nu| must be < 1");
  double lo = -kThetaClamp, hi = kThetaClamp;
  // sign_expectation is decreasing: value >= nu means theta <= target
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    if (sign_expectation(mid) >= nu)
      lo = mid;
    else
      hi = mid;
  }
  double theta = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {
    double d = -2.0 * normal_pdf(theta);
    if (d == 0.0) break;
    double step = (sign_expectation(theta) - nu) / d;
    double next = theta - step;
    if (std::fabs(next) > kThetaClamp) break;
    theta = next;
  }
  return theta;
}

double degree1_mass(double nu) {
  if (!(std::fabs(nu) <= 1.0)) throw std::invalid_argument("degree1_mass: nu in [-1,1]");
  if (std::fabs(nu) == 1.0) return 0.0;
  double t = sign_expectation_inverse(nu);
  double c = 2.0 * normal_pdf(t);
  return c * c;
}

double proportionality_scale(double theta) { return 2.0 * normal_pdf(theta); }

Bias::Bias(double p_) : p(p_) {
  if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("Bias: p in (0,1)");
  mean = 2.0 * p - 1.0;
  sd = 2.0 * std::sqrt(p * (1.0 - p));
}

double standardized_threshold(double x, double weight_sum, double weight_l2, const Bias& b) {
  if (!(weight_l2 > 0.0))
    throw std::invalid_argument("standardized_threshold: weight_l2 must be positive");
  return (x - b.mean * weight_sum) / (b.sd * weight_l2);
}

double head_averaged_scale(double theta, const std::vector<double>& head,
                           double tail_l1, double tail_l2, const Bias& b) {
  if (!(tail_l2 > 0.0)) throw std::invalid_argument("head_averaged_scale: empty tail");
  const std::size_t h = head.size();
  if (h > 20) throw std::invalid_argument("head_averaged_scale: head too large for exact mode");
  if (h == 0)
    return proportionality_scale(standardized_threshold(theta, tail_l1, tail_l2, b));

  // probabilities by popcount of the +1 pattern
  std::vector<double> pr(h + 1);
  for (std::size_t k = 0; k <= h; ++k)
    pr[k] = std::pow(b.p, double(k)) * std::pow(1.0 - b.p, double(h - k));

  double acc = 0.0;
  const std::uint64_t total = std::uint64_t{1} << h;
  for (std::uint64_t m = 0; m < total; ++m) {
    double dot = 0.0;
    for (std::size_t j = 0; j < h; ++j) dot += (m >> j) & 1 ? head[j] : -head[j];
    double psi = standardized_threshold(theta - dot, tail_l1, tail_l2, b);
    acc += pr[static_cast<std::size_t>(__builtin_popcountll(m))] * proportionality_scale(psi);
  }
  return acc;
}

double head_averaged_scale_mc(double theta, const std::vector<double>& head,
                              double tail_l1, double tail_l2, const Bias& b,
                              std::size_t budget, Rng& rng) {
  if (!(tail_l2 > 0.0)) throw std::invalid_argument("head_averaged_scale_mc: empty tail");
  if (budget == 0) throw std::invalid_argument("head_averaged_scale_mc: zero budget");
  double acc = 0.0;
  for (std::size_t s = 0; s < budget; ++s) {
    double dot = 0.0;
    for (double w : head) dot += rng.bernoulli(b.p) ? w : -w;
    acc += proportionality_scale(standardized_threshold(theta - dot, tail_l1, tail_l2, b));
  }
  return acc / static_cast<double>(budget);
}

IntervalBound pbiased_cdf_gaussian_bound(const std::vector<double>& w, double p,
                                         double a, double b) {
  Bias bias(p);
  double sum = 0.0, l2sq = 0.0, linf = 0.0;
  for (double wi : w) {
    sum += wi;
    l2sq += wi * wi;
    linf = std::max(linf, std::fabs(wi));
  }
  if (l2sq == 0.0) throw std::invalid_argument("pbiased_cdf_gaussian_bound: zero weights");
  double sigma = bias.sd * std::sqrt(l2sq);
  double mu = bias.mean * sum;
  IntervalBound out;
  out.error_bound = 4.0 * (linf / std::sqrt(l2sq)) / bias.sd;
  if (!(a < b)) {
    out.gaussian_prob = 0.0;
    return out;
  }
  double hi = std::isinf(b) ? 1.0 : normal_cdf((b - mu) / sigma);
  double lo = std::isinf(a) ? 0.0 : normal_cdf((a - mu) / sigma);
  out.gaussian_prob = std::max(0.0, hi - lo);
  return out;
}

double exact_pbiased_interval_prob(const std::vector<double>& w, double p,
                                   double a, double b) {
  const std::size_t n = w.size();
  if (n > 26) throw std::invalid_argument("exact_pbiased_interval_prob: n too large");
  Bias bias(p);
  std::vector<double> pr(n + 1);
  for (std::size_t k = 0; k <= n; ++k)
    pr[k] = std::pow(bias.p, double(k)) * std::pow(1.0 - bias.p, double(n - k));
  double acc = 0.0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t m = 0; m < total; ++m) {
    double dot = 0.0;
    for (std::size_t j = 0; j < n; ++j) dot += (m >> j) & 1 ? w[j] : -w[j];
    if (dot >= a && dot <= b)
      acc += pr[static_cast<std::size_t>(__builtin_popcountll(m))];
  }
  return acc;
}

}  // namespace powidx::gauss
