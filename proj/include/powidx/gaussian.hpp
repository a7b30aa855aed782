#pragma once

// Gaussian surrogates for threshold functions and the p-biased moment maps.
//
//   sign_expectation(t)     = E[sign(X - t)], X ~ N(0,1)   (decreasing, onto [-1,1])
//   degree1_mass(nu)        = squared degree-1 Hermite coefficient of the
//                             one-dimensional threshold function with mean nu
//   proportionality_scale(t)= sqrt(degree1_mass(sign_expectation(t))) = 2*pdf(t)
//
// All tail quantities are computed through erfc and hard-clamped at |t| = 40.

#include <cstddef>
#include <utility>
#include <vector>

#include "powidx/rng.hpp"

namespace powidx::gauss {

inline constexpr double kThetaClamp = 40.0;

double normal_pdf(double x);
double normal_cdf(double x);

double sign_expectation(double theta);
// unique theta with sign_expectation(theta) = nu, |nu| < 1; clamped at +/-40
double sign_expectation_inverse(double nu);
double degree1_mass(double nu);            // in [0, 2/pi], zero at +/-1
double proportionality_scale(double theta);  // 2 * normal_pdf(theta)

// p-biased coordinate moments: mean = 2p-1, sd = 2*sqrt(p(1-p))
struct Bias {
  double p;
  double mean;
  double sd;
  explicit Bias(double p_);
  double standardize(double x) const { return (x - mean) / sd; }
};

// psi for a linear form: (x - mean_p * weight_sum) / (sd_p * weight_l2)
double standardized_threshold(double x, double weight_sum, double weight_l2, const Bias& b);

// E over p-biased head assignments rho of
// proportionality_scale(psi_[tail](theta - w_head . rho)).
// Depends on the tail only through its l1 and l2 norms.
double head_averaged_scale(double theta, const std::vector<double>& head_weights,
                           double tail_l1, double tail_l2, const Bias& b);
// Monte-Carlo variant for heads too large to enumerate.
double head_averaged_scale_mc(double theta, const std::vector<double>& head_weights,
                              double tail_l1, double tail_l2, const Bias& b,
                              std::size_t budget, Rng& rng);

struct IntervalBound {
  double gaussian_prob;  // Phi((b-mu)/sigma) - Phi((a-mu)/sigma)
  double error_bound;    // 4 * regularity(w) / sd_p
};

// Gaussian surrogate for Pr_{x ~ u_p^n}[w.x in [a,b]] with the Berry-Esseen
// style error bound for tau-regular w.
IntervalBound pbiased_cdf_gaussian_bound(const std::vector<double>& w, double p,
                                         double a, double b);

// Exact Pr_{x ~ u_p^n}[w.x in [a,b]] by enumeration (n <= 26 or so).
double exact_pbiased_interval_prob(const std::vector<double>& w, double p,
                                   double a, double b);

}  // namespace powidx::gauss
