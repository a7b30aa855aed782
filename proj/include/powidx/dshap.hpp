#pragma once

// The Shapley distribution on {-1,1}^n minus the two constant strings,
// its degree-1 orthonormal basis, the truncated-bias mixture machinery, and
// the identity tying permutation-Shapley indices to coordinate correlations.

#include <cstddef>
#include <vector>

#include "powidx/ltf.hpp"
#include "powidx/power_indices.hpp"
#include "powidx/rng.hpp"

namespace powidx {

struct DShapParams {
  std::size_t n = 0;
  double lambda_n = 0.0;            // 2 * H_{n-1}
  std::vector<double> slice_probs;  // k = 1..n-1, (1/k + 1/(n-k)) / lambda_n

  double slice_prob(std::size_t k) const;  // 0 for k = 0 and k = n
};

DShapParams make_dshap(std::size_t n);

double harmonic(std::size_t n);

// pmf of a single string with k ones
double dshap_pmf_slice(const DShapParams& d, std::size_t k);
double dshap_pmf(const DShapParams& d, const std::vector<int>& x);

// two-stage sampler matching the pmf; never emits a constant string
std::vector<int> dshap_sample(const DShapParams& d, Rng& rng);

// L_0 = 1, L_i(x) = sum_coeff * (sum_j x_j) + coord_coeff * x_i,
// orthonormal under the Shapley distribution.
struct ShapleyBasis {
  std::size_t n = 0;
  double sum_coeff = 0.0;    // negative
  double coord_coeff = 0.0;  // positive
  double evaluate(std::size_t i, double coord_sum, int xi) const {
    return i == 0 ? 1.0 : sum_coeff * coord_sum + coord_coeff * xi;
  }
};

// Coefficients solved from the exact first/second moments of the
// distribution (see make_dshap); picks the positive-definite whitening root.
ShapleyBasis shapley_basis(const DShapParams& d);

// Everything the degree-1 analysis needs from one 2^n pass.
struct DShapMoments {
  double mean = 0.0;                // E[f]
  double sum_corr = 0.0;            // E[f * sum_j x_j]
  std::vector<double> corr;         // f*(i) = E[f x_i], i = 1..n
};

DShapMoments dshap_moments(const WeightedLTF& f, std::size_t cap = 16);

double coordinate_correlation_shap(const WeightedLTF& f, std::size_t i,
                                   std::size_t cap = 16);

// Shapley Fourier coefficients f^(0..n) under the basis above.
std::vector<double> shapley_fourier(const WeightedLTF& f, std::size_t cap = 16);
double shapley_fourier_distance(const WeightedLTF& f, const WeightedLTF& g,
                                std::size_t cap = 16);

// Pr_{x ~ D_Shap}[f(x) != g(x)], exact.
double dshap_prob_disagree(const WeightedLTF& f, const WeightedLTF& g,
                           std::size_t cap = 16);

// Shapley indices reconstructed from coordinate correlations:
// (f(1^n) - f((-1)^n)) / n + (lambda_n / 2) (f*(i) - avg_j f*(j)).
IndexVector shapley_from_correlations(const WeightedLTF& f, std::size_t cap = 16);

struct KDeltaParams {
  double delta = 0.0;
  double c_delta = 0.0;  // lambda_n / (2 ln(1/delta - 1))
  double lambda_n = 0.0;
};

KDeltaParams make_kdelta(const DShapParams& d, double delta);
double kdelta_density(const KDeltaParams& k, double p);

struct QDeltaOptions {
  double quad_tol = 1e-10;
  int max_depth = 40;
  bool warned_delta_too_large = false;  // set on output
};

// (1/C_delta) E_{Q(delta)}[f], with the two constant strings' contribution
// removed (the comparison with the Shapley distribution needs f to vanish there).
double qdelta_expectation(const WeightedLTF& f, double delta, QDeltaOptions* opts = nullptr);

// The mixture approximation of the Shapley indices:
// 2/n + (1/2) Int_delta^{1-delta} (1/p + 1/(1-p)) [f*(i,p) - avg_j f*(j,p)] dp.
IndexVector qdelta_correlations(const WeightedLTF& f, double delta,
                                QDeltaOptions* opts = nullptr);

// Total-variation distance between the truncated mixture (1/C_delta)Q(delta)
// and the Shapley distribution, summed over the non-constant strings.
double tv_qdelta_dshap(std::size_t n, double delta, double quad_tol = 1e-12);

// survival function of the chi-square distribution (regularized upper
// incomplete gamma); used by the sampler goodness-of-fit checks
double chi_square_sf(double chi2, std::size_t dof);

}  // namespace powidx
