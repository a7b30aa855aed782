#include "powidx/dshap.hpp"

#include <cmath>
#include <stdexcept>

#include "powidx/quadrature.hpp"

namespace powidx {

double harmonic(std::size_t n) {
  double h = 0.0;
  for (std::size_t k = 1; k <= n; ++k) h += 1.0 / static_cast<double>(k);
  return h;
}

DShapParams make_dshap(std::size_t n) {
  if (n < 2) throw std::invalid_argument("make_dshap: n must be >= 2");
  DShapParams d;
  d.n = n;
  d.lambda_n = 2.0 * harmonic(n - 1);
  d.slice_probs.resize(n - 1);
  for (std::size_t k = 1; k < n; ++k)
    d.slice_probs[k - 1] =
        (1.0 / static_cast<double>(k) + 1.0 / static_cast<double>(n - k)) / d.lambda_n;
  return d;
}

double DShapParams::slice_prob(std::size_t k) const {
  if (k == 0 || k >= n) return 0.0;
  return slice_probs[k - 1];
}

double dshap_pmf_slice(const DShapParams& d, std::size_t k) {
  if (k == 0 || k >= d.n) return 0.0;
  return d.slice_prob(k) / binomial(d.n, k);
}

double dshap_pmf(const DShapParams& d, const std::vector<int>& x) {
  if (x.size() != d.n) throw std::invalid_argument("dshap_pmf: dimension mismatch");
  std::size_t k = 0;
  for (int xi : x) {
    if (xi != 1 && xi != -1) throw std::invalid_argument("dshap_pmf: entries must be +/-1");
    k += xi > 0;
  }
  return dshap_pmf_slice(d, k);
}

std::vector<int> dshap_sample(const DShapParams& d, Rng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  std::size_t k = d.n - 1;
  for (std::size_t j = 1; j < d.n; ++j) {
    acc += d.slice_prob(j);
    if (u < acc) {
      k = j;
      break;
    }
  }
  // uniform k-subset via partial Fisher-Yates
  std::vector<std::size_t> idx(d.n);
  for (std::size_t i = 0; i < d.n; ++i) idx[i] = i;
  std::vector<int> x(d.n, -1);
  for (std::size_t t = 0; t < k; ++t) {
    std::size_t j = t + static_cast<std::size_t>(rng.below(d.n - t));
    std::swap(idx[t], idx[j]);
    x[idx[t]] = 1;
  }
  return x;
}

ShapleyBasis shapley_basis(const DShapParams& d) {
  const double n = static_cast<double>(d.n);
  double m2 = 0.0;  // E[(sum_j x_j)^2]
  for (std::size_t k = 1; k < d.n; ++k) {
    const double s = 2.0 * static_cast<double>(k) - n;
    m2 += d.slice_prob(k) * s * s;
  }
  const double rho = (m2 - n) / (n * (n - 1.0));  // E[x_i x_j], i != j
  ShapleyBasis b;
  b.n = d.n;
  b.coord_coeff = 1.0 / std::sqrt(1.0 - rho);
  // 1 + (n-1) rho = m2 / n is the eigenvalue of the coordinate Gram matrix on
  // (1,..,1); of the two orthonormalizing roots, the one with the negative
  // sum coefficient is taken (the other flips sign at small n)
  b.sum_coeff = (-1.0 / std::sqrt(m2 / n) - b.coord_coeff) / n;
  return b;
}

DShapMoments dshap_moments(const WeightedLTF& f, std::size_t cap) {
  const std::size_t n = f.n();
  if (n < 2) throw std::invalid_argument("dshap_moments: n must be >= 2");
  if (n > cap) throw std::invalid_argument("dshap_moments: n exceeds the enumeration cap");
  DShapParams d = make_dshap(n);
  const double accept_at = 0.5 * (f.threshold + f.weight_sum());

  // subset sums by doubling
  std::vector<double> sums(std::size_t{1} << n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t half = std::size_t{1} << j;
    for (std::size_t m = 0; m < half; ++m) sums[m + half] = sums[m] + f.weights[j];
  }

  DShapMoments out;
  out.corr.assign(n, 0.0);
  const std::size_t total = std::size_t{1} << n;
  for (std::size_t m = 1; m + 1 < total; ++m) {
    const std::size_t k = static_cast<std::size_t>(__builtin_popcountll(m));
    if (k == 0 || k == n) continue;
    const double pr = dshap_pmf_slice(d, k);
    const double fx = sums[m] >= accept_at ? 1.0 : -1.0;
    const double coord_sum = 2.0 * static_cast<double>(k) - static_cast<double>(n);
    out.mean += pr * fx;
    out.sum_corr += pr * fx * coord_sum;
    const double v = pr * fx;
    for (std::size_t i = 0; i < n; ++i) out.corr[i] += ((m >> i) & 1) ? v : -v;
  }
  return out;
}

double coordinate_correlation_shap(const WeightedLTF& f, std::size_t i, std::size_t cap) {
  if (i < 1 || i > f.n()) throw std::out_of_range("coordinate_correlation_shap: index");
  return dshap_moments(f, cap).corr[i - 1];
}

std::vector<double> shapley_fourier(const WeightedLTF& f, std::size_t cap) {
  DShapMoments m = dshap_moments(f, cap);
  ShapleyBasis b = shapley_basis(make_dshap(f.n()));
  std::vector<double> out(f.n() + 1);
  out[0] = m.mean;
  for (std::size_t i = 0; i < f.n(); ++i)
    out[i + 1] = b.sum_coeff * m.sum_corr + b.coord_coeff * m.corr[i];
  return out;
}

double shapley_fourier_distance(const WeightedLTF& f, const WeightedLTF& g, std::size_t cap) {
  if (f.n() != g.n()) throw std::invalid_argument("shapley_fourier_distance: mismatched n");
  std::vector<double> a = shapley_fourier(f, cap), b = shapley_fourier(g, cap);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double dshap_prob_disagree(const WeightedLTF& f, const WeightedLTF& g, std::size_t cap) {
  const std::size_t n = f.n();
  if (g.n() != n) throw std::invalid_argument("dshap_prob_disagree: mismatched n");
  if (n > cap) throw std::invalid_argument("dshap_prob_disagree: n exceeds the cap");
  DShapParams d = make_dshap(n);
  const double af = 0.5 * (f.threshold + f.weight_sum());
  const double ag = 0.5 * (g.threshold + g.weight_sum());
  std::vector<double> sf(std::size_t{1} << n, 0.0), sg(std::size_t{1} << n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t half = std::size_t{1} << j;
    for (std::size_t m = 0; m < half; ++m) {
      sf[m + half] = sf[m] + f.weights[j];
      sg[m + half] = sg[m] + g.weights[j];
    }
  }
  double pr = 0.0;
  const std::size_t total = std::size_t{1} << n;
  for (std::size_t m = 1; m + 1 < total; ++m) {
    const std::size_t k = static_cast<std::size_t>(__builtin_popcountll(m));
    if ((sf[m] >= af) != (sg[m] >= ag)) pr += dshap_pmf_slice(d, k);
  }
  return pr;
}

IndexVector shapley_from_correlations(const WeightedLTF& f, std::size_t cap) {
  const std::size_t n = f.n();
  DShapMoments m = dshap_moments(f, cap);
  DShapParams d = make_dshap(n);
  const int f_top = f.evaluate_mask((std::uint64_t{1} << n) - 1);
  const int f_bot = f.evaluate_mask(0);
  double avg = 0.0;
  for (double c : m.corr) avg += c;
  avg /= static_cast<double>(n);
  IndexVector out = IndexVector::zeros(IndexKind::Shapley, n);
  for (std::size_t i = 0; i < n; ++i)
    out.values[i] = static_cast<double>(f_top - f_bot) / static_cast<double>(n) +
                    0.5 * d.lambda_n * (m.corr[i] - avg);
  return out;
}

KDeltaParams make_kdelta(const DShapParams& d, double delta) {
  if (!(delta > 0.0) || !(delta < 0.5))
    throw std::invalid_argument("make_kdelta: delta in (0, 1/2)");
  KDeltaParams k;
  k.delta = delta;
  k.lambda_n = d.lambda_n;
  k.c_delta = d.lambda_n / (2.0 * std::log(1.0 / delta - 1.0));
  return k;
}

double kdelta_density(const KDeltaParams& k, double p) {
  if (p < k.delta || p > 1.0 - k.delta) return 0.0;
  return k.c_delta * (1.0 / p + 1.0 / (1.0 - p)) / k.lambda_n;
}

namespace {

bool delta_is_small_enough(std::size_t n, double delta) {
  // the mixture tracks the distribution only for delta below 1/n
  return delta < 1.0 / static_cast<double>(n);
}

}  // namespace

double qdelta_expectation(const WeightedLTF& f, double delta, QDeltaOptions* opts) {
  const std::size_t n = f.n();
  QDeltaOptions local;
  QDeltaOptions& o = opts ? *opts : local;
  if (!(delta > 0.0) || !(delta < 0.5))
    throw std::invalid_argument("qdelta_expectation: delta in (0, 1/2)");
  o.warned_delta_too_large = !delta_is_small_enough(n, delta);
  DShapParams d = make_dshap(n);
  std::vector<std::uint64_t> pos = slice_positive_counts(f);

  auto integrand = [&](double p) {
    // E_{u_p}[f] restricted to the non-constant slices
    double e = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
      const double pk = std::pow(p, double(k)) * std::pow(1.0 - p, double(n - k));
      e += pk * (2.0 * static_cast<double>(pos[k]) - binomial(n, k));
    }
    return (1.0 / p + 1.0 / (1.0 - p)) / d.lambda_n * e;
  };
  return quad::integrate_or_throw(integrand, delta, 1.0 - delta, o.quad_tol, o.max_depth);
}

IndexVector qdelta_correlations(const WeightedLTF& f, double delta, QDeltaOptions* opts) {
  const std::size_t n = f.n();
  QDeltaOptions local;
  QDeltaOptions& o = opts ? *opts : local;
  if (!(delta > 0.0) || !(delta < 0.5))
    throw std::invalid_argument("qdelta_correlations: delta in (0, 1/2)");
  o.warned_delta_too_large = !delta_is_small_enough(n, delta);

  std::vector<std::uint64_t> pos = slice_positive_counts(f);
  std::vector<std::vector<std::uint64_t>> per = slice_positive_counts_per_coord(f);

  // f*(i,p) = sum_k p^k (1-p)^(n-k) [4 A_{k,i} - 2 B_k - C(n-1,k-1) + C(n-1,k)]
  auto corr_at = [&](double p, std::vector<double>& corr) {
    for (std::size_t i = 0; i < n; ++i) corr[i] = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      const double pk = std::pow(p, double(k)) * std::pow(1.0 - p, double(n - k));
      const double base = -2.0 * static_cast<double>(pos[k]) -
                          (k > 0 ? binomial(n - 1, k - 1) : 0.0) + binomial(n - 1, k);
      for (std::size_t i = 0; i < n; ++i)
        corr[i] += pk * (4.0 * static_cast<double>(per[k][i]) + base);
    }
  };

  IndexVector out = IndexVector::zeros(IndexKind::Shapley, n);
  std::vector<double> corr(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto integrand = [&, i](double p) {
      corr_at(p, corr);
      double avg = 0.0;
      for (double c : corr) avg += c;
      avg /= static_cast<double>(n);
      return (1.0 / p + 1.0 / (1.0 - p)) * (corr[i] - avg);
    };
    const double integral =
        quad::integrate_or_throw(integrand, delta, 1.0 - delta, o.quad_tol, o.max_depth);
    out.values[i] = 2.0 / static_cast<double>(n) + 0.5 * integral;
  }
  return out;
}

double chi_square_sf(double chi2, std::size_t dof) {
  // regularized upper incomplete gamma Q(dof/2, chi2/2)
  const double a = 0.5 * static_cast<double>(dof);
  const double x = 0.5 * chi2;
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) {
    // P by series, Q = 1 - P
    double term = 1.0 / a, sum = term, ap = a;
    for (int k = 0; k < 500; ++k) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    const double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    return std::max(0.0, 1.0 - p);
  }
  // Q by Lentz continued fraction
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int k = 1; k <= 500; ++k) {
    const double an = -double(k) * (double(k) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double tv_qdelta_dshap(std::size_t n, double delta, double quad_tol) {
  DShapParams d = make_dshap(n);
  double tv = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    auto integrand = [&](double p) {
      return (1.0 / p + 1.0 / (1.0 - p)) / d.lambda_n *
             std::pow(p, double(k)) * std::pow(1.0 - p, double(n - k));
    };
    const double per_string =
        quad::integrate_or_throw(integrand, delta, 1.0 - delta, quad_tol, 48);
    tv += binomial(n, k) * std::fabs(per_string - dshap_pmf_slice(d, k));
  }
  return tv;
}

}  // namespace powidx
