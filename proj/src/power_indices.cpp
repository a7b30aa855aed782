#include "powidx/power_indices.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "powidx/kernels.hpp"
#include "powidx/parallel.hpp"

namespace powidx {

namespace {

constexpr unsigned kBlockBits = 14;  // low-coordinate block expanded in memory

struct BlockSplit {
  unsigned low_bits = 0;
  unsigned high_bits = 0;
  std::vector<double> low_sums;   // subset sums of the low weights, indexed by mask
  std::vector<double> high_sums;  // subset sums of the high weights
};

BlockSplit make_split(const std::vector<double>& w) {
  BlockSplit s;
  const unsigned n = static_cast<unsigned>(w.size());
  s.low_bits = std::min(n, kBlockBits);
  s.high_bits = n - s.low_bits;
  s.low_sums.assign(std::size_t{1} << s.low_bits, 0.0);
  for (unsigned j = 0; j < s.low_bits; ++j) {
    const std::size_t half = std::size_t{1} << j;
    kernels::shift(s.low_sums.data() + half, s.low_sums.data(), half, w[j]);
  }
  s.high_sums.assign(std::size_t{1} << s.high_bits, 0.0);
  for (unsigned j = 0; j < s.high_bits; ++j) {
    const std::size_t half = std::size_t{1} << j;
    kernels::shift(s.high_sums.data() + half, s.high_sums.data(), half, w[s.low_bits + j]);
  }
  return s;
}

void check_cap(std::size_t n, std::size_t cap, const char* what) {
  if (n == 0) throw std::invalid_argument(std::string(what) + ": n must be >= 1");
  if (n > cap) throw std::invalid_argument(std::string(what) + ": n exceeds the enumeration cap");
  if (n > 63) throw std::invalid_argument(std::string(what) + ": n too large");
}

std::vector<double> popcount_probs(unsigned bits, double p) {
  std::vector<double> pr(bits + 1);
  for (unsigned k = 0; k <= bits; ++k)
    pr[k] = std::pow(p, double(k)) * std::pow(1.0 - p, double(bits - k));
  return pr;
}

}  // namespace

const char* index_kind_name(IndexKind k) {
  switch (k) {
    case IndexKind::Chow: return "chow";
    case IndexKind::ChowP: return "chow_p";
    case IndexKind::Shapley: return "shapley";
    case IndexKind::CorrP: return "corr_p";
    case IndexKind::Hermite: return "hermite";
  }
  return "?";
}

IndexKind index_kind_from_name(const std::string& s) {
  if (s == "chow") return IndexKind::Chow;
  if (s == "chow_p") return IndexKind::ChowP;
  if (s == "shapley") return IndexKind::Shapley;
  if (s == "corr_p") return IndexKind::CorrP;
  if (s == "hermite") return IndexKind::Hermite;
  throw std::invalid_argument("unknown index kind: " + s);
}

double IndexVector::value(std::size_t i) const {
  if (has_slot0()) {
    if (i > n) throw std::out_of_range("IndexVector::value");
    return values[i];
  }
  if (i < 1 || i > n) throw std::out_of_range("IndexVector::value");
  return values[i - 1];
}

double& IndexVector::value_ref(std::size_t i) {
  if (has_slot0()) {
    if (i > n) throw std::out_of_range("IndexVector::value_ref");
    return values[i];
  }
  if (i < 1 || i > n) throw std::out_of_range("IndexVector::value_ref");
  return values[i - 1];
}

IndexVector IndexVector::zeros(IndexKind kind, std::size_t n) {
  IndexVector v;
  v.kind = kind;
  v.n = n;
  v.values.assign(kind == IndexKind::Shapley ? n : n + 1, 0.0);
  return v;
}

void PartialIndexVector::validate() const {
  std::size_t prev = 0;
  bool first = true;
  for (const auto& [i, val] : entries) {
    (void)val;
    if (i > n) throw std::invalid_argument("PartialIndexVector: index out of range");
    if (kind == IndexKind::Shapley && i == 0)
      throw std::invalid_argument("PartialIndexVector: Shapley vectors have no index 0");
    if (!first && i <= prev)
      throw std::invalid_argument("PartialIndexVector: indices must be sorted and distinct");
    prev = i;
    first = false;
  }
}

bool PartialIndexVector::has(std::size_t i) const {
  for (const auto& [j, v] : entries) {
    (void)v;
    if (j == i) return true;
  }
  return false;
}

double PartialIndexVector::at(std::size_t i) const {
  for (const auto& [j, v] : entries)
    if (j == i) return v;
  throw std::out_of_range("PartialIndexVector::at");
}

std::vector<std::size_t> PartialIndexVector::indices() const {
  std::vector<std::size_t> out;
  out.reserve(entries.size());
  for (const auto& [i, v] : entries) {
    (void)v;
    out.push_back(i);
  }
  return out;
}

PartialIndexVector mask_to_partial(const IndexVector& v, const std::set<std::size_t>& s) {
  PartialIndexVector out;
  out.kind = v.kind;
  out.n = v.n;
  for (std::size_t i : s) out.entries.emplace_back(i, v.value(i));
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Exact Chow parameters
// ---------------------------------------------------------------------------

IndexVector chow_exact(const WeightedLTF& f, std::size_t cap) {
  const std::size_t n = f.n();
  check_cap(n, cap, "chow_exact");
  BlockSplit sp = make_split(f.weights);
  const std::size_t block = std::size_t{1} << sp.low_bits;
  const std::size_t nhigh = std::size_t{1} << sp.high_bits;
  const double accept_at = 0.5 * (f.threshold + f.weight_sum());

  struct Acc {
    std::int64_t total = 0;
    std::vector<std::int64_t> ones;  // sum of f over {x : x_i = +1}, per variable
  };
  Acc zero;
  zero.ones.assign(n, 0);

  Acc acc = parallel_reduce<Acc>(
      nhigh, 64, zero,
      [&](std::size_t mb, std::size_t me) {
        Acc a;
        a.ones.assign(n, 0);
        for (std::size_t m = mb; m < me; ++m) {
          const double thr = accept_at - sp.high_sums[m];
          const std::int64_t c_tot =
              static_cast<std::int64_t>(kernels::count_ge(sp.low_sums.data(), block, thr));
          const std::int64_t blk_total = 2 * c_tot - static_cast<std::int64_t>(block);
          a.total += blk_total;
          for (unsigned i = 0; i < sp.low_bits; ++i) {
            const std::int64_t c_i = static_cast<std::int64_t>(
                kernels::count_ge_masked(sp.low_sums.data(), block, i, thr));
            a.ones[i] += 2 * c_i - static_cast<std::int64_t>(block / 2);
          }
          for (unsigned j = 0; j < sp.high_bits; ++j)
            if ((m >> j) & 1) a.ones[sp.low_bits + j] += blk_total;
        }
        return a;
      },
      [&](Acc x, const Acc& y) {
        x.total += y.total;
        for (std::size_t i = 0; i < n; ++i) x.ones[i] += y.ones[i];
        return x;
      });

  const double scale = std::ldexp(1.0, -static_cast<int>(n));  // 2^-n
  IndexVector out = IndexVector::zeros(IndexKind::Chow, n);
  out.values[0] = static_cast<double>(acc.total) * scale;
  for (std::size_t i = 0; i < n; ++i)
    out.values[i + 1] = static_cast<double>(2 * acc.ones[i] - acc.total) * scale;
  return out;
}

// ---------------------------------------------------------------------------
// p-biased coefficients
// ---------------------------------------------------------------------------

namespace {

struct PBiasedRaw {
  double total = 0.0;               // E[f]
  std::vector<double> ones;         // E[f * 1{x_i = +1}] ... times 2 gives E[f | split]
};

PBiasedRaw pbiased_raw(const WeightedLTF& f, double p, std::size_t cap, const char* what) {
  const std::size_t n = f.n();
  check_cap(n, cap, what);
  if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument(std::string(what) + ": p in (0,1)");
  BlockSplit sp = make_split(f.weights);
  const std::size_t block = std::size_t{1} << sp.low_bits;
  const std::size_t nhigh = std::size_t{1} << sp.high_bits;
  const double accept_at = 0.5 * (f.threshold + f.weight_sum());

  std::vector<double> low_pr_by_pc = popcount_probs(sp.low_bits, p);
  std::vector<double> high_pr_by_pc = popcount_probs(sp.high_bits, p);
  std::vector<double> low_pr(block);
  for (std::size_t m = 0; m < block; ++m)
    low_pr[m] = low_pr_by_pc[static_cast<std::size_t>(__builtin_popcountll(m))];

  PBiasedRaw zero;
  zero.ones.assign(n, 0.0);
  PBiasedRaw acc = parallel_reduce<PBiasedRaw>(
      nhigh, 64, zero,
      [&](std::size_t mb, std::size_t me) {
        PBiasedRaw a;
        a.ones.assign(n, 0.0);
        for (std::size_t m = mb; m < me; ++m) {
          const double thr = accept_at - sp.high_sums[m];
          const double pr_hi = high_pr_by_pc[static_cast<std::size_t>(__builtin_popcountll(m))];
          const double blk_total =
              kernels::signed_prob_sum(sp.low_sums.data(), low_pr.data(), block, thr);
          a.total += pr_hi * blk_total;
          for (unsigned i = 0; i < sp.low_bits; ++i)
            a.ones[i] += pr_hi * kernels::signed_prob_sum_masked(sp.low_sums.data(),
                                                                 low_pr.data(), block, i, thr);
          for (unsigned j = 0; j < sp.high_bits; ++j)
            if ((m >> j) & 1) a.ones[sp.low_bits + j] += pr_hi * blk_total;
        }
        return a;
      },
      [&](PBiasedRaw x, const PBiasedRaw& y) {
        x.total += y.total;
        for (std::size_t i = 0; i < x.ones.size(); ++i) x.ones[i] += y.ones[i];
        return x;
      });
  return acc;
}

}  // namespace

IndexVector chow_pbiased_exact(const WeightedLTF& f, double p, std::size_t cap) {
  PBiasedRaw raw = pbiased_raw(f, p, cap, "chow_pbiased_exact");
  const double mu = 2.0 * p - 1.0;
  const double sd = 2.0 * std::sqrt(p * (1.0 - p));
  const double psi_pos = (1.0 - mu) / sd;
  const double psi_neg = (-1.0 - mu) / sd;
  IndexVector out = IndexVector::zeros(IndexKind::ChowP, f.n());
  out.p = p;
  out.values[0] = raw.total;
  for (std::size_t i = 0; i < f.n(); ++i)
    out.values[i + 1] = psi_pos * raw.ones[i] + psi_neg * (raw.total - raw.ones[i]);
  return out;
}

IndexVector coordinate_correlation_pbiased(const WeightedLTF& f, double p, std::size_t cap) {
  PBiasedRaw raw = pbiased_raw(f, p, cap, "coordinate_correlation_pbiased");
  IndexVector out = IndexVector::zeros(IndexKind::CorrP, f.n());
  out.p = p;
  out.values[0] = raw.total;
  for (std::size_t i = 0; i < f.n(); ++i)
    out.values[i + 1] = 2.0 * raw.ones[i] - raw.total;
  return out;
}

// ---------------------------------------------------------------------------
// Exact Shapley indices
// ---------------------------------------------------------------------------

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t j = 1; j <= k; ++j) r = r * double(n - k + j) / double(j);
  return r;
}

IndexVector shapley_exact(const WeightedLTF& f, std::size_t cap) {
  const std::size_t n = f.n();
  check_cap(n, cap, "shapley_exact");
  if (!f.is_monotone())
    throw std::invalid_argument("shapley_exact: weights must be nonnegative");
  const double accept_at = 0.5 * (f.threshold + f.weight_sum());

  IndexVector out = IndexVector::zeros(IndexKind::Shapley, n);
  std::vector<double> inv_binom(n);  // 1 / C(n-1, k)
  for (std::size_t k = 0; k < n; ++k) inv_binom[k] = 1.0 / binomial(n - 1, k);

  parallel_chunks(n, n, [&](std::size_t, std::size_t ib, std::size_t ie) {
    // per-size subset sums over the other n-1 weights
    std::vector<std::vector<double>> by_size(n);
    std::vector<std::size_t> len(n);
    for (std::size_t i = ib; i < ie; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        by_size[k].resize(static_cast<std::size_t>(binomial(n - 1, k)));
        len[k] = 0;
      }
      by_size[0][0] = 0.0;
      len[0] = 1;
      std::size_t placed = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        for (std::size_t k = placed + 1; k-- > 0;) {
          kernels::shift(by_size[k + 1].data() + len[k + 1], by_size[k].data(), len[k],
                         f.weights[j]);
          len[k + 1] += len[k];
        }
        ++placed;
      }
      const double lo = accept_at - f.weights[i];
      double v = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = kernels::count_in_range(by_size[k].data(), len[k], lo, accept_at);
        v += static_cast<double>(piv) * inv_binom[k];
      }
      out.values[i] = 2.0 * v / static_cast<double>(n);
    }
  });
  return out;
}

IndexVector shapley_exact_integer(const std::vector<std::int64_t>& weights, double threshold) {
  const std::size_t n = weights.size();
  if (n == 0 || n > 64) throw std::invalid_argument("shapley_exact_integer: need 1 <= n <= 64");
  std::int64_t wsum = 0;
  for (std::int64_t w : weights) {
    if (w < 0) throw std::invalid_argument("shapley_exact_integer: weights must be >= 0");
    wsum += w;
  }
  const double accept_at = 0.5 * (threshold + static_cast<double>(wsum));
  const std::size_t cols = static_cast<std::size_t>(wsum) + 1;

  // full table: count[k][s] = # subsets of all n items with size k, sum s
  std::vector<std::vector<std::uint64_t>> count(n + 1,
                                                std::vector<std::uint64_t>(cols, 0));
  count[0][0] = 1;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t w = static_cast<std::size_t>(weights[j]);
    for (std::size_t k = std::min(j + 1, n); k-- > 0;)
      for (std::size_t s = cols; s-- > w + 0;)
        if (count[k][s - w]) count[k + 1][s] += count[k][s - w];
  }

  IndexVector out = IndexVector::zeros(IndexKind::Shapley, n);
  std::vector<std::vector<std::uint64_t>> without(n, std::vector<std::uint64_t>(cols, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t wi = static_cast<std::size_t>(weights[i]);
    // peel item i off the full table
    without[0] = count[0];
    for (std::size_t k = 1; k < n; ++k) {
      for (std::size_t s = 0; s < cols; ++s) {
        std::uint64_t sub = (s >= wi) ? without[k - 1][s - wi] : 0;
        without[k][s] = count[k][s] - sub;
      }
    }
    double v = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      std::uint64_t piv = 0;
      for (std::size_t s = 0; s < cols; ++s) {
        if (!without[k][s]) continue;
        const double sd = static_cast<double>(s);
        if (sd < accept_at && sd + static_cast<double>(wi) >= accept_at) piv += without[k][s];
      }
      v += static_cast<double>(piv) / binomial(n - 1, k);
    }
    out.values[i] = 2.0 * v / static_cast<double>(n);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

Oracle make_oracle(const WeightedLTF& f) {
  return [f](const std::vector<int>& x) { return f.evaluate(x); };
}

std::size_t shapley_estimate_sample_count(std::size_t n, double gamma, double delta_fail) {
  return static_cast<std::size_t>(
      std::ceil(2.0 * double(n) / (gamma * gamma) * std::log(2.0 * double(n) / delta_fail)));
}

IndexVector shapley_estimate(const Oracle& f, std::size_t n, double gamma,
                             double delta_fail, Rng& rng) {
  if (n == 0) throw std::invalid_argument("shapley_estimate: n must be >= 1");
  if (!(gamma > 0.0) || gamma >= 1.0 || !(delta_fail > 0.0) || delta_fail >= 1.0)
    throw std::invalid_argument("shapley_estimate: gamma, delta_fail in (0,1)");
  const std::size_t m = shapley_estimate_sample_count(n, gamma, delta_fail);
  std::vector<double> sums(n, 0.0);
  std::vector<int> x(n, -1);
  for (std::size_t t = 0; t < m; ++t) {
    std::vector<std::size_t> order = rng.permutation(n);
    std::fill(x.begin(), x.end(), -1);
    int prev = f(x);
    for (std::size_t step = 0; step < n; ++step) {
      x[order[step]] = 1;
      int cur = f(x);
      sums[order[step]] += cur - prev;
      prev = cur;
    }
  }
  IndexVector out = IndexVector::zeros(IndexKind::Shapley, n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = sums[i] / static_cast<double>(m);
  return out;
}

std::size_t chow_estimate_sample_count(std::size_t s_size, double eps, double delta) {
  return static_cast<std::size_t>(std::ceil(2.0 * double(s_size) / (eps * eps) *
                                            std::log(2.0 * double(s_size) / delta)));
}

PartialIndexVector chow_estimate(const Oracle& f, std::size_t n,
                                 const std::set<std::size_t>& s, double eps,
                                 double delta, Rng& rng) {
  if (!(eps > 0.0) || !(delta > 0.0) || delta >= 1.0)
    throw std::invalid_argument("chow_estimate: bad eps/delta");
  PartialIndexVector out;
  out.kind = IndexKind::Chow;
  out.n = n;
  if (s.empty()) return out;
  const std::size_t N = chow_estimate_sample_count(s.size(), eps, delta);
  std::vector<std::size_t> idx(s.begin(), s.end());
  std::vector<double> sums(idx.size(), 0.0);
  std::vector<int> x(n);
  for (std::size_t t = 0; t < N; ++t) {
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.pm1();
    const int fx = f(x);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const int xi = idx[j] == 0 ? 1 : x[idx[j] - 1];
      sums[j] += fx * xi;
    }
  }
  for (std::size_t j = 0; j < idx.size(); ++j)
    out.entries.emplace_back(idx[j], sums[j] / static_cast<double>(N));
  out.validate();
  return out;
}

IndexVector hermite_degree1_estimate(const WeightedLTF& f, std::size_t samples, Rng& rng) {
  if (std::fabs(f.weight_l2() - 1.0) > 1e-6)
    throw std::invalid_argument("hermite_degree1_estimate: weights must have unit l2 norm");
  if (samples == 0) throw std::invalid_argument("hermite_degree1_estimate: zero samples");
  const std::size_t n = f.n();
  std::vector<double> x(n), sums(n, 0.0);
  double total = 0.0;
  for (std::size_t t = 0; t < samples; ++t) {
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.normal();
    const int fx = f.evaluate_real(x);
    total += fx;
    for (std::size_t i = 0; i < n; ++i) sums[i] += fx * x[i];
  }
  IndexVector out = IndexVector::zeros(IndexKind::Hermite, n);
  out.values[0] = total / static_cast<double>(samples);
  for (std::size_t i = 0; i < n; ++i)
    out.values[i + 1] = sums[i] / static_cast<double>(samples);
  return out;
}

// ---------------------------------------------------------------------------
// Distances
// ---------------------------------------------------------------------------

namespace {

void check_same_n(const WeightedLTF& f, const WeightedLTF& g) {
  if (f.n() != g.n()) throw std::invalid_argument("distance: mismatched n");
}

double l2_over(const std::vector<std::size_t>& idx, const IndexVector& a, const IndexVector& b) {
  double s = 0.0;
  for (std::size_t i : idx) {
    double d = a.value(i) - b.value(i);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

double d_hamming(const WeightedLTF& f, const WeightedLTF& g, std::size_t cap) {
  check_same_n(f, g);
  check_cap(f.n(), cap, "d_hamming");
  BlockSplit sf = make_split(f.weights);
  BlockSplit sg = make_split(g.weights);
  const std::size_t block = std::size_t{1} << sf.low_bits;
  const std::size_t nhigh = std::size_t{1} << sf.high_bits;
  const double af = 0.5 * (f.threshold + f.weight_sum());
  const double ag = 0.5 * (g.threshold + g.weight_sum());
  std::int64_t disagreements = parallel_reduce<std::int64_t>(
      nhigh, 64, 0,
      [&](std::size_t mb, std::size_t me) {
        std::int64_t c = 0;
        for (std::size_t m = mb; m < me; ++m) {
          const double tf = af - sf.high_sums[m];
          const double tg = ag - sg.high_sums[m];
          for (std::size_t x = 0; x < block; ++x)
            c += (sf.low_sums[x] >= tf) != (sg.low_sums[x] >= tg);
        }
        return c;
      },
      [](std::int64_t a, std::int64_t b) { return a + b; });
  return static_cast<double>(disagreements) * std::ldexp(1.0, -static_cast<int>(f.n()));
}

double d_chow(const WeightedLTF& f, const WeightedLTF& g, std::size_t cap) {
  check_same_n(f, g);
  IndexVector cf = chow_exact(f, cap), cg = chow_exact(g, cap);
  std::vector<std::size_t> idx(f.n());
  std::iota(idx.begin(), idx.end(), std::size_t{1});
  return l2_over(idx, cf, cg);
}

double d_chow_partial(const WeightedLTF& f, const WeightedLTF& g,
                      const std::set<std::size_t>& s, std::size_t cap) {
  check_same_n(f, g);
  if (s.empty()) return 0.0;
  IndexVector cf = chow_exact(f, cap), cg = chow_exact(g, cap);
  return l2_over(std::vector<std::size_t>(s.begin(), s.end()), cf, cg);
}

double d_shapley(const WeightedLTF& f, const WeightedLTF& g, std::size_t cap) {
  check_same_n(f, g);
  IndexVector sf = shapley_exact(f, cap), sg = shapley_exact(g, cap);
  std::vector<std::size_t> idx(f.n());
  std::iota(idx.begin(), idx.end(), std::size_t{1});
  return l2_over(idx, sf, sg);
}

double d_shapley_partial(const WeightedLTF& f, const WeightedLTF& g,
                         const std::set<std::size_t>& s, std::size_t cap) {
  check_same_n(f, g);
  if (s.empty()) return 0.0;
  IndexVector sf = shapley_exact(f, cap), sg = shapley_exact(g, cap);
  return l2_over(std::vector<std::size_t>(s.begin(), s.end()), sf, sg);
}

double partial_distance(const PartialIndexVector& input, const IndexVector& v) {
  double s = 0.0;
  for (const auto& [i, val] : input.entries) {
    double d = val - v.value(i);
    s += d * d;
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Slice tables
// ---------------------------------------------------------------------------

std::vector<std::uint64_t> slice_positive_counts(const WeightedLTF& f) {
  const std::size_t n = f.n();
  check_cap(n, 26, "slice_positive_counts");
  BlockSplit sp = make_split(f.weights);
  const std::size_t block = std::size_t{1} << sp.low_bits;
  const std::size_t nhigh = std::size_t{1} << sp.high_bits;
  const double accept_at = 0.5 * (f.threshold + f.weight_sum());
  std::vector<std::uint64_t> pos(n + 1, 0);
  for (std::size_t m = 0; m < nhigh; ++m) {
    const double thr = accept_at - sp.high_sums[m];
    const unsigned pc_hi = static_cast<unsigned>(__builtin_popcountll(m));
    for (std::size_t x = 0; x < block; ++x)
      if (sp.low_sums[x] >= thr)
        ++pos[pc_hi + static_cast<unsigned>(__builtin_popcountll(x))];
  }
  return pos;
}

std::vector<std::vector<std::uint64_t>> slice_positive_counts_per_coord(const WeightedLTF& f) {
  const std::size_t n = f.n();
  check_cap(n, 22, "slice_positive_counts_per_coord");
  BlockSplit sp = make_split(f.weights);
  const std::size_t block = std::size_t{1} << sp.low_bits;
  const std::size_t nhigh = std::size_t{1} << sp.high_bits;
  const double accept_at = 0.5 * (f.threshold + f.weight_sum());
  std::vector<std::vector<std::uint64_t>> a(n + 1, std::vector<std::uint64_t>(n, 0));
  for (std::size_t m = 0; m < nhigh; ++m) {
    const double thr = accept_at - sp.high_sums[m];
    const unsigned pc_hi = static_cast<unsigned>(__builtin_popcountll(m));
    for (std::size_t x = 0; x < block; ++x) {
      if (sp.low_sums[x] < thr) continue;
      const unsigned k = pc_hi + static_cast<unsigned>(__builtin_popcountll(x));
      for (unsigned i = 0; i < sp.low_bits; ++i)
        if ((x >> i) & 1) ++a[k][i];
      for (unsigned j = 0; j < sp.high_bits; ++j)
        if ((m >> j) & 1) ++a[k][sp.low_bits + j];
    }
  }
  return a;
}

double pbiased_mean_from_slices(const std::vector<std::uint64_t>& pos, std::size_t n, double p) {
  double e = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double pk = std::pow(p, double(k)) * std::pow(1.0 - p, double(n - k));
    e += pk * (2.0 * static_cast<double>(pos[k]) - binomial(n, k));
  }
  return e;
}

}  // namespace powidx
