#include "powidx/ltf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace powidx {

WeightedLTF::WeightedLTF(std::vector<double> w, double theta)
    : weights(std::move(w)), threshold(theta) {
  if (weights.empty()) throw std::invalid_argument("WeightedLTF: need n >= 1");
  for (double wi : weights)
    if (!std::isfinite(wi)) throw std::invalid_argument("WeightedLTF: non-finite weight");
  if (!std::isfinite(threshold)) throw std::invalid_argument("WeightedLTF: non-finite threshold");
}

bool WeightedLTF::is_monotone() const {
  return std::all_of(weights.begin(), weights.end(), [](double w) { return w >= 0.0; });
}

double WeightedLTF::weight_sum() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

double WeightedLTF::weight_l1() const {
  double s = 0.0;
  for (double w : weights) s += std::fabs(w);
  return s;
}

double WeightedLTF::weight_l2() const {
  double s = 0.0;
  for (double w : weights) s += w * w;
  return std::sqrt(s);
}

int WeightedLTF::evaluate(const std::vector<int>& x) const {
  if (x.size() != weights.size())
    throw std::invalid_argument("evaluate: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 1 && x[i] != -1)
      throw std::invalid_argument("evaluate: inputs must be +/-1");
    s += x[i] > 0 ? weights[i] : -weights[i];
  }
  return s - threshold >= 0.0 ? 1 : -1;
}

int WeightedLTF::evaluate_mask(std::uint64_t mask) const {
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    s += (mask >> i) & 1 ? weights[i] : -weights[i];
  return s - threshold >= 0.0 ? 1 : -1;
}

int WeightedLTF::evaluate_real(const std::vector<double>& x) const {
  if (x.size() != weights.size())
    throw std::invalid_argument("evaluate_real: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += weights[i] * x[i];
  return s - threshold >= 0.0 ? 1 : -1;
}

GameSpec::GameSpec(std::vector<double> v, double q) : raw_weights(std::move(v)), quota(q) {
  if (raw_weights.empty()) throw std::invalid_argument("GameSpec: need n >= 1");
  double sum = 0.0;
  for (double w : raw_weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("GameSpec: weights must be nonnegative and finite");
    sum += w;
  }
  if (!(quota > 0.0) || quota > sum)
    throw std::invalid_argument("GameSpec: need 0 < quota <= sum(weights)");
}

WeightedLTF from_game(const GameSpec& g) {
  double sum = std::accumulate(g.raw_weights.begin(), g.raw_weights.end(), 0.0);
  return WeightedLTF(g.raw_weights, 2.0 * g.quota - sum);
}

SortResult sort_by_magnitude(const WeightedLTF& f) {
  std::vector<std::size_t> perm(f.n());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(f.weights[a]) > std::fabs(f.weights[b]);
  });
  std::vector<double> w(f.n());
  for (std::size_t i = 0; i < f.n(); ++i) w[i] = f.weights[perm[i]];
  return SortResult{WeightedLTF(std::move(w), f.threshold), std::move(perm)};
}

double regularity(const std::vector<double>& w) {
  double linf = 0.0, l2sq = 0.0;
  for (double wi : w) {
    linf = std::max(linf, std::fabs(wi));
    l2sq += wi * wi;
  }
  if (l2sq == 0.0) throw std::invalid_argument("regularity: zero weight vector");
  return linf / std::sqrt(l2sq);
}

CriticalIndexReport critical_index(const std::vector<double>& w, double tau) {
  if (w.empty()) throw std::invalid_argument("critical_index: empty weights");
  if (!(tau > 0.0) || tau > 1.0) throw std::invalid_argument("critical_index: tau in (0,1]");
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (std::fabs(w[i]) < std::fabs(w[i + 1]))
      throw std::invalid_argument("critical_index: weights not sorted by magnitude");

  const std::size_t n = w.size();
  CriticalIndexReport rep;
  rep.tau = tau;
  rep.tail_norms.resize(n);
  double acc = 0.0;
  for (std::size_t i = n; i > 0; --i) {
    acc += w[i - 1] * w[i - 1];
    rep.tail_norms[i - 1] = std::sqrt(acc);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(w[i]) <= tau * rep.tail_norms[i]) {
      rep.critical_index = i + 1;
      break;
    }
  }
  return rep;
}

bool is_eta_restricted(const WeightedLTF& f, double eta) {
  if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("is_eta_restricted: eta in (0,1]");
  return std::fabs(f.threshold) <= (1.0 - eta) * f.weight_l1();
}

WeightedLTF normalize_max_weight(const WeightedLTF& f) {
  double mx = 0.0;
  for (double w : f.weights) mx = std::max(mx, std::fabs(w));
  if (mx == 0.0) throw std::invalid_argument("normalize_max_weight: zero weight vector");
  std::vector<double> w(f.n());
  for (std::size_t i = 0; i < f.n(); ++i) w[i] = f.weights[i] / mx;
  return WeightedLTF(std::move(w), f.threshold / mx);
}

DiscretizeResult discretize(const WeightedLTF& f, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("discretize: gamma must be positive");
  double mx = 0.0;
  for (double w : f.weights) mx = std::max(mx, std::fabs(w));
  if (std::fabs(mx - 1.0) > kGridRelTol)
    throw std::invalid_argument("discretize: rescale so the largest weight magnitude is 1");

  auto round_to = [gamma](double v) { return std::round(v / gamma) * gamma; };
  DiscretizeResult out;
  std::vector<double> w(f.n());
  bool any_survives = false;
  for (std::size_t i = 0; i < f.n(); ++i) {
    w[i] = round_to(f.weights[i]);
    if (w[i] != 0.0) any_survives = true;
  }
  out.granularity_warning = !any_survives || gamma > 1.0 + kGridRelTol;
  out.ltf = WeightedLTF(std::move(w), round_to(f.threshold));
  const double l1 = out.ltf.weight_l1();
  out.eta_headroom = l1 > 0.0 ? 1.0 - std::fabs(out.ltf.threshold) / l1 : 0.0;
  return out;
}

}  // namespace powidx
