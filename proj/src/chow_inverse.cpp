#include "powidx/chow_inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "powidx/parallel.hpp"

namespace powidx {

std::vector<JuntaLTF> enumerate_junta_candidates(std::size_t h, int weight_bound,
                                                 bool signed_mode) {
  if (h > 6) throw std::invalid_argument("enumerate_junta_candidates: head too large");
  if (weight_bound < 0) throw std::invalid_argument("enumerate_junta_candidates: bad bound");

  std::vector<JuntaLTF> out;
  std::set<std::uint64_t> seen;

  const long b = weight_bound;
  const long theta_lo = -static_cast<long>(h) * b;
  const long theta_hi = static_cast<long>(h) * b + 1;

  std::vector<long> w(h, signed_mode ? -b : 0);
  auto truth_table = [&](double theta) {
    std::uint64_t bits = 0;
    const std::size_t total = std::size_t{1} << h;
    for (std::size_t m = 0; m < total; ++m) {
      double s = 0.0;
      for (std::size_t j = 0; j < h; ++j) s += (m >> j) & 1 ? double(w[j]) : -double(w[j]);
      if (s - theta >= 0.0) bits |= std::uint64_t{1} << m;
    }
    return bits;
  };

  bool more = true;
  while (more) {
    bool admissible = true;
    if (!signed_mode) {
      // nonincreasing weight vectors only
      for (std::size_t j = 0; j + 1 < h; ++j) admissible = admissible && w[j] >= w[j + 1];
    }
    if (admissible) {
      for (long t = theta_lo; t <= theta_hi; ++t) {
        const std::uint64_t tab = truth_table(double(t));
        if (seen.insert(tab).second) {
          JuntaLTF j;
          j.weights.assign(w.begin(), w.end());
          j.theta = double(t);
          out.push_back(std::move(j));
        }
      }
    }
    more = false;
    for (std::size_t j = h; j-- > 0;) {
      if (w[j] < b) {
        ++w[j];
        for (std::size_t u = j + 1; u < h; ++u) w[u] = signed_mode ? -b : 0;
        more = true;
        break;
      }
    }
    if (h == 0) break;  // the single empty weight vector covers both constants
  }
  return out;
}

HeadTailSplit split_head_tail(const PartialIndexVector& input, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("split_head_tail: tau must be > 0");
  // boundary values belong to the head; compare with the grid tolerance
  const double cut = tau * tau * (1.0 - kGridRelTol);
  HeadTailSplit out;
  for (const auto& [i, v] : input.entries) {
    if (i == 0) continue;  // the degree-0 slot is matched through the threshold
    if (std::fabs(v) >= cut)
      out.head_in_s.push_back(i);
    else
      out.tail_in_s.push_back(i);
  }
  return out;
}

bool build_structured_candidate(const PartialIndexVector& input,
                                const std::vector<std::size_t>& head,
                                const std::vector<double>& head_weights,
                                double theta_prime, double gamma_prime, std::size_t n,
                                WeightedLTF* out) {
  if (!(gamma_prime > 0.0))
    throw std::invalid_argument("build_structured_candidate: gamma_prime must be > 0");
  if (head.size() != head_weights.size())
    throw std::invalid_argument("build_structured_candidate: head size mismatch");

  std::vector<bool> in_head(n + 1, false);
  for (std::size_t i : head) in_head[i] = true;

  double tail_known_sq = 0.0;
  std::size_t tail_missing = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (in_head[i]) continue;
    if (input.has(i))
      tail_known_sq += input.at(i) * input.at(i);
    else
      ++tail_missing;
  }

  double r = 0.0;
  if (tail_missing > 0) {
    double radicand = (gamma_prime * gamma_prime - tail_known_sq) /
                      static_cast<double>(tail_missing);
    if (radicand < -1e-15) return false;  // this gamma' undershoots the known tail mass
    if (radicand < 0.0) radicand = 0.0;
    r = std::sqrt(radicand);
  }

  std::vector<double> w(n, 0.0);
  for (std::size_t t = 0; t < head.size(); ++t) w[head[t] - 1] = head_weights[t];
  for (std::size_t i = 1; i <= n; ++i) {
    if (in_head[i]) continue;
    w[i - 1] = (input.has(i) ? input.at(i) : r) / gamma_prime;
  }
  *out = WeightedLTF(std::move(w), theta_prime);
  return true;
}

namespace {

struct ChowGuess {
  std::vector<std::size_t> head;  // base indices from S first, pads after
};

std::vector<ChowGuess> make_chow_guesses(const PartialIndexVector& input, std::size_t n,
                                         const ChowReconConfig& cfg, double tau) {
  std::vector<std::pair<double, std::size_t>> ranked;  // (|value|, index), vars only
  std::set<std::size_t> in_s;
  for (const auto& [i, v] : input.entries) {
    if (i == 0) continue;
    ranked.emplace_back(std::fabs(v), i);
    in_s.insert(i);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::size_t> pads;
  for (std::size_t i = 1; i <= n; ++i)
    if (!in_s.count(i)) pads.push_back(i);

  std::vector<ChowGuess> out;
  std::set<std::vector<std::size_t>> seen;
  auto add = [&](std::vector<std::size_t> head) {
    std::vector<std::size_t> key = head;
    std::sort(key.begin(), key.end());
    if (seen.insert(key).second) out.push_back(ChowGuess{std::move(head)});
  };

  // threshold split: head = indices of S above the tau^2 cut, padded up to |H|
  HeadTailSplit split = split_head_tail(input, tau);
  if (split.head_in_s.size() <= cfg.head_cap) {
    // keep the head in ranked order for weight assignment
    std::vector<std::size_t> base;
    for (const auto& [mag, idx] : ranked) {
      (void)mag;
      if (std::find(split.head_in_s.begin(), split.head_in_s.end(), idx) !=
          split.head_in_s.end())
        base.push_back(idx);
    }
    for (std::size_t h = base.size(); h <= cfg.head_cap && h <= n; ++h) {
      if (h - base.size() > pads.size()) break;
      std::vector<std::size_t> head = base;
      for (std::size_t t = 0; t < h - base.size(); ++t) head.push_back(pads[t]);
      add(std::move(head));
    }
  }
  // fallback: top-h of S by magnitude (at practical tau the threshold split
  // can exceed the cap, unlike in the asymptotic parameter regime)
  for (std::size_t h = 0; h <= cfg.head_cap && h <= n; ++h) {
    std::vector<std::size_t> head;
    for (std::size_t t = 0; t < std::min(h, ranked.size()); ++t)
      head.push_back(ranked[t].second);
    for (std::size_t t = 0; head.size() < h && t < pads.size(); ++t) head.push_back(pads[t]);
    if (head.size() == h) add(std::move(head));
  }
  return out;
}

struct ChowVerifier {
  const PartialIndexVector& input;
  std::size_t n;
  const ChowReconConfig& cfg;
  Rng& rng;
  double est_budget_m = 1.0;

  // head-local Chow evaluation: a junta's coefficients vanish off the head
  double junta_distance(const std::vector<std::size_t>& head, const JuntaLTF& j) const {
    const std::size_t h = head.size();
    const std::size_t total = std::size_t{1} << h;
    std::vector<double> coeff(h + 1, 0.0);  // slot 0 then per head var
    for (std::size_t m = 0; m < total; ++m) {
      double s = 0.0;
      for (std::size_t t = 0; t < h; ++t)
        s += (m >> t) & 1 ? j.weights[t] : -j.weights[t];
      const double fx = s - j.theta >= 0.0 ? 1.0 : -1.0;
      coeff[0] += fx;
      for (std::size_t t = 0; t < h; ++t) coeff[t + 1] += (m >> t) & 1 ? fx : -fx;
    }
    for (double& c : coeff) c /= static_cast<double>(total);

    double d2 = 0.0;
    for (const auto& [i, v] : input.entries) {
      double gi = 0.0;
      if (i == 0) {
        gi = coeff[0];
      } else {
        auto it = std::find(head.begin(), head.end(), i);
        if (it != head.end()) gi = coeff[1 + std::size_t(it - head.begin())];
      }
      d2 += (v - gi) * (v - gi);
    }
    return std::sqrt(d2);
  }

  double distance(const WeightedLTF& g) {
    if (cfg.verify == VerifyMode::Exact) {
      IndexVector cg = chow_exact(g, cfg.chow_cap);
      return partial_distance(input, cg);
    }
    std::set<std::size_t> s;
    for (const auto& [i, v] : input.entries) {
      (void)v;
      s.insert(i);
    }
    const double delta_each = cfg.delta / std::max(1.0, est_budget_m);
    PartialIndexVector est = chow_estimate(make_oracle(g), n, s, cfg.eps,
                                           std::min(0.5, delta_each), rng);
    double d2 = 0.0;
    for (const auto& [i, v] : input.entries) d2 += (v - est.at(i)) * (v - est.at(i));
    return std::sqrt(d2);
  }
};

}  // namespace

ReconstructionResult reconstruct_partial_chow(const PartialIndexVector& input,
                                              std::size_t n, const ChowReconConfig& cfg,
                                              Rng& rng) {
  if (input.kind != IndexKind::Chow)
    throw std::invalid_argument("reconstruct_partial_chow: input kind must be chow");
  if (n < 1) throw std::invalid_argument("reconstruct_partial_chow: n must be >= 1");
  PartialIndexVector in = input;
  in.n = n;
  in.validate();
  if (!(cfg.eps > 0.0) || !(cfg.delta > 0.0))
    throw std::invalid_argument("reconstruct_partial_chow: bad eps/delta");

  const double tau = cfg.tau > 0.0 ? cfg.tau : cfg.eps * cfg.eps / 4.0;
  const double accept = cfg.accept_factor * cfg.eps;
  const double gstep = cfg.gamma_prime_step > 0.0 ? cfg.gamma_prime_step
                                                  : std::max(tau, 0.125);

  std::vector<ChowGuess> guesses = make_chow_guesses(in, n, cfg, tau);

  ChowVerifier verifier{in, n, cfg, rng, 1.0};
  if (cfg.verify == VerifyMode::Sampled) {
    double m = 0.0;
    for (const ChowGuess& g : guesses) {
      m += 2e4;
      const double hsteps = cfg.head_weight_max / std::max(0.25, cfg.head_grid_step) + 1.0;
      m += std::pow(hsteps, double(g.head.size())) *
           (2.0 * cfg.theta_max / cfg.theta_step + 1.0) * (1.0 / gstep + 1.0);
    }
    verifier.est_budget_m = m;
  }

  ReconstructionResult best;
  best.achieved_distance = std::numeric_limits<double>::infinity();
  std::uint64_t tried = 0;

  auto finish = [&](bool certified) {
    best.certified = certified;
    best.candidates_tried = tried;
    if (cfg.verify == VerifyMode::Sampled && n <= cfg.chow_cap &&
        !best.ltf.weights.empty()) {
      IndexVector cg = chow_exact(best.ltf, cfg.chow_cap);
      best.achieved_distance = partial_distance(in, cg);
    }
    return best;
  };

  auto consider_junta = [&](const ChowGuess& guess, const JuntaLTF& j) -> bool {
    double d;
    if (cfg.verify == VerifyMode::Exact) {
      d = verifier.junta_distance(guess.head, j);
    } else {
      std::vector<double> w(n, 0.0);
      for (std::size_t t = 0; t < guess.head.size(); ++t)
        w[guess.head[t] - 1] = j.weights[t];
      d = verifier.distance(WeightedLTF(std::move(w), j.theta));
    }
    ++tried;
    if (d < best.achieved_distance) {
      std::vector<double> w(n, 0.0);
      for (std::size_t t = 0; t < guess.head.size(); ++t)
        w[guess.head[t] - 1] = j.weights[t];
      best.ltf = WeightedLTF(std::move(w), j.theta);
      best.achieved_distance = d;
      best.provenance = "junta";
      best.head_size_guess = guess.head.size();
    }
    return d <= accept;
  };

  // Phase A: junta candidates over every head guess, small heads first
  // (guesses are already ordered by increasing |H| within each family).
  for (const ChowGuess& guess : guesses) {
    const std::size_t h = guess.head.size();
    if (h > cfg.head_cap) continue;
    const bool full = h <= cfg.full_junta_head_limit;
    std::vector<JuntaLTF> juntas =
        enumerate_junta_candidates(h, cfg.junta_weight_bound, full);
    for (const JuntaLTF& j : juntas) {
      if (tried >= cfg.max_candidates) return finish(false);
      if (consider_junta(guess, j)) return finish(true);
    }
  }

  // Phase B: structured candidates (the rescaled-tail shape), evaluated in
  // fixed-size batches whose layout is independent of the thread count.
  const double head_step_default = std::max(std::sqrt(tau), 0.25);
  for (const ChowGuess& guess : guesses) {
    const std::size_t h = guess.head.size();
    if (h > cfg.structured_head_limit) continue;
    if (h == n) continue;  // no tail left

    const double hstep = cfg.head_grid_step > 0.0
                             ? cfg.head_grid_step
                             : std::max(head_step_default / std::max<std::size_t>(1, h),
                                        0.25);
    const long hsteps = static_cast<long>(std::floor(cfg.head_weight_max / hstep + 1e-9));
    const long gsteps = static_cast<long>(std::floor(1.0 / gstep + 1e-9));
    const long tsteps = static_cast<long>(std::floor(cfg.theta_max / cfg.theta_step + 1e-9));

    struct Cell {
      std::vector<double> head_w;
      double theta, gamma_prime;
    };
    std::vector<Cell> cells;
    for (long gi = 1; gi <= gsteps + 1; ++gi) {
      const double gamma_prime = gi > gsteps ? 1.0 : double(gi) * gstep;
      if (gi > gsteps && gsteps * gstep >= 1.0 - 1e-12) break;  // 1 already on the grid
      std::vector<long> assign(h, 0);
      bool more = true;
      while (more) {
        Cell base;
        base.gamma_prime = gamma_prime;
        base.head_w.resize(h);
        for (std::size_t t = 0; t < h; ++t) base.head_w[t] = double(assign[t]) * hstep;
        for (long ti = -tsteps; ti <= tsteps; ++ti) {
          base.theta = double(ti) * cfg.theta_step;
          cells.push_back(base);
        }
        more = false;
        for (std::size_t t = h; t-- > 0;) {
          if (assign[t] < hsteps) {
            ++assign[t];
            for (std::size_t u = t + 1; u < h; ++u) assign[u] = 0;
            more = true;
            break;
          }
        }
        if (h == 0) break;
      }
    }

    struct CellResult {
      bool built = false;
      double distance = 0.0;
      WeightedLTF g;
    };
    const std::size_t batch = 1024;
    std::vector<CellResult> results;
    for (std::size_t begin = 0; begin < cells.size(); begin += batch) {
      const std::size_t end = std::min(begin + batch, cells.size());
      if (tried >= cfg.max_candidates) return finish(false);
      results.assign(end - begin, CellResult{});
      if (cfg.verify == VerifyMode::Exact) {
        parallel_chunks(end - begin, 16, [&](std::size_t, std::size_t lo, std::size_t hi) {
          for (std::size_t t = lo; t < hi; ++t) {
            const Cell& c = cells[begin + t];
            WeightedLTF g;
            if (!build_structured_candidate(in, guess.head, c.head_w, c.theta,
                                            c.gamma_prime, n, &g))
              continue;
            results[t].built = true;
            IndexVector cg = chow_exact(g, cfg.chow_cap);
            results[t].distance = partial_distance(in, cg);
            results[t].g = std::move(g);
          }
        });
      } else {
        for (std::size_t t = 0; t < end - begin; ++t) {
          const Cell& c = cells[begin + t];
          WeightedLTF g;
          if (!build_structured_candidate(in, guess.head, c.head_w, c.theta,
                                          c.gamma_prime, n, &g))
            continue;
          results[t].built = true;
          results[t].distance = verifier.distance(g);
          results[t].g = std::move(g);
        }
      }
      for (std::size_t t = 0; t < end - begin; ++t) {
        if (!results[t].built) continue;
        ++tried;
        if (results[t].distance < best.achieved_distance) {
          best.ltf = results[t].g;
          best.achieved_distance = results[t].distance;
          best.provenance = "structured";
          best.head_size_guess = h;
        }
        if (results[t].distance <= accept) return finish(true);
      }
    }
  }

  return finish(false);
}

VerifyOutcome verify_candidates(const std::vector<WeightedLTF>& candidates,
                                const PartialIndexVector& input, double eps,
                                double delta, VerifyMode mode, Rng& rng,
                                double accept_factor) {
  if (candidates.empty())
    throw std::invalid_argument("verify_candidates: empty candidate list");
  const bool shapley = input.kind == IndexKind::Shapley;
  std::set<std::size_t> s;
  for (const auto& [i, v] : input.entries) {
    (void)v;
    s.insert(i);
  }
  const double accept = accept_factor * eps;
  const double delta_each =
      std::min(0.5, delta / (double(candidates.size()) * std::max<double>(1, s.size())));

  VerifyOutcome out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const WeightedLTF& g = candidates[c];
    double d = 0.0;
    if (mode == VerifyMode::Exact) {
      IndexVector v = shapley ? shapley_exact(g) : chow_exact(g);
      d = partial_distance(input, v);
    } else if (shapley) {
      IndexVector est = shapley_estimate(make_oracle(g), g.n(), eps, delta_each, rng);
      d = partial_distance(input, est);
    } else {
      PartialIndexVector est = chow_estimate(make_oracle(g), g.n(), s, eps, delta_each, rng);
      double d2 = 0.0;
      for (const auto& [i, v] : input.entries) d2 += (v - est.at(i)) * (v - est.at(i));
      d = std::sqrt(d2);
    }
    ++out.tried;
    if (d < best) {
      best = d;
      out.chosen = c;
      out.distance = d;
    }
    if (d <= accept) {
      out.chosen = c;
      out.distance = d;
      out.certified = true;
      return out;
    }
  }
  return out;
}

std::string chow_paper_parameter_table(double eps) {
  std::ostringstream os;
  const double log10_tau = 1000.0 * std::log10(eps);
  os << "paper-scale parameters (printed, not run)\n";
  os << "  eps = " << eps << "\n";
  os << "  tau = eps^1000; log10(tau) = " << log10_tau << "\n";
  os << "  head bound |H| <= 1/tau^4; log10 = " << -4.0 * log10_tau << "\n";
  os << "  head grid step sqrt(tau)/|H|, magnitude cap 2^O(|H| log |H|) sqrt(ln(1/tau))\n";
  os << "  gamma' grid: integer multiples of tau in (0,1], plus 1\n";
  os << "  candidate count 2^O(tau^-8 log^2(1/tau))\n";
  return os.str();
}

}  // namespace powidx
