#include "powidx/shapley_inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "powidx/chow_inverse.hpp"
#include "powidx/gaussian.hpp"
#include "powidx/parallel.hpp"
#include "powidx/quadrature.hpp"

namespace powidx {

AffineConstants affine_constants(const std::vector<double>& head, double tail_l1,
                                 double tail_l2, double theta, double delta,
                                 std::size_t n, double quad_tol) {
  if (!(tail_l2 > 0.0)) throw std::invalid_argument("affine_constants: tail_l2 must be > 0");
  if (!(delta > 0.0) || !(delta < 0.5))
    throw std::invalid_argument("affine_constants: delta in (0, 1/2)");
  if (n < 1) throw std::invalid_argument("affine_constants: n must be >= 1");

  // Rescale so the tail has unit l2 norm; the Shapley indices of an LTF are
  // invariant under that rescaling, and the integrand depends on the tail
  // only through its norms.
  const double s = tail_l2;
  std::vector<double> head_scaled(head.size());
  for (std::size_t i = 0; i < head.size(); ++i) head_scaled[i] = head[i] / s;
  const double l1_scaled = tail_l1 / s;
  const double theta_scaled = theta / s;

  auto integrand = [&](double p) {
    gauss::Bias b(p);
    const double scale =
        gauss::head_averaged_scale(theta_scaled, head_scaled, l1_scaled, 1.0, b);
    return b.sd * scale * (1.0 / p + 1.0 / (1.0 - p));
  };
  const double gamma_term =
      0.5 * quad::integrate_or_throw(integrand, delta, 1.0 - delta, quad_tol, 44);

  AffineConstants out;
  out.head = head;
  out.tail_l1 = tail_l1;
  out.tail_l2 = tail_l2;
  out.theta = theta;
  out.delta = delta;
  out.n = n;
  out.slope = gamma_term / s;
  out.intercept =
      2.0 / static_cast<double>(n) - gamma_term * l1_scaled / static_cast<double>(n);
  return out;
}

DiscretizeResult discretize_for_reconstruction(const WeightedLTF& f, double gamma) {
  return discretize(normalize_max_weight(f), gamma);
}

namespace {

struct HeadGuess {
  std::vector<std::size_t> head;  // 1-based indices, input-ranked first, pads after
  std::size_t ranked = 0;         // how many came from S
};

long grid_multiple(double v, double step, const char* what) {
  const double q = v / step;
  const double r = std::round(q);
  if (std::fabs(q - r) > 1e-6 * std::max(1.0, std::fabs(q)))
    throw std::invalid_argument(std::string("shapley reconstruction: ") + what +
                                " must sit on the weight grid");
  return static_cast<long>(r);
}

std::vector<HeadGuess> make_head_guesses(const PartialIndexVector& input, std::size_t n,
                                         std::size_t head_cap) {
  // rank input indices by value, largest first (monotonicity: larger Shapley
  // index means larger weight)
  std::vector<std::pair<double, std::size_t>> ranked;
  for (const auto& [i, v] : input.entries) ranked.emplace_back(v, i);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::set<std::size_t> in_s;
  for (const auto& [i, v] : input.entries) {
    (void)v;
    in_s.insert(i);
  }
  std::vector<std::size_t> pads;
  for (std::size_t i = 1; i <= n; ++i)
    if (!in_s.count(i)) pads.push_back(i);

  std::vector<HeadGuess> out;
  std::set<std::vector<std::size_t>> seen;
  const std::size_t hs_max = std::min(head_cap, ranked.size());
  for (std::size_t hs = 0; hs <= hs_max; ++hs) {
    for (std::size_t h = hs; h <= head_cap && h <= n; ++h) {
      if (h - hs > pads.size()) break;
      HeadGuess g;
      g.ranked = hs;
      for (std::size_t t = 0; t < hs; ++t) g.head.push_back(ranked[t].second);
      for (std::size_t t = 0; t < h - hs; ++t) g.head.push_back(pads[t]);
      std::vector<std::size_t> key = g.head;
      std::sort(key.begin(), key.end());
      if (seen.insert(key).second) out.push_back(std::move(g));
    }
  }
  return out;
}

std::vector<double> default_w1_grid(double gamma) {
  std::vector<double> g;
  for (int j = 4; j <= 24; j += 2) g.push_back(double(j) * gamma);  // 0.5 .. 3.0 at gamma=1/8
  return g;
}

std::vector<double> default_w2_grid(double gamma) {
  // squared norms on the gamma^2 grid, spanning sub-uniform to spread tails
  static const int kSquares[] = {4,  6,  8,  10, 12, 14, 16,  20,  24,  28, 32,
                                 36, 40, 48, 56, 64, 80, 96, 112, 128, 144};
  std::vector<double> g;
  for (int m : kSquares) g.push_back(gamma * std::sqrt(double(m)));
  return g;
}

struct Verifier {
  const PartialIndexVector& input;
  std::size_t n;
  const ShapReconConfig& cfg;
  Rng& rng;
  std::size_t est_budget_m = 0;  // sampled mode: total candidate estimate

  double distance(const WeightedLTF& g) {
    if (cfg.verify == VerifyMode::Exact) {
      IndexVector sg = shapley_exact(g, cfg.shapley_cap);
      return partial_distance(input, sg);
    }
    const double delta_each =
        cfg.delta_fail / std::max<double>(1.0, double(est_budget_m));
    IndexVector est = shapley_estimate(make_oracle(g), n, cfg.eps,
                                       std::min(0.5, delta_each), rng);
    return partial_distance(input, est);
  }
};

}  // namespace

ReconstructionResult reconstruct_partial_shapley(const PartialIndexVector& input,
                                                 std::size_t n, const ShapReconConfig& cfg,
                                                 Rng& rng) {
  if (input.kind != IndexKind::Shapley)
    throw std::invalid_argument("reconstruct_partial_shapley: input kind must be shapley");
  if (n < 2) throw std::invalid_argument("reconstruct_partial_shapley: n must be >= 2");
  PartialIndexVector in = input;
  in.n = n;
  in.validate();
  if (!(cfg.eps > 0.0) || !(cfg.delta_fail > 0.0))
    throw std::invalid_argument("reconstruct_partial_shapley: bad eps/delta");

  const double accept = cfg.accept_factor * cfg.eps;
  const std::vector<double> w1_grid =
      cfg.w1_grid.empty() ? default_w1_grid(cfg.gamma) : cfg.w1_grid;
  const std::vector<double> w2_grid =
      cfg.w2_grid.empty() ? default_w2_grid(cfg.gamma) : cfg.w2_grid;
  grid_multiple(cfg.head_grid_step, cfg.gamma, "head_grid_step");
  grid_multiple(cfg.theta_step, cfg.gamma, "theta_step");

  std::vector<HeadGuess> guesses = make_head_guesses(in, n, std::min(cfg.head_cap, n - 1));

  Verifier verifier{in, n, cfg, rng, 0};
  if (cfg.verify == VerifyMode::Sampled) {
    // union-bound budget: a safe overestimate of the number of candidates
    const double steps = cfg.head_weight_max / cfg.head_grid_step + 1.0;
    const double thetas = 2.0 * cfg.theta_max / cfg.theta_step + 1.0;
    double m = 0.0;
    for (const HeadGuess& g : guesses) {
      m += 4e3;  // junta allowance per guess
      m += std::pow(steps, double(g.head.size())) * thetas *
           double(w1_grid.size() * w2_grid.size());
    }
    verifier.est_budget_m = static_cast<std::size_t>(std::min(1e12, m));
  }
  ReconstructionResult best;
  best.achieved_distance = std::numeric_limits<double>::infinity();
  std::uint64_t tried = 0;

  auto consider = [&](const WeightedLTF& g, const char* provenance, const HeadGuess& guess,
                      double w1, double w2) -> bool {
    const double d = verifier.distance(g);
    ++tried;
    if (d < best.achieved_distance) {
      best.ltf = g;
      best.achieved_distance = d;
      best.provenance = provenance;
      best.head_size_guess = guess.head.size();
      best.w1 = w1;
      best.w2 = w2;
    }
    return d <= accept;
  };

  auto finish = [&](bool certified) {
    best.certified = certified;
    best.candidates_tried = tried;
    if (cfg.verify == VerifyMode::Sampled && n <= cfg.shapley_cap &&
        !best.ltf.weights.empty()) {
      IndexVector sg = shapley_exact(best.ltf, cfg.shapley_cap);
      best.achieved_distance = partial_distance(in, sg);
    }
    return best;
  };

  // Phase A: junta candidates, small heads first.
  for (const HeadGuess& guess : guesses) {
    const std::size_t h = guess.head.size();
    if (h > 6) continue;
    const bool sorted_only = h >= 3;
    std::vector<JuntaLTF> juntas =
        sorted_only ? enumerate_junta_candidates(h, cfg.junta_weight_bound, false)
                    : [&] {
                        auto all = enumerate_junta_candidates(h, cfg.junta_weight_bound, true);
                        std::vector<JuntaLTF> monotone;
                        for (auto& j : all) {
                          bool ok = true;
                          for (double w : j.weights) ok = ok && w >= 0.0;
                          if (ok) monotone.push_back(std::move(j));
                        }
                        return monotone;
                      }();
    for (const JuntaLTF& j : juntas) {
      if (tried >= cfg.max_candidates) return finish(false);
      std::vector<double> w(n, 0.0);
      for (std::size_t t = 0; t < h; ++t) w[guess.head[t] - 1] = j.weights[t];
      WeightedLTF g(std::move(w), j.theta);
      if (consider(g, "junta", guess, 0.0, 0.0)) return finish(true);
    }
  }

  // Phase B: structured candidates via affine constants + weight recovery.
  // Cells are enumerated up front per head guess and evaluated in fixed-size
  // batches; the batch layout does not depend on the thread count, and the
  // first acceptable cell in enumeration order wins.
  const double delta_aff = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  const long theta_steps =
      static_cast<long>(std::floor(cfg.theta_max / cfg.theta_step + 1e-9));
  for (const HeadGuess& guess : guesses) {
    const std::size_t h = guess.head.size();
    const std::size_t n_tail = n - h;
    if (n_tail == 0) continue;

    std::vector<std::size_t> tail;
    {
      std::set<std::size_t> in_head(guess.head.begin(), guess.head.end());
      for (std::size_t i = 1; i <= n; ++i)
        if (!in_head.count(i)) tail.push_back(i);
    }
    RecoverWeightsInput dp_base;
    dp_base.n = n_tail;
    dp_base.gamma = cfg.gamma;
    dp_base.tau = cfg.tau_star;
    for (std::size_t t = 0; t < tail.size(); ++t)
      if (in.has(tail[t])) dp_base.targets.emplace_back(t + 1, in.at(tail[t]));

    struct Cell {
      std::vector<double> head_w;
      double theta, w1, w2;
    };
    std::vector<Cell> cells;
    const long steps =
        grid_multiple(cfg.head_weight_max, cfg.head_grid_step, "head_weight_max");
    std::vector<long> assign(h, 0);
    bool more = true;
    while (more) {
      Cell base;
      base.head_w.resize(h);
      for (std::size_t t = 0; t < h; ++t)
        base.head_w[t] = static_cast<double>(assign[t]) * cfg.head_grid_step;
      for (long ti = -theta_steps; ti <= theta_steps; ++ti) {
        base.theta = static_cast<double>(ti) * cfg.theta_step;
        for (double w1 : w1_grid) {
          for (double w2 : w2_grid) {
            // nonnegative vectors have l2 <= l1 <= sqrt(n) l2, and every
            // entry is capped at tau* w2
            if (w1 > static_cast<double>(n_tail) * cfg.tau_star * w2 + 1e-12) continue;
            if (w2 > w1 + 1e-12) continue;
            if (w1 > std::sqrt(static_cast<double>(n_tail)) * w2 + 1e-12) continue;
            base.w1 = w1;
            base.w2 = w2;
            cells.push_back(base);
          }
        }
      }
      more = false;
      for (std::size_t t = h; t-- > 0;) {
        if (assign[t] < steps) {
          ++assign[t];
          for (std::size_t u = t + 1; u < h; ++u) assign[u] = 0;
          more = true;
          break;
        }
      }
      if (h == 0) break;  // single empty assignment
    }

    struct CellResult {
      bool built = false;
      double distance = 0.0;
      WeightedLTF g;
    };
    auto eval_cell = [&](const Cell& c) {
      CellResult r;
      AffineConstants ac;
      try {
        ac = affine_constants(c.head_w, c.w1, c.w2, c.theta, delta_aff, n, cfg.quad_tol);
      } catch (const quad::NonConvergence&) {
        return r;
      }
      RecoverWeightsInput dp = dp_base;
      dp.w1 = c.w1;
      dp.w2 = c.w2;
      dp.slope = ac.slope;
      dp.offset = -ac.intercept;  // objective matches alpha - (A w + B)
      RecoverWeightsResult rec = recover_weights(dp);
      if (!rec.feasible) return r;
      std::vector<double> w(n, 0.0);
      for (std::size_t t = 0; t < h; ++t) w[guess.head[t] - 1] = c.head_w[t];
      for (std::size_t t = 0; t < n_tail; ++t) w[tail[t] - 1] = rec.weights[t];
      r.g = WeightedLTF(std::move(w), c.theta);
      r.built = true;
      return r;
    };

    const std::size_t batch = 512;
    std::vector<CellResult> results(std::min(batch, cells.size()));
    for (std::size_t begin = 0; begin < cells.size(); begin += batch) {
      const std::size_t end = std::min(begin + batch, cells.size());
      if (tried >= cfg.max_candidates) return finish(false);
      results.resize(end - begin);
      if (cfg.verify == VerifyMode::Exact) {
        parallel_chunks(end - begin, 16, [&](std::size_t, std::size_t lo, std::size_t hi) {
          for (std::size_t t = lo; t < hi; ++t) {
            results[t] = eval_cell(cells[begin + t]);
            if (results[t].built) {
              IndexVector sg = shapley_exact(results[t].g, cfg.shapley_cap);
              results[t].distance = partial_distance(in, sg);
            }
          }
        });
      } else {
        for (std::size_t t = 0; t < end - begin; ++t) {
          results[t] = eval_cell(cells[begin + t]);
          if (results[t].built) results[t].distance = verifier.distance(results[t].g);
        }
      }
      for (std::size_t t = 0; t < end - begin; ++t) {
        if (!results[t].built) continue;
        ++tried;
        const Cell& c = cells[begin + t];
        if (results[t].distance < best.achieved_distance) {
          best.ltf = results[t].g;
          best.achieved_distance = results[t].distance;
          best.provenance = "structured";
          best.head_size_guess = h;
          best.w1 = c.w1;
          best.w2 = c.w2;
        }
        if (results[t].distance <= accept) return finish(true);
      }
    }
  }

  return finish(false);
}

std::string shapley_paper_parameter_table(std::size_t n, double eps) {
  std::ostringstream os;
  const double ln_n = std::log(std::max<double>(2, n));
  const double log2n = std::log2(std::max<double>(2, n));
  const double tau_star = eps * eps / std::pow(log2n, 4);
  const double k_eq = std::max(4.0 * log2n / (tau_star * tau_star), std::pow(eps, -12.0));
  const double k_box = std::max(4.0 * std::pow(log2n, 9) / std::pow(eps, 4.0),
                                std::pow(eps, -12.0));
  os << "paper-scale parameters (printed, not run)\n";
  os << "  n = " << n << ", eps = " << eps << "\n";
  os << "  tau* = eps^2 / log^4(n) = " << tau_star << "\n";
  os << "  k*   = max(4 log n / tau*^2, eps^-12)        = " << k_eq << "\n";
  os << "  k*   = max(4 log^9 n / eps^4, eps^-12) (box) = " << k_box << "\n";
  const double k = k_box;
  const double log10_gamma = -(2.0 * std::log10(std::max<double>(2, n)) +
                               0.5 * k * std::log10(std::max(2.0, k)));
  os << "  gamma = 1 / (n^2 k^(k/2)); log10(gamma) = " << log10_gamma << "\n";
  os << "  (enumeration size 2^~O(log^18 n / eps^24); ln n = " << ln_n << ")\n";
  return os.str();
}

}  // namespace powidx
