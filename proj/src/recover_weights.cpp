#include "powidx/recover_weights.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace powidx {

namespace {

long to_grid_count(double value, double step, const char* what) {
  const double q = value / step;
  const double r = std::round(q);
  if (std::fabs(q - r) > 1e-6 * std::max(1.0, std::fabs(q)) + 1e-9)
    throw std::invalid_argument(std::string("recover_weights: ") + what +
                                " is not on the required grid");
  if (r < 0.0) throw std::invalid_argument(std::string("recover_weights: ") + what + " < 0");
  return static_cast<long>(r);
}

struct Cell {
  double cost = 0.0;
  std::vector<std::uint16_t> z;  // grid multiples, one per position so far
};

void validate(const RecoverWeightsInput& in) {
  if (in.n == 0) throw std::invalid_argument("recover_weights: n must be >= 1");
  if (!(in.gamma > 0.0)) throw std::invalid_argument("recover_weights: gamma must be > 0");
  if (!(in.tau > 0.0) || in.tau > 1.0 + 1e-12)
    throw std::invalid_argument("recover_weights: tau in (0,1]");
  if (in.w1 < 0.0 || in.w2 < 0.0)
    throw std::invalid_argument("recover_weights: norm targets must be >= 0");
  std::size_t prev = 0;
  for (const auto& [pos, v] : in.targets) {
    (void)v;
    if (pos < 1 || pos > in.n || pos <= prev)
      throw std::invalid_argument("recover_weights: bad target positions");
    prev = pos;
  }
}

double term(const RecoverWeightsInput& in, double alpha, double w) {
  const double d = alpha - in.slope * w + in.offset;
  return d * d;
}

}  // namespace

RecoverWeightsResult recover_weights(const RecoverWeightsInput& in) {
  validate(in);
  const long i1_max = to_grid_count(in.w1, in.gamma, "w1");
  const long i2_max = to_grid_count(in.w2 * in.w2, in.gamma * in.gamma, "w2^2");
  if (i1_max > 60000)
    throw std::invalid_argument("recover_weights: w1/gamma too large for the table");
  if (static_cast<double>(i1_max + 1) * static_cast<double>(i2_max + 1) > 5e7)
    throw std::invalid_argument("recover_weights: table would not fit in memory");

  const double zc = in.tau * in.w2 / in.gamma;
  long z_cap = static_cast<long>(std::floor(zc + 1e-9 * std::max(1.0, zc)));
  z_cap = std::min<long>(z_cap, i1_max);
  if (z_cap < 0) z_cap = 0;

  std::vector<double> alpha_by_pos(in.n + 1, 0.0);
  std::vector<bool> has_alpha(in.n + 1, false);
  for (const auto& [pos, v] : in.targets) {
    alpha_by_pos[pos] = v;
    has_alpha[pos] = true;
  }

  const std::size_t cells = static_cast<std::size_t>(i1_max + 1) * (i2_max + 1);
  auto at = [&](std::vector<std::optional<Cell>>& layer, long i1, long i2)
      -> std::optional<Cell>& { return layer[static_cast<std::size_t>(i1) * (i2_max + 1) + i2]; };

  std::vector<std::optional<Cell>> prev(cells), cur(cells);
  // position 0: empty prefix at (0, 0)
  prev[0] = Cell{0.0, {}};

  for (std::size_t k = 1; k <= in.n; ++k) {
    for (auto& c : cur) c.reset();
    for (long i1 = 0; i1 <= i1_max; ++i1) {
      for (long i2 = 0; i2 <= i2_max; ++i2) {
        auto& p = at(prev, i1, i2);
        if (!p) continue;
        const long zmax = std::min({z_cap, i1_max - i1});
        for (long z = 0; z <= zmax; ++z) {
          const long ni2 = i2 + z * z;
          if (ni2 > i2_max) break;
          const double w = static_cast<double>(z) * in.gamma;
          const double c =
              p->cost + (has_alpha[k] ? term(in, alpha_by_pos[k], w) : 0.0);
          auto& dst = at(cur, i1 + z, ni2);
          if (!dst) {
            Cell cell{c, p->z};
            cell.z.push_back(static_cast<std::uint16_t>(z));
            dst = std::move(cell);
          } else {
            std::vector<std::uint16_t> tmp = p->z;  // lazily materialized candidate
            tmp.push_back(static_cast<std::uint16_t>(z));
            if (c < dst->cost || (c == dst->cost && tmp < dst->z)) {
              dst = Cell{c, std::move(tmp)};
            }
          }
        }
      }
    }
    std::swap(prev, cur);
  }

  RecoverWeightsResult out;
  auto& fin = at(prev, i1_max, i2_max);
  if (!fin) return out;
  out.feasible = true;
  out.cost = fin->cost;
  out.weights.resize(in.n);
  for (std::size_t i = 0; i < in.n; ++i)
    out.weights[i] = static_cast<double>(fin->z[i]) * in.gamma;
  return out;
}

RecoverWeightsResult recover_weights_bruteforce(const RecoverWeightsInput& in) {
  validate(in);
  const long i1_max = to_grid_count(in.w1, in.gamma, "w1");
  const long i2_max = to_grid_count(in.w2 * in.w2, in.gamma * in.gamma, "w2^2");
  const double zc = in.tau * in.w2 / in.gamma;
  long z_cap = static_cast<long>(std::floor(zc + 1e-9 * std::max(1.0, zc)));
  z_cap = std::min<long>(z_cap, i1_max);
  if (z_cap < 0) z_cap = 0;

  std::vector<double> alpha_by_pos(in.n + 1, 0.0);
  std::vector<bool> has_alpha(in.n + 1, false);
  for (const auto& [pos, v] : in.targets) {
    alpha_by_pos[pos] = v;
    has_alpha[pos] = true;
  }

  RecoverWeightsResult best;
  std::vector<std::uint16_t> z(in.n, 0);
  std::vector<std::uint16_t> best_z;

  // depth-first over z vectors in lexicographic order
  auto rec = [&](auto&& self, std::size_t k, long rem1, long rem2, double cost) -> void {
    if (k == in.n) {
      if (rem1 != 0 || rem2 != 0) return;
      if (!best.feasible || cost < best.cost ||
          (cost == best.cost && z < best_z)) {
        best.feasible = true;
        best.cost = cost;
        best_z = z;
      }
      return;
    }
    for (long v = 0; v <= std::min<long>(z_cap, rem1); ++v) {
      const long sq = v * v;
      if (sq > rem2) break;
      z[k] = static_cast<std::uint16_t>(v);
      const double w = static_cast<double>(v) * in.gamma;
      const double c =
          cost + (has_alpha[k + 1] ? term(in, alpha_by_pos[k + 1], w) : 0.0);
      self(self, k + 1, rem1 - v, rem2 - sq, c);
    }
    z[k] = 0;
  };
  rec(rec, 0, i1_max, i2_max, 0.0);

  if (best.feasible) {
    best.weights.resize(in.n);
    for (std::size_t i = 0; i < in.n; ++i)
      best.weights[i] = static_cast<double>(best_z[i]) * in.gamma;
  }
  return best;
}

}  // namespace powidx
