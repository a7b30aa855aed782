#include "powidx/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace powidx::quad {

namespace {

constexpr int kPoints = 15;

struct Rule {
  std::array<double, kPoints> node;
  std::array<double, kPoints> weight;
};

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  double d = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, d};
}

Rule make_rule() {
  Rule r;
  for (int i = 0; i < kPoints; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (kPoints + 0.5));
    for (int it = 0; it < 60; ++it) {
      auto [p, d] = legendre(kPoints, x);
      double step = p / d;
      x -= step;
      if (std::fabs(step) < 1e-16) break;
    }
    auto [p, d] = legendre(kPoints, x);
    (void)p;
    r.node[i] = x;
    r.weight[i] = 2.0 / ((1.0 - x * x) * d * d);
  }
  return r;
}

const Rule& rule() {
  static const Rule r = make_rule();
  return r;
}

double panel(const std::function<double(double)>& f, double a, double b, std::size_t& evals) {
  const Rule& r = rule();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < kPoints; ++i) s += r.weight[i] * f(mid + half * r.node[i]);
  evals += kPoints;
  return s * half;
}

void adapt(const std::function<double(double)>& f, double a, double b, double whole,
           double tol, double noise_floor, int depth, Result& out) {
  const double mid = 0.5 * (a + b);
  const double left = panel(f, a, mid, out.evaluations);
  const double right = panel(f, mid, b, out.evaluations);
  const double err = std::fabs(whole - (left + right));
  // below the rounding floor of the overall value, bisection only chases noise
  if (err <= std::max(tol, noise_floor) || depth <= 0) {
    out.value += left + right;
    out.error_estimate += err;
    return;
  }
  adapt(f, a, mid, left, 0.5 * tol, noise_floor, depth - 1, out);
  adapt(f, mid, b, right, 0.5 * tol, noise_floor, depth - 1, out);
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
  Result out;
  out.converged = true;
  if (a == b) return out;
  double whole = panel(f, a, b, out.evaluations);
  const double noise_floor = 8.0e-15 * std::max(1.0, std::fabs(whole));
  adapt(f, a, b, whole, abs_tol, noise_floor, max_depth, out);
  out.converged =
      out.error_estimate <= std::max(abs_tol, 2.0e-13 * std::max(1.0, std::fabs(out.value)));
  return out;
}

double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
  Result r = integrate(f, a, b, abs_tol, max_depth);
  if (!r.converged) throw NonConvergence("quadrature did not reach the requested tolerance");
  return r.value;
}

}  // namespace powidx::quad
