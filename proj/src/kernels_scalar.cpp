#include "powidx/kernels.hpp"

namespace powidx::kernels {
namespace {

std::size_t sc_count_ge(const double* a, std::size_t n, double thr) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += (a[i] >= thr);
  return c;
}

std::size_t sc_count_in_range(const double* a, std::size_t n, double lo, double hi) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += (a[i] >= lo) & (a[i] < hi);
  return c;
}

double sc_signed_prob_sum(const double* a, const double* prob, std::size_t n, double thr) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (a[i] >= thr) ? prob[i] : -prob[i];
  return s;
}

void sc_shift(double* dst, const double* src, std::size_t n, double delta) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] + delta;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{sc_count_ge, sc_count_in_range, sc_signed_prob_sum, sc_shift};
  return ops;
}

}  // namespace powidx::kernels
