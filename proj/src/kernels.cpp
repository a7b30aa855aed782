#include "powidx/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace powidx::kernels {

namespace {

// -1 = auto, otherwise holds an Isa value
std::atomic<int> g_forced{-1};

Isa detect() {
  if (const char* env = std::getenv("POWINDEX_KERNEL")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::Scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Isa::Avx2;
  }
  return avx2_supported() ? Isa::Avx2 : Isa::Scalar;
}

const Ops& active_ops() {
  int f = g_forced.load(std::memory_order_relaxed);
  Isa isa = (f >= 0) ? static_cast<Isa>(f) : detect();
  return isa == Isa::Avx2 ? avx2_ops() : scalar_ops();
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() {
  int f = g_forced.load(std::memory_order_relaxed);
  return (f >= 0) ? static_cast<Isa>(f) : detect();
}

void force_isa(Isa isa) { g_forced.store(static_cast<int>(isa)); }
void reset_isa() { g_forced.store(-1); }

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

std::size_t count_ge(const double* a, std::size_t n, double thr) {
  return active_ops().count_ge(a, n, thr);
}

std::size_t count_in_range(const double* a, std::size_t n, double lo, double hi) {
  return active_ops().count_in_range(a, n, lo, hi);
}

double signed_prob_sum(const double* a, const double* prob, std::size_t n, double thr) {
  return active_ops().signed_prob_sum(a, prob, n, thr);
}

void shift(double* dst, const double* src, std::size_t n, double delta) {
  active_ops().shift(dst, src, n, delta);
}

// Masked variants walk the runs of indices whose given bit is set; runs have
// length 2^bit, so for bit >= 2 the inner span is vector-friendly as is.
std::size_t count_ge_masked(const double* a, std::size_t n, unsigned bit, double thr) {
  const Ops& ops = active_ops();
  const std::size_t run = std::size_t{1} << bit;
  std::size_t c = 0;
  for (std::size_t base = run; base < n; base += 2 * run)
    c += ops.count_ge(a + base, run, thr);
  return c;
}

double signed_prob_sum_masked(const double* a, const double* prob, std::size_t n,
                              unsigned bit, double thr) {
  const Ops& ops = active_ops();
  const std::size_t run = std::size_t{1} << bit;
  double s = 0.0;
  for (std::size_t base = run; base < n; base += 2 * run)
    s += ops.signed_prob_sum(a + base, prob + base, run, thr);
  return s;
}

}  // namespace powidx::kernels
