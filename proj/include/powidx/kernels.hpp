#pragma once

// Data-parallel inner loops shared by the exact enumeration routines.
// Every kernel has a scalar reference implementation and an AVX2 variant;
// the active one is picked at runtime (cpuid, overridable via the
// POWINDEX_KERNEL environment variable or force_isa()).
//
// The counting kernels are integer-exact, so scalar and AVX2 builds agree
// bit-for-bit. The weighted-sum kernels may differ in the last ulp because
// the lanes accumulate in a different order; tests bound that at 1e-12.

#include <cstddef>
#include <cstdint>

namespace powidx::kernels {

enum class Isa { Scalar, Avx2 };

Isa active_isa();
void force_isa(Isa isa);
void reset_isa();  // back to auto-detection
bool avx2_supported();
const char* isa_name(Isa isa);

// # of i in [0,n) with a[i] >= thr
std::size_t count_ge(const double* a, std::size_t n, double thr);

// # of i in [0,n) with lo <= a[i] < hi
std::size_t count_in_range(const double* a, std::size_t n, double lo, double hi);

// # of i in [0,n) with (i >> bit) & 1 == 1 and a[i] >= thr
std::size_t count_ge_masked(const double* a, std::size_t n, unsigned bit, double thr);

// sum over i of prob[i] * (a[i] >= thr ? +1 : -1)
double signed_prob_sum(const double* a, const double* prob, std::size_t n, double thr);

// as above, restricted to i with (i >> bit) & 1 == 1
double signed_prob_sum_masked(const double* a, const double* prob, std::size_t n,
                              unsigned bit, double thr);

// dst[i] = src[i] + delta; dst and src may alias only if dst == src
void shift(double* dst, const double* src, std::size_t n, double delta);

struct Ops {
  std::size_t (*count_ge)(const double*, std::size_t, double);
  std::size_t (*count_in_range)(const double*, std::size_t, double, double);
  double (*signed_prob_sum)(const double*, const double*, std::size_t, double);
  void (*shift)(double*, const double*, std::size_t, double);
};

const Ops& scalar_ops();
const Ops& avx2_ops();  // falls back to scalar_ops() on non-x86 builds

}  // namespace powidx::kernels
