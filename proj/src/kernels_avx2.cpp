#include "powidx/kernels.hpp"

#if defined(__AVX2__) && (defined(__x86_64__) || defined(_M_X64))
#define POWIDX_HAVE_AVX2 1
#include <immintrin.h>
#else
#define POWIDX_HAVE_AVX2 0
#endif

namespace powidx::kernels {

#if POWIDX_HAVE_AVX2

namespace {

std::size_t v_count_ge(const double* a, std::size_t n, double thr) {
  const __m256d vthr = _mm256_set1_pd(thr);
  std::size_t c = 0, i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(a + i);
    __m256d m = _mm256_cmp_pd(v, vthr, _CMP_GE_OQ);
    c += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(m)));
  }
  for (; i < n; ++i) c += (a[i] >= thr);
  return c;
}

std::size_t v_count_in_range(const double* a, std::size_t n, double lo, double hi) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  std::size_t c = 0, i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(a + i);
    __m256d m = _mm256_and_pd(_mm256_cmp_pd(v, vlo, _CMP_GE_OQ),
                              _mm256_cmp_pd(v, vhi, _CMP_LT_OQ));
    c += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(m)));
  }
  for (; i < n; ++i) c += (a[i] >= lo) & (a[i] < hi);
  return c;
}

double v_signed_prob_sum(const double* a, const double* prob, std::size_t n, double thr) {
  const __m256d vthr = _mm256_set1_pd(thr);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(a + i);
    __m256d p = _mm256_loadu_pd(prob + i);
    __m256d m = _mm256_cmp_pd(v, vthr, _CMP_GE_OQ);
    __m256d s = _mm256_blendv_pd(_mm256_sub_pd(_mm256_setzero_pd(), p), p, m);
    acc = _mm256_add_pd(acc, s);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += (a[i] >= thr) ? prob[i] : -prob[i];
  return s;
}

void v_shift(double* dst, const double* src, std::size_t n, double delta) {
  const __m256d vd = _mm256_set1_pd(delta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(src + i), vd));
  for (; i < n; ++i) dst[i] = src[i] + delta;
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops{v_count_ge, v_count_in_range, v_signed_prob_sum, v_shift};
  return ops;
}

#else

const Ops& avx2_ops() { return scalar_ops(); }

#endif

}  // namespace powidx::kernels
