#include "pgmerge/distance.hpp"

#include <cmath>

#include "pgmerge/errors.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace pgmerge {

namespace {
thread_local std::uint64_t tls_distance_calls = 0;
} // namespace

std::uint64_t distance_call_count() noexcept { return tls_distance_calls; }
void reset_distance_call_count() noexcept { tls_distance_calls = 0; }

#if defined(__AVX2__)

static double l2_sqr_avx2(const float* a, const float* b, std::size_t dim) noexcept {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= dim; i += 8) {
    __m256d a0 = _mm256_cvtps_pd(_mm_loadu_ps(a + i));
    __m256d b0 = _mm256_cvtps_pd(_mm_loadu_ps(b + i));
    __m256d a1 = _mm256_cvtps_pd(_mm_loadu_ps(a + i + 4));
    __m256d b1 = _mm256_cvtps_pd(_mm_loadu_ps(b + i + 4));
    __m256d d0 = _mm256_sub_pd(a0, b0);
    __m256d d1 = _mm256_sub_pd(a1, b1);
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  double buf[4];
  _mm256_storeu_pd(buf, acc0);
  double sum = buf[0] + buf[1] + buf[2] + buf[3];
  for (; i < dim; ++i) {
    double d = double(a[i]) - double(b[i]);
    sum += d * d;
  }
  return sum;
}

#endif // __AVX2__

double l2_sqr(const float* a, const float* b, std::size_t dim) noexcept {
  ++tls_distance_calls;
#if defined(__AVX2__)
  return l2_sqr_avx2(a, b, dim);
#else
  // Four independent accumulators so -O3 can vectorize the converted loop.
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= dim; i += 4) {
    double d0 = double(a[i]) - double(b[i]);
    double d1 = double(a[i + 1]) - double(b[i + 1]);
    double d2 = double(a[i + 2]) - double(b[i + 2]);
    double d3 = double(a[i + 3]) - double(b[i + 3]);
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  double sum = (s0 + s1) + (s2 + s3);
  for (; i < dim; ++i) {
    double d = double(a[i]) - double(b[i]);
    sum += d * d;
  }
  return sum;
#endif
}

double l2_distance(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw UsageError("l2_distance: dimension mismatch (" + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()) + ")");
  }
  return std::sqrt(l2_sqr(a.data(), b.data(), a.size()));
}

} // namespace pgmerge
