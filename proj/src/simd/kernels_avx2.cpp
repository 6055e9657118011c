// Compiled with -mavx2. Only reached after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "gapminer/simd.hpp"

namespace gapminer::simd {
namespace {

void xor_words(std::uint64_t* dst, const std::uint64_t* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256i a0 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
    __m256i a1 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i + 4));
    __m256i b0 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    __m256i b1 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i + 4));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_xor_si256(a0, b0));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i + 4), _mm256_xor_si256(a1, b1));
  }
  for (; i + 4 <= n; i += 4) {
    __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
    __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_xor_si256(a, b));
  }
  for (; i < n; ++i) dst[i] ^= src[i];
}

void accumulate_moments(const std::uint32_t* counts, double* sum, double* sum_sq, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d c = _mm256_cvtepi32_pd(_mm_loadu_si128(reinterpret_cast<const __m128i*>(counts + i)));
    __m256d s = _mm256_add_pd(_mm256_loadu_pd(sum + i), c);
    __m256d q = _mm256_add_pd(_mm256_loadu_pd(sum_sq + i), _mm256_mul_pd(c, c));
    _mm256_storeu_pd(sum + i, s);
    _mm256_storeu_pd(sum_sq + i, q);
  }
  for (; i < n; ++i) {
    const double c = static_cast<double>(counts[i]);
    sum[i] += c;
    sum_sq[i] += c * c;
  }
}

void z_scores(const std::uint32_t* observed, const double* sum, const double* sum_sq, double replicates,
              double floor, double* out, std::size_t n) {
  const __m256d reps = _mm256_set1_pd(replicates);
  const __m256d lo = _mm256_set1_pd(floor);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d mean = _mm256_div_pd(_mm256_loadu_pd(sum + i), reps);
    __m256d second = _mm256_div_pd(_mm256_loadu_pd(sum_sq + i), reps);
    __m256d var = _mm256_max_pd(_mm256_sub_pd(second, _mm256_mul_pd(mean, mean)), zero);
    __m256d sd = _mm256_max_pd(_mm256_sqrt_pd(var), lo);
    __m256d obs = _mm256_cvtepi32_pd(_mm_loadu_si128(reinterpret_cast<const __m128i*>(observed + i)));
    _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_sub_pd(obs, mean), sd));
  }
  for (; i < n; ++i) {
    const double mean = sum[i] / replicates;
    const double var = std::max(sum_sq[i] / replicates - mean * mean, 0.0);
    const double sd = std::max(std::sqrt(var), floor);
    out[i] = (static_cast<double>(observed[i]) - mean) / sd;
  }
}

}  // namespace

const Kernels& avx2_kernel_table() {
  static const Kernels kernels{Isa::kAvx2, "avx2", xor_words, accumulate_moments, z_scores};
  return kernels;
}

}  // namespace gapminer::simd
