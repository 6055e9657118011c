#include <algorithm>
#include <cmath>

#include "gapminer/simd.hpp"

namespace gapminer::simd {
namespace {

void xor_words(std::uint64_t* dst, const std::uint64_t* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] ^= src[i];
}

void accumulate_moments(const std::uint32_t* counts, double* sum, double* sum_sq, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double c = static_cast<double>(counts[i]);
    sum[i] += c;
    sum_sq[i] += c * c;
  }
}

void z_scores(const std::uint32_t* observed, const double* sum, const double* sum_sq, double replicates,
              double floor, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double mean = sum[i] / replicates;
    const double var = std::max(sum_sq[i] / replicates - mean * mean, 0.0);
    const double sd = std::max(std::sqrt(var), floor);
    out[i] = (static_cast<double>(observed[i]) - mean) / sd;
  }
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels kernels{Isa::kScalar, "scalar", xor_words, accumulate_moments, z_scores};
  return kernels;
}

}  // namespace gapminer::simd
