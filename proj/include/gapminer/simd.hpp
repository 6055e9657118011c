#pragma once

// Data-parallel inner loops with a scalar reference implementation and
// optional AVX2 variants picked at runtime. Every variant must produce
// bit-identical results to the scalar kernels.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace gapminer::simd {

enum class Isa { kScalar, kAvx2 };

struct Kernels {
  Isa isa;
  std::string_view name;
  /// dst[i] ^= src[i]
  void (*xor_words)(std::uint64_t* dst, const std::uint64_t* src, std::size_t n);
  /// sum[i] += counts[i]; sum_sq[i] += counts[i]^2. Counts must be < 2^31.
  void (*accumulate_moments)(const std::uint32_t* counts, double* sum, double* sum_sq, std::size_t n);
  /// out[i] = (observed[i] - mean) / max(sd, floor) with population moments
  /// over `replicates` samples.
  void (*z_scores)(const std::uint32_t* observed, const double* sum, const double* sum_sq,
                   double replicates, double floor, double* out, std::size_t n);
};

const Kernels& scalar_kernels();

/// nullptr when the build has no AVX2 translation unit or the CPU lacks AVX2.
const Kernels* avx2_kernels();

/// Best supported variant, chosen once. GAPMINER_SIMD=scalar forces the
/// reference kernels.
const Kernels& active_kernels();

inline void xor_into(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src) {
  active_kernels().xor_words(dst.data(), src.data(), dst.size());
}

}  // namespace gapminer::simd
