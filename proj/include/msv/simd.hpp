#pragma once

// Data-parallel inner loops with a scalar reference and vector variants.
// The active variant is chosen once at startup from CPU features and may be
// overridden with MSV_SIMD=scalar|avx2 or force_isa(). Every variant must
// produce bit-identical results to the scalar reference.

#include <cstdint>
#include <span>
#include <string_view>

namespace msv::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view to_string(Isa isa);

// Struct-of-arrays point set for the SLIC feature space.
struct Features5 {
  std::span<const float> l, a, b, row, col;
  std::size_t size() const { return l.size(); }
};

// out[i] = keep[i] ? x[i] : base[i]
using BlendFn = void (*)(std::span<const float> x, std::span<const float> base,
                         std::span<const std::uint8_t> keep, std::span<float> out);

// labels[i] = argmin_j (r_i - sr_j)^2 + (c_i - sc_j)^2, ties to the lowest j.
using NearestSeed2Fn = void (*)(std::span<const float> rows, std::span<const float> cols,
                                std::span<const float> seed_rows, std::span<const float> seed_cols,
                                std::span<std::int32_t> labels);

// labels[i] = argmin_j dlab^2 + spatial_weight * dxy^2, ties to the lowest j.
using NearestCenter5Fn = void (*)(const Features5& points, const Features5& centers,
                                  float spatial_weight, std::span<std::int32_t> labels);

struct KernelTable {
  Isa isa;
  BlendFn blend;
  NearestSeed2Fn nearest_seed_2d;
  NearestCenter5Fn nearest_center_5d;
};

namespace scalar {
void blend(std::span<const float> x, std::span<const float> base,
           std::span<const std::uint8_t> keep, std::span<float> out);
void nearest_seed_2d(std::span<const float> rows, std::span<const float> cols,
                     std::span<const float> seed_rows, std::span<const float> seed_cols,
                     std::span<std::int32_t> labels);
void nearest_center_5d(const Features5& points, const Features5& centers, float spatial_weight,
                       std::span<std::int32_t> labels);
}  // namespace scalar

#if defined(MSV_HAVE_AVX2)
namespace avx2 {
void blend(std::span<const float> x, std::span<const float> base,
           std::span<const std::uint8_t> keep, std::span<float> out);
void nearest_seed_2d(std::span<const float> rows, std::span<const float> cols,
                     std::span<const float> seed_rows, std::span<const float> seed_cols,
                     std::span<std::int32_t> labels);
void nearest_center_5d(const Features5& points, const Features5& centers, float spatial_weight,
                       std::span<std::int32_t> labels);
}  // namespace avx2
#endif

// True when the variant was compiled in and the CPU supports it.
bool isa_available(Isa isa);

const KernelTable& table_for(Isa isa);
const KernelTable& active();

// Switches the process-wide variant. Throws std::invalid_argument when the
// variant is unavailable.
void force_isa(Isa isa);

}  // namespace msv::simd
