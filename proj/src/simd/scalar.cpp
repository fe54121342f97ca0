#include "msv/simd.hpp"

namespace msv::simd::scalar {

void blend(std::span<const float> x, std::span<const float> base,
           std::span<const std::uint8_t> keep, std::span<float> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = keep[i] ? x[i] : base[i];
}

void nearest_seed_2d(std::span<const float> rows, std::span<const float> cols,
                     std::span<const float> seed_rows, std::span<const float> seed_cols,
                     std::span<std::int32_t> labels) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    float best = 0.0f;
    std::int32_t best_j = -1;
    for (std::size_t j = 0; j < seed_rows.size(); ++j) {
      const float dr = rows[i] - seed_rows[j];
      const float dc = cols[i] - seed_cols[j];
      const float d = dr * dr + dc * dc;
      if (best_j < 0 || d < best) {
        best = d;
        best_j = static_cast<std::int32_t>(j);
      }
    }
    labels[i] = best_j;
  }
}

void nearest_center_5d(const Features5& points, const Features5& centers, float spatial_weight,
                       std::span<std::int32_t> labels) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    float best = 0.0f;
    std::int32_t best_j = -1;
    for (std::size_t j = 0; j < centers.size(); ++j) {
      const float dl = points.l[i] - centers.l[j];
      const float da = points.a[i] - centers.a[j];
      const float db = points.b[i] - centers.b[j];
      const float dr = points.row[i] - centers.row[j];
      const float dc = points.col[i] - centers.col[j];
      const float color = (dl * dl + da * da) + db * db;
      const float spatial = dr * dr + dc * dc;
      const float d = color + spatial_weight * spatial;
      if (best_j < 0 || d < best) {
        best = d;
        best_j = static_cast<std::int32_t>(j);
      }
    }
    labels[i] = best_j;
  }
}

}  // namespace msv::simd::scalar
