// Compiled with -mavx2 only. Do not enable FMA here: the scalar reference
// rounds every multiply and add separately and the results must match bit
// for bit.

#include <immintrin.h>

#include "msv/simd.hpp"

namespace msv::simd::avx2 {

void blend(std::span<const float> x, std::span<const float> base,
           std::span<const std::uint8_t> keep, std::span<float> out) {
  const std::size_t n = out.size();
  const __m256i zero = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m128i bytes = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(keep.data() + i));
    const __m256i wide = _mm256_cvtepu8_epi32(bytes);
    const __m256 mask = _mm256_castsi256_ps(_mm256_cmpgt_epi32(wide, zero));
    const __m256 vx = _mm256_loadu_ps(x.data() + i);
    const __m256 vb = _mm256_loadu_ps(base.data() + i);
    _mm256_storeu_ps(out.data() + i, _mm256_blendv_ps(vb, vx, mask));
  }
  for (; i < n; ++i) out[i] = keep[i] ? x[i] : base[i];
}

void nearest_seed_2d(std::span<const float> rows, std::span<const float> cols,
                     std::span<const float> seed_rows, std::span<const float> seed_cols,
                     std::span<std::int32_t> labels) {
  const std::size_t n = rows.size();
  const std::size_t m = seed_rows.size();
  if (m == 0) {
    for (auto& l : labels) l = -1;
    return;
  }
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 r = _mm256_loadu_ps(rows.data() + i);
    const __m256 c = _mm256_loadu_ps(cols.data() + i);
    __m256 best = _mm256_setzero_ps();
    __m256i best_j = _mm256_setzero_si256();
    for (std::size_t j = 0; j < m; ++j) {
      const __m256 dr = _mm256_sub_ps(r, _mm256_set1_ps(seed_rows[j]));
      const __m256 dc = _mm256_sub_ps(c, _mm256_set1_ps(seed_cols[j]));
      const __m256 d = _mm256_add_ps(_mm256_mul_ps(dr, dr), _mm256_mul_ps(dc, dc));
      if (j == 0) {
        best = d;
        continue;
      }
      const __m256 lt = _mm256_cmp_ps(d, best, _CMP_LT_OQ);
      best = _mm256_blendv_ps(best, d, lt);
      best_j = _mm256_castps_si256(_mm256_blendv_ps(
          _mm256_castsi256_ps(best_j),
          _mm256_castsi256_ps(_mm256_set1_epi32(static_cast<int>(j))), lt));
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(labels.data() + i), best_j);
  }
  if (i < n) {
    scalar::nearest_seed_2d(rows.subspan(i), cols.subspan(i), seed_rows, seed_cols,
                            labels.subspan(i));
  }
}

void nearest_center_5d(const Features5& points, const Features5& centers, float spatial_weight,
                       std::span<std::int32_t> labels) {
  const std::size_t n = points.size();
  const std::size_t m = centers.size();
  if (m == 0) {
    for (auto& l : labels) l = -1;
    return;
  }
  const __m256 w = _mm256_set1_ps(spatial_weight);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 pl = _mm256_loadu_ps(points.l.data() + i);
    const __m256 pa = _mm256_loadu_ps(points.a.data() + i);
    const __m256 pb = _mm256_loadu_ps(points.b.data() + i);
    const __m256 pr = _mm256_loadu_ps(points.row.data() + i);
    const __m256 pc = _mm256_loadu_ps(points.col.data() + i);
    __m256 best = _mm256_setzero_ps();
    __m256i best_j = _mm256_setzero_si256();
    for (std::size_t j = 0; j < m; ++j) {
      const __m256 dl = _mm256_sub_ps(pl, _mm256_set1_ps(centers.l[j]));
      const __m256 da = _mm256_sub_ps(pa, _mm256_set1_ps(centers.a[j]));
      const __m256 db = _mm256_sub_ps(pb, _mm256_set1_ps(centers.b[j]));
      const __m256 dr = _mm256_sub_ps(pr, _mm256_set1_ps(centers.row[j]));
      const __m256 dc = _mm256_sub_ps(pc, _mm256_set1_ps(centers.col[j]));
      const __m256 color = _mm256_add_ps(
          _mm256_add_ps(_mm256_mul_ps(dl, dl), _mm256_mul_ps(da, da)), _mm256_mul_ps(db, db));
      const __m256 spatial = _mm256_add_ps(_mm256_mul_ps(dr, dr), _mm256_mul_ps(dc, dc));
      const __m256 d = _mm256_add_ps(color, _mm256_mul_ps(w, spatial));
      if (j == 0) {
        best = d;
        continue;
      }
      const __m256 lt = _mm256_cmp_ps(d, best, _CMP_LT_OQ);
      best = _mm256_blendv_ps(best, d, lt);
      best_j = _mm256_castps_si256(_mm256_blendv_ps(
          _mm256_castsi256_ps(best_j),
          _mm256_castsi256_ps(_mm256_set1_epi32(static_cast<int>(j))), lt));
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(labels.data() + i), best_j);
  }
  if (i < n) {
    const Features5 tail{points.l.subspan(i), points.a.subspan(i), points.b.subspan(i),
                         points.row.subspan(i), points.col.subspan(i)};
    scalar::nearest_center_5d(tail, centers, spatial_weight, labels.subspan(i));
  }
}

}  // namespace msv::simd::avx2
