#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "msv/tensor.hpp"

namespace msv {

enum class SplitKind { kSlic, kVoronoi, kGrid };

const char* to_string(SplitKind kind);
SplitKind split_kind_from_string(const std::string& name);

struct SlicParams {
  double compactness = 10.0;
  int max_iterations = 10;
  // Fragments smaller than this fraction of the mean group size are merged
  // into the neighbouring group they share the most edges with.
  double min_fragment_fraction = 0.25;
};

// Partitioner of a view into at most beta groups. Deterministic in
// (kind, params, seed, view, x, beta).
struct SplitStrategy {
  SplitKind kind = SplitKind::kSlic;
  SlicParams slic;
  std::uint64_t seed = 0;

  static SplitStrategy grid() { return {SplitKind::kGrid, {}, 0}; }
  static SplitStrategy voronoi(std::uint64_t seed = 0) { return {SplitKind::kVoronoi, {}, seed}; }
  static SplitStrategy slic_with(std::uint64_t seed = 0, SlicParams p = {}) {
    return {SplitKind::kSlic, p, seed};
  }

  SplitStrategy with_seed(std::uint64_t s) const {
    SplitStrategy copy = *this;
    copy.seed = s;
    return copy;
  }
};

using Group = std::vector<Site>;

// Splits `view` (sorted, non-empty) into disjoint non-empty groups covering
// it. Returns |view| singletons when |view| < beta, otherwise between 2 and
// beta groups. Each group is sorted; groups are ordered by smallest site.
// Throws ParameterError when beta < 2 and DomainError on an empty view.
std::vector<Group> split(const SplitStrategy& strategy, std::span<const Site> view,
                         const InputTensor& x, int beta);

namespace detail {
// Median bisection tiling used by the grid strategy and as the fallback when
// an image-driven split collapses to a single group.
std::vector<Group> grid_split(std::span<const Site> view, int width, int beta);
std::vector<Group> voronoi_split(std::span<const Site> view, int width, int beta,
                                 std::uint64_t seed);
std::vector<Group> slic_split(std::span<const Site> view, const InputTensor& x, int beta,
                              const SlicParams& params, std::uint64_t seed);

// CIE L*a*b* (D65) of an sRGB triple in [0, 1]; gray inputs use r = g = b.
void srgb_to_lab(float r, float g, float b, float& l, float& a, float& bb);
}  // namespace detail

}  // namespace msv
