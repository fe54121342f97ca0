#include "msv/split.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "msv/error.hpp"
#include "msv/random.hpp"
#include "msv/simd.hpp"

namespace msv {

const char* to_string(SplitKind kind) {
  switch (kind) {
    case SplitKind::kSlic:
      return "slic";
    case SplitKind::kVoronoi:
      return "voronoi";
    case SplitKind::kGrid:
      return "grid";
  }
  return "unknown";
}

SplitKind split_kind_from_string(const std::string& name) {
  if (name == "slic") return SplitKind::kSlic;
  if (name == "voronoi") return SplitKind::kVoronoi;
  if (name == "grid") return SplitKind::kGrid;
  throw ParameterError("unknown split strategy '" + name + "'");
}

namespace {

void order_groups(std::vector<Group>& groups) {
  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::sort(groups.begin(), groups.end(),
            [](const Group& a, const Group& b) { return a.front() < b.front(); });
}

std::vector<Group> groups_from_labels(std::span<const Site> view,
                                      std::span<const std::int32_t> labels, std::size_t count) {
  std::vector<Group> groups(count);
  for (std::size_t i = 0; i < view.size(); ++i) {
    groups[static_cast<std::size_t>(labels[i])].push_back(view[i]);
  }
  std::erase_if(groups, [](const Group& g) { return g.empty(); });
  order_groups(groups);
  return groups;
}

}  // namespace

namespace detail {

std::vector<Group> grid_split(std::span<const Site> view, int width, int beta) {
  const std::size_t target = std::min(static_cast<std::size_t>(beta), view.size());
  std::vector<Group> groups{Group(view.begin(), view.end())};
  const auto row = [width](Site s) { return static_cast<int>(s) / width; };
  const auto col = [width](Site s) { return static_cast<int>(s) % width; };

  while (groups.size() < target) {
    std::size_t largest = 0;
    for (std::size_t i = 1; i < groups.size(); ++i) {
      if (groups[i].size() > groups[largest].size()) largest = i;
    }
    Group& g = groups[largest];
    int rmin = std::numeric_limits<int>::max(), rmax = -1;
    int cmin = std::numeric_limits<int>::max(), cmax = -1;
    for (Site s : g) {
      rmin = std::min(rmin, row(s));
      rmax = std::max(rmax, row(s));
      cmin = std::min(cmin, col(s));
      cmax = std::max(cmax, col(s));
    }
    const bool by_row = (rmax - rmin) > (cmax - cmin);
    std::sort(g.begin(), g.end(), [&](Site a, Site b) {
      const int ka = by_row ? row(a) : col(a);
      const int kb = by_row ? row(b) : col(b);
      if (ka != kb) return ka < kb;
      const int oa = by_row ? col(a) : row(a);
      const int ob = by_row ? col(b) : row(b);
      if (oa != ob) return oa < ob;
      return a < b;
    });
    const std::size_t cut = (g.size() + 1) / 2;
    Group upper(g.begin() + static_cast<std::ptrdiff_t>(cut), g.end());
    g.resize(cut);
    groups.push_back(std::move(upper));
  }
  order_groups(groups);
  return groups;
}

std::vector<Group> voronoi_split(std::span<const Site> view, int width, int beta,
                                 std::uint64_t seed) {
  const std::size_t m = view.size();
  const std::size_t count = std::min(static_cast<std::size_t>(beta), m);

  // Partial Fisher-Yates over view positions; seed order is draw order.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, m - i));
    std::swap(order[i], order[j]);
  }

  std::vector<float> rows(m), cols(m), seed_rows(count), seed_cols(count);
  for (std::size_t i = 0; i < m; ++i) {
    rows[i] = static_cast<float>(static_cast<int>(view[i]) / width);
    cols[i] = static_cast<float>(static_cast<int>(view[i]) % width);
  }
  for (std::size_t j = 0; j < count; ++j) {
    seed_rows[j] = rows[order[j]];
    seed_cols[j] = cols[order[j]];
  }
  std::vector<std::int32_t> labels(m);
  simd::active().nearest_seed_2d(rows, cols, seed_rows, seed_cols, labels);
  return groups_from_labels(view, labels, count);
}

void srgb_to_lab(float r, float g, float b, float& l, float& a, float& bb) {
  const auto linear = [](double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
  };
  const double lr = linear(r), lg = linear(g), lb = linear(b);
  const double x = (0.412453 * lr + 0.357580 * lg + 0.180423 * lb) / 0.950456;
  const double y = 0.212671 * lr + 0.715160 * lg + 0.072169 * lb;
  const double z = (0.019334 * lr + 0.119193 * lg + 0.950227 * lb) / 1.088754;
  constexpr double eps = 216.0 / 24389.0;
  constexpr double kappa = 24389.0 / 27.0;
  const auto f = [](double t) { return t > eps ? std::cbrt(t) : (kappa * t + 16.0) / 116.0; };
  const double fx = f(x), fy = f(y), fz = f(z);
  l = static_cast<float>(116.0 * fy - 16.0);
  a = static_cast<float>(500.0 * (fx - fy));
  bb = static_cast<float>(200.0 * (fy - fz));
}

std::vector<Group> slic_split(std::span<const Site> view, const InputTensor& x, int beta,
                              const SlicParams& params, std::uint64_t seed) {
  const std::size_t m = view.size();
  const int width = x.width();
  const std::size_t want = std::min(static_cast<std::size_t>(beta), m);

  std::vector<float> L(m), A(m), B(m), rows(m), cols(m);
  int rmin = std::numeric_limits<int>::max(), rmax = -1;
  int cmin = std::numeric_limits<int>::max(), cmax = -1;
  for (std::size_t i = 0; i < m; ++i) {
    const Site s = view[i];
    const int r = static_cast<int>(s) / width;
    const int c = static_cast<int>(s) % width;
    rows[i] = static_cast<float>(r);
    cols[i] = static_cast<float>(c);
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
    if (x.channels() >= 3) {
      srgb_to_lab(x.at(s, 0), x.at(s, 1), x.at(s, 2), L[i], A[i], B[i]);
    } else {
      srgb_to_lab(x.at(s, 0), x.at(s, 0), x.at(s, 0), L[i], A[i], B[i]);
    }
  }
  const double h = rmax - rmin + 1;
  const double w = cmax - cmin + 1;
  const double step = std::max(1.0, std::sqrt(h * w / beta));
  const auto spatial_weight =
      static_cast<float>((params.compactness / step) * (params.compactness / step));

  // Jittered regular grid of centers over the bounding box, snapped to the
  // nearest view site.
  const int grid_rows =
      std::clamp(static_cast<int>(std::lround(std::sqrt(beta * h / w))), 1, beta);
  const int grid_cols = std::max(1, beta / grid_rows);
  const double cell_h = h / grid_rows;
  const double cell_w = w / grid_cols;
  Rng rng(seed);
  std::vector<float> cand_r, cand_c;
  for (int i = 0; i < grid_rows; ++i) {
    for (int j = 0; j < grid_cols; ++j) {
      const double jr = (uniform01(rng) - 0.5) * 0.5 * cell_h;
      const double jc = (uniform01(rng) - 0.5) * 0.5 * cell_w;
      cand_r.push_back(static_cast<float>(rmin + (i + 0.5) * cell_h - 0.5 + jr));
      cand_c.push_back(static_cast<float>(cmin + (j + 0.5) * cell_w - 0.5 + jc));
    }
  }
  std::vector<std::int32_t> snapped(cand_r.size());
  simd::active().nearest_seed_2d(cand_r, cand_c, rows, cols, snapped);

  std::vector<std::size_t> center_sites;
  std::vector<char> is_center(m, 0);
  for (std::int32_t s : snapped) {
    const auto idx = static_cast<std::size_t>(s);
    if (!is_center[idx] && center_sites.size() < want) {
      is_center[idx] = 1;
      center_sites.push_back(idx);
    }
  }
  // Top up with farthest-point picks when snapping merged centers.
  if (center_sites.size() < want) {
    std::vector<double> nearest(m, std::numeric_limits<double>::infinity());
    auto absorb = [&](std::size_t c) {
      for (std::size_t i = 0; i < m; ++i) {
        const double dr = rows[i] - rows[c];
        const double dc = cols[i] - cols[c];
        nearest[i] = std::min(nearest[i], dr * dr + dc * dc);
      }
    };
    for (std::size_t c : center_sites) absorb(c);
    while (center_sites.size() < want) {
      std::size_t far = 0;
      for (std::size_t i = 1; i < m; ++i) {
        if (nearest[i] > nearest[far]) far = i;
      }
      is_center[far] = 1;
      center_sites.push_back(far);
      absorb(far);
    }
  }

  const std::size_t k = center_sites.size();
  std::vector<float> cl(k), ca(k), cb(k), cr(k), cc(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t i = center_sites[j];
    cl[j] = L[i];
    ca[j] = A[i];
    cb[j] = B[i];
    cr[j] = rows[i];
    cc[j] = cols[i];
  }

  const simd::Features5 points{L, A, B, rows, cols};
  std::vector<std::int32_t> labels(m, -1), previous;
  const int iterations = std::max(1, params.max_iterations);
  for (int it = 0; it < iterations; ++it) {
    const simd::Features5 centers{cl, ca, cb, cr, cc};
    previous = labels;
    simd::active().nearest_center_5d(points, centers, spatial_weight, labels);
    if (labels == previous) break;
    std::vector<double> sl(k, 0.0), sa(k, 0.0), sb(k, 0.0), sr(k, 0.0), sc(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < m; ++i) {
      const auto j = static_cast<std::size_t>(labels[i]);
      sl[j] += L[i];
      sa[j] += A[i];
      sb[j] += B[i];
      sr[j] += rows[i];
      sc[j] += cols[i];
      ++count[j];
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (count[j] == 0) continue;
      const double inv = 1.0 / static_cast<double>(count[j]);
      cl[j] = static_cast<float>(sl[j] * inv);
      ca[j] = static_cast<float>(sa[j] * inv);
      cb[j] = static_cast<float>(sb[j] * inv);
      cr[j] = static_cast<float>(sr[j] * inv);
      cc[j] = static_cast<float>(sc[j] * inv);
    }
  }

  // Connectivity: 4-connected components per label; small stray fragments
  // move to the adjacent label they touch most.
  std::vector<std::int32_t> local(x.sites(), -1);
  for (std::size_t i = 0; i < m; ++i) local[view[i]] = static_cast<std::int32_t>(i);
  const int height = x.height();
  auto for_neighbors = [&](std::size_t i, auto&& fn) {
    const int r = static_cast<int>(rows[i]);
    const int c = static_cast<int>(cols[i]);
    const int dr[4] = {-1, 1, 0, 0};
    const int dc[4] = {0, 0, -1, 1};
    for (int d = 0; d < 4; ++d) {
      const int nr = r + dr[d], nc = c + dc[d];
      if (nr < 0 || nr >= height || nc < 0 || nc >= width) continue;
      const std::int32_t j = local[static_cast<std::size_t>(nr) * width + nc];
      if (j >= 0) fn(static_cast<std::size_t>(j));
    }
  };

  std::vector<std::int32_t> component(m, -1);
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t start = 0; start < m; ++start) {
    if (component[start] >= 0) continue;
    const auto id = static_cast<std::int32_t>(members.size());
    members.emplace_back();
    std::vector<std::size_t> stack{start};
    component[start] = id;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      members.back().push_back(i);
      for_neighbors(i, [&](std::size_t j) {
        if (component[j] < 0 && labels[j] == labels[i]) {
          component[j] = id;
          stack.push_back(j);
        }
      });
    }
  }
  std::vector<std::size_t> label_sizes(k, 0);
  std::vector<std::int32_t> largest(k, -1);
  for (std::size_t id = 0; id < members.size(); ++id) {
    const auto lab = static_cast<std::size_t>(labels[members[id].front()]);
    label_sizes[lab] += members[id].size();
    if (largest[lab] < 0 || members[id].size() > members[static_cast<std::size_t>(largest[lab])].size()) {
      largest[lab] = static_cast<std::int32_t>(id);
    }
  }
  const auto used = static_cast<double>(
      std::count_if(label_sizes.begin(), label_sizes.end(), [](std::size_t s) { return s > 0; }));
  const double min_fragment = params.min_fragment_fraction * static_cast<double>(m) / used;
  for (std::size_t id = 0; id < members.size(); ++id) {
    const auto& comp = members[id];
    const auto lab = labels[comp.front()];
    if (largest[static_cast<std::size_t>(lab)] == static_cast<std::int32_t>(id)) continue;
    if (static_cast<double>(comp.size()) >= min_fragment) continue;
    std::vector<std::size_t> shared(k, 0);
    for (std::size_t i : comp) {
      for_neighbors(i, [&](std::size_t j) {
        if (labels[j] != lab) ++shared[static_cast<std::size_t>(labels[j])];
      });
    }
    const auto best = std::max_element(shared.begin(), shared.end());
    if (*best == 0) continue;
    const auto target = static_cast<std::int32_t>(best - shared.begin());
    for (std::size_t i : comp) labels[i] = target;
  }

  auto groups = groups_from_labels(view, labels, k);
  if (groups.size() < 2) return grid_split(view, width, beta);
  return groups;
}

}  // namespace detail

std::vector<Group> split(const SplitStrategy& strategy, std::span<const Site> view,
                         const InputTensor& x, int beta) {
  if (beta < 2) throw ParameterError("split needs beta >= 2, got " + std::to_string(beta));
  if (view.empty()) throw DomainError("cannot split an empty view");
  if (view.size() < static_cast<std::size_t>(beta)) {
    std::vector<Group> singles;
    singles.reserve(view.size());
    for (Site s : view) singles.push_back({s});
    order_groups(singles);
    return singles;
  }
  switch (strategy.kind) {
    case SplitKind::kGrid:
      return detail::grid_split(view, x.width(), beta);
    case SplitKind::kVoronoi:
      return detail::voronoi_split(view, x.width(), beta, strategy.seed);
    case SplitKind::kSlic:
      return detail::slic_split(view, x, beta, strategy.slic, strategy.seed);
  }
  throw ParameterError("unknown split strategy");
}

}  // namespace msv
