#include "msv/oracle.hpp"

#include <algorithm>
#include <bit>

#include "msv/error.hpp"

namespace msv {

namespace {

constexpr std::size_t kChunk = 2048;

std::vector<Site> union_of(const std::vector<Group>& groups, std::uint32_t mask) {
  std::vector<Site> sites;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (mask >> i & 1u) sites.insert(sites.end(), groups[i].begin(), groups[i].end());
  }
  std::sort(sites.begin(), sites.end());
  return sites;
}

}  // namespace

std::vector<View> enumerate_minimal_sufficient_groups(Classifier& f, const InputTensor& x,
                                                      const InputTensor& b,
                                                      const std::vector<Group>& groups,
                                                      OracleLimit limit) {
  const std::size_t m = groups.size();
  if (m == 0) throw ParameterError("oracle needs at least one atom");
  if (m > limit.max_groups || m > 30) {
    throw ParameterError("oracle refuses " + std::to_string(m) + " atoms (limit " +
                         std::to_string(limit.max_groups) + "): 2^" + std::to_string(m) +
                         " subsets");
  }
  const int k = f.classify(x).top_class();
  const std::uint32_t total = 1u << m;

  std::vector<char> sufficient(total, 0);
  std::vector<InputTensor> batch;
  std::vector<std::uint32_t> masks;
  auto flush = [&] {
    const auto preds = f.classify_batch(batch);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      sufficient[masks[i]] = preds[i].top_class() == k ? 1 : 0;
    }
    batch.clear();
    masks.clear();
  };
  for (std::uint32_t mask = 1; mask < total; ++mask) {
    batch.push_back(mask_input(x, union_of(groups, mask), b));
    masks.push_back(mask);
    if (batch.size() == kChunk) flush();
  }
  if (!batch.empty()) flush();

  std::vector<View> out;
  for (std::uint32_t mask = 1; mask < total; ++mask) {
    if (!sufficient[mask]) continue;
    bool minimal = true;
    for (std::uint32_t rest = mask; rest && minimal; rest &= rest - 1) {
      const std::uint32_t smaller = mask & ~(rest & -rest);
      if (smaller != 0 && sufficient[smaller]) minimal = false;
    }
    if (minimal) out.emplace_back(union_of(groups, mask));
  }
  std::sort(out.begin(), out.end(), [](const View& a, const View& c) {
    if (a.size() != c.size()) return a.size() < c.size();
    return a < c;
  });
  return out;
}

std::vector<View> enumerate_minimal_sufficient(Classifier& f, const InputTensor& x,
                                               const InputTensor& b, OracleLimit limit) {
  const std::size_t n = x.sites();
  if (n > limit.max_n) {
    throw ParameterError("oracle refuses n = " + std::to_string(n) + " (limit " +
                         std::to_string(limit.max_n) + ")");
  }
  std::vector<Group> singles;
  for (Site s = 0; s < n; ++s) singles.push_back({s});
  OracleLimit atoms = limit;
  atoms.max_groups = std::max(limit.max_groups, n);
  return enumerate_minimal_sufficient_groups(f, x, b, singles, atoms);
}

VerificationVerdict verify_greedy_against_oracle(Classifier& f, const InputTensor& x,
                                                 const InputTensor& b, GreedyConfig cfg,
                                                 OracleLimit limit) {
  const std::size_t n = x.sites();
  const auto minimal = enumerate_minimal_sufficient(f, x, b, limit);

  cfg.beta = std::max<int>(2, static_cast<int>(n));
  cfg.split = SplitStrategy::grid();
  const auto run = greedy_msvs(f, x, b, cfg);

  VerificationVerdict verdict;
  verdict.greedy_views = run.set.count();
  verdict.oracle_views = minimal.size();
  verdict.degenerate = run.set.degenerate;
  verdict.remainder_insufficient = run.set.remainder_class != run.set.predicted_class;

  auto note = [&verdict](const std::string& msg) {
    if (!verdict.detail.empty()) verdict.detail += "; ";
    verdict.detail += msg;
  };
  for (std::size_t i = 0; i < run.set.views.size(); ++i) {
    const auto& v = run.set.views[i];
    if (std::find(minimal.begin(), minimal.end(), v) == minimal.end()) {
      verdict.views_minimal = false;
      note("greedy view " + std::to_string(i) + " is not minimal sufficient");
    }
    for (std::size_t j = i + 1; j < run.set.views.size(); ++j) {
      if (sets_intersect(v.sites(), run.set.views[j].sites())) {
        verdict.disjoint = false;
        note("greedy views " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
      }
    }
  }
  if (!verdict.remainder_insufficient) {
    note(verdict.degenerate ? "degenerate baseline: c_f(b) = c_f(x)"
                            : "remainder still predicts the original class");
  }
  return verdict;
}

}  // namespace msv
