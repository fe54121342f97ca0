#include "msv/definitions.hpp"

#include <algorithm>

#include "msv/error.hpp"

namespace msv {

bool is_sufficient(Classifier& f, const InputTensor& x, const View& view, const InputTensor& b,
                   int k) {
  return f.classify(mask_input(x, view, b)).top_class() == k;
}

namespace {

// True iff removing every listed group from `view` changes the class.
bool every_removal_breaks(Classifier& f, const InputTensor& x, std::span<const Site> view,
                          const std::vector<Group>& groups, const InputTensor& b, int k) {
  std::vector<InputTensor> batch;
  batch.reserve(groups.size());
  for (const auto& g : groups) batch.push_back(mask_input(x, set_difference(view, g), b));
  const auto preds = f.classify_batch(batch);
  return std::none_of(preds.begin(), preds.end(),
                      [k](const Prediction& p) { return p.top_class() == k; });
}

}  // namespace

bool is_beta_split_minimal(Classifier& f, const InputTensor& x, const View& view,
                           const InputTensor& b, int k, const SplitStrategy& strategy, int beta) {
  view.check_bounds(x.sites());
  const auto groups = split(strategy, view.sites(), x, beta);
  return every_removal_breaks(f, x, view.sites(), groups, b, k);
}

bool is_minimal(Classifier& f, const InputTensor& x, const View& view, const InputTensor& b,
                int k) {
  view.check_bounds(x.sites());
  if (view.size() == 1) return true;
  std::vector<Group> singles;
  for (Site s : view.sites()) singles.push_back({s});
  return every_removal_breaks(f, x, view.sites(), singles, b, k);
}

bool ValidationReport::valid() const {
  return prediction_matches && disjoint && remainder_insufficient &&
         std::all_of(sufficient.begin(), sufficient.end(), [](bool v) { return v; }) &&
         std::all_of(split_minimal.begin(), split_minimal.end(), [](bool v) { return v; });
}

ValidationReport validate_msv_set(Classifier& f, const InputTensor& x, const MsvSet& set,
                                  const InputTensor& b, const SplitStrategy& strategy, int beta) {
  ValidationReport report;
  const int k = f.classify(x).top_class();
  if (k != set.predicted_class) {
    report.prediction_matches = false;
    report.failure = "predicted class " + std::to_string(k) + " differs from recorded " +
                     std::to_string(set.predicted_class);
  }
  auto note = [&report](std::string msg) {
    if (report.failure.empty()) report.failure = std::move(msg);
  };

  for (std::size_t i = 0; i < set.views.size(); ++i) {
    const View& v = set.views[i];
    v.check_bounds(x.sites());
    const bool suff = is_sufficient(f, x, v, b, k);
    const std::uint64_t seed = i < set.split_seeds.size() ? set.split_seeds[i] : strategy.seed;
    const bool minimal = is_beta_split_minimal(f, x, v, b, k, strategy.with_seed(seed), beta);
    report.sufficient.push_back(suff);
    report.split_minimal.push_back(minimal);
    if (!suff) note("view " + std::to_string(i) + " is not sufficient");
    if (!minimal) note("view " + std::to_string(i) + " is not beta-split-minimal");
  }

  std::vector<Site> used;
  for (std::size_t i = 0; i < set.views.size(); ++i) {
    for (std::size_t j = i + 1; j < set.views.size(); ++j) {
      if (sets_intersect(set.views[i].sites(), set.views[j].sites())) {
        report.disjoint = false;
        note("views " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
      }
    }
    used.insert(used.end(), set.views[i].sites().begin(), set.views[i].sites().end());
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  const View everything = View::all(x.sites());
  const auto remainder = set_difference(everything.sites(), used);
  report.remainder_insufficient = f.classify(mask_input(x, remainder, b)).top_class() != k;
  if (!report.remainder_insufficient) note("the remainder still predicts class " + std::to_string(k));
  return report;
}

}  // namespace msv
