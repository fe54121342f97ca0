#pragma once

// Executable forms of sufficiency, beta-split-minimality and the conditions
// an MSV set must satisfy.

#include <cstdint>
#include <string>
#include <vector>

#include "msv/classifier.hpp"
#include "msv/split.hpp"
#include "msv/tensor.hpp"

namespace msv {

// Disjoint views in discovery order plus what the search observed.
struct MsvSet {
  std::vector<View> views;
  // Seed the split used when each view was certified; replaying
  // split(strategy.with_seed(split_seeds[i]), views[i], x, beta) reproduces
  // the groups the search tested.
  std::vector<std::uint64_t> split_seeds;
  int predicted_class = 0;
  // Class of m(x, complement of all views).
  int remainder_class = 0;
  // c_f(b) = k: the complement can never become insufficient.
  bool degenerate = false;
  // Stopped at the max_views cap while the remainder was still sufficient.
  bool truncated = false;

  std::size_t count() const { return views.size(); }
  // True when the search ended because the remainder stopped being sufficient.
  bool completed() const { return !degenerate && !truncated; }
};

// c_f(m(x, view)) == k. `k` is c_f(x), computed once by the caller.
bool is_sufficient(Classifier& f, const InputTensor& x, const View& view, const InputTensor& b,
                   int k);

// For every group S of split(strategy, view, x, beta): c_f(m(x, view \ S)) != k.
bool is_beta_split_minimal(Classifier& f, const InputTensor& x, const View& view,
                           const InputTensor& b, int k, const SplitStrategy& strategy, int beta);

// Element-wise minimality: removing any single site breaks sufficiency. A
// singleton view is minimal when it is sufficient (the empty set is not a view).
bool is_minimal(Classifier& f, const InputTensor& x, const View& view, const InputTensor& b, int k);

struct ValidationReport {
  std::vector<bool> sufficient;
  std::vector<bool> split_minimal;
  // c_f(x) matches the recorded predicted class.
  bool prediction_matches = true;
  bool disjoint = true;
  // c_f(m(x, complement)) != k.
  bool remainder_insufficient = true;
  // Human-readable first failure, empty when valid.
  std::string failure;

  bool valid() const;
};

// Checks every condition of an MSV set. Views are replayed with the set's
// recorded split seeds; when a set carries none, `strategy.seed` is used.
ValidationReport validate_msv_set(Classifier& f, const InputTensor& x, const MsvSet& set,
                                  const InputTensor& b, const SplitStrategy& strategy, int beta);

}  // namespace msv
