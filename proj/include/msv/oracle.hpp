#pragma once

// Brute-force reference for small inputs.

#include <cstddef>
#include <string>
#include <vector>

#include "msv/classifier.hpp"
#include "msv/greedy.hpp"
#include "msv/split.hpp"
#include "msv/tensor.hpp"

namespace msv {

struct OracleLimit {
  std::size_t max_n = 16;
  std::size_t max_groups = 20;
};

// Every non-empty view V (over all 2^n - 1 subsets) with c_f(m(x, V)) = c_f(x)
// such that removing any single site from V leaves an insufficient view or
// the empty set. Ordered by (size, sites). Throws ParameterError above the
// limit.
std::vector<View> enumerate_minimal_sufficient(Classifier& f, const InputTensor& x,
                                               const InputTensor& b, OracleLimit limit = {});

// Same search with the given groups as atoms: returns the unions of groups
// that are sufficient and lose sufficiency when any one group is removed.
std::vector<View> enumerate_minimal_sufficient_groups(Classifier& f, const InputTensor& x,
                                                      const InputTensor& b,
                                                      const std::vector<Group>& groups,
                                                      OracleLimit limit = {});

struct VerificationVerdict {
  bool views_minimal = true;   // every greedy view is in the oracle list
  bool disjoint = true;
  bool remainder_insufficient = true;
  bool degenerate = false;     // c_f(b) = c_f(x); remainder condition unsatisfiable
  std::size_t greedy_views = 0;
  std::size_t oracle_views = 0;
  std::string detail;

  // A degenerate run passes when its views are still minimal and disjoint.
  bool passed() const {
    return views_minimal && disjoint && (remainder_insufficient || degenerate);
  }
};

// Runs the greedy search with singleton splits (beta >= n) and checks its
// output against the brute-force minimal views. Only validity is asserted;
// the greedy count need not equal the largest disjoint packing.
VerificationVerdict verify_greedy_against_oracle(Classifier& f, const InputTensor& x,
                                                 const InputTensor& b, GreedyConfig cfg,
                                                 OracleLimit limit = {});

}  // namespace msv
