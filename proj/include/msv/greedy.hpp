#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "msv/classifier.hpp"
#include "msv/definitions.hpp"
#include "msv/split.hpp"
#include "msv/tensor.hpp"

namespace msv {

enum class TieBreak {
  kLowestIndex,
  // Debug negative control only; breaks replay against recorded results.
  kHighestIndex,
};

struct GreedyConfig {
  int beta = 16;
  SplitStrategy split = SplitStrategy::slic_with(0);
  // 0 means n (the number of sites).
  std::size_t max_views = 0;
  // 0 means n. Each recursion level removes at least one site, so n levels
  // always suffice for a well-behaved classifier.
  std::size_t max_depth = 0;
  TieBreak tie_break = TieBreak::kLowestIndex;
  // When the minimal-change group breaks sufficiency but another candidate
  // keeps it, continue with the best such candidate instead of stopping.
  // Makes every returned view beta-split-minimal for any classifier at no
  // extra query cost. Off by default.
  bool strict_minimality = false;
};

// Rejects beta < 2; warns when beta lies outside [4, 64].
void check_config(const GreedyConfig& cfg);

// One EstimateMSV recursion level.
struct LevelRecord {
  std::size_t view_index = 0;  // which MSV of the run this level belongs to
  std::size_t depth = 0;
  std::size_t view_size = 0;
  std::size_t groups = 0;      // beta'
  std::size_t chosen = 0;      // index of the removed group S'
  double gap = 0.0;            // |f_k(x) - f_k(m(x, V \ S'))|
  std::size_t queries = 0;     // classifier inputs issued at this level
  bool shrunk = false;         // recursed into V \ S'
};

struct MsvRunTrace {
  std::vector<LevelRecord> levels;
  // Every classifier input the run issued, including c_f(x) and the
  // remainder checks of the outer loop.
  std::uint64_t queries = 0;
  double wall_seconds = 0.0;
};

inline std::uint64_t query_count(const MsvRunTrace& trace) { return trace.queries; }

struct EstimateResult {
  View view;
  std::uint64_t split_seed = 0;  // seed of the certifying split
  std::size_t depth = 0;         // level at which the view was certified
};

// Shrinks a sufficient view until removing the minimal-change group breaks
// sufficiency. `reference` is f(x); k is its top class. The split seed of
// level d is derive_seed(cfg.split.seed, d). Throws RunError when the
// recursion exceeds cfg.max_depth.
EstimateResult estimate_msv(Classifier& f, const InputTensor& x, const InputTensor& b,
                            const View& view, const Prediction& reference, const GreedyConfig& cfg,
                            std::size_t depth = 0, MsvRunTrace* trace = nullptr,
                            std::size_t view_index = 0);

struct MsvResult {
  MsvSet set;
  MsvRunTrace trace;
  Prediction reference;  // f(x), the run's first query
};

// Extracts views until the remainder stops predicting c_f(x). `b` must be
// the materialized baseline with the shape of x.
MsvResult greedy_msvs(Classifier& f, const InputTensor& x, const InputTensor& b,
                      const GreedyConfig& cfg);

// Split seed of recursion level `depth` for a run seeded with `run_seed`.
std::uint64_t level_seed(std::uint64_t run_seed, std::size_t depth);

}  // namespace msv
