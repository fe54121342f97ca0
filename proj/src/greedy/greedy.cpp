#include "msv/greedy.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "msv/error.hpp"
#include "msv/random.hpp"

namespace msv {

void check_config(const GreedyConfig& cfg) {
  if (cfg.beta < 2) throw ParameterError("beta must be at least 2, got " + std::to_string(cfg.beta));
  if (cfg.beta < 4 || cfg.beta > 64) {
    warn("beta = " + std::to_string(cfg.beta) + " lies outside the studied range 4..64");
  }
}

std::uint64_t level_seed(std::uint64_t run_seed, std::size_t depth) {
  return derive_seed(run_seed, depth);
}

EstimateResult estimate_msv(Classifier& f, const InputTensor& x, const InputTensor& b,
                            const View& view, const Prediction& reference, const GreedyConfig& cfg,
                            std::size_t depth, MsvRunTrace* trace, std::size_t view_index) {
  if (cfg.beta < 2) throw ParameterError("beta must be at least 2");
  view.check_bounds(x.sites());
  const int k = reference.top_class();
  const double fk_x = reference.score(k);
  const std::size_t max_depth = cfg.max_depth ? cfg.max_depth : x.sites();

  std::vector<Site> current(view.sites().begin(), view.sites().end());
  for (;;) {
    if (depth > max_depth) {
      throw RunError("recursion depth exceeded " + std::to_string(max_depth) + " at view size " +
                     std::to_string(current.size()));
    }
    const std::uint64_t seed = level_seed(cfg.split.seed, depth);
    const auto groups = split(cfg.split.with_seed(seed), current, x, cfg.beta);

    std::vector<std::vector<Site>> remaining;
    std::vector<InputTensor> batch;
    remaining.reserve(groups.size());
    batch.reserve(groups.size());
    for (const auto& g : groups) {
      remaining.push_back(set_difference(current, g));
      batch.push_back(mask_input(x, remaining.back(), b));
    }
    const auto preds = f.classify_batch(batch);

    std::size_t chosen = 0;
    double best_gap = std::abs(fk_x - preds[0].score(k));
    for (std::size_t i = 1; i < preds.size(); ++i) {
      const double gap = std::abs(fk_x - preds[i].score(k));
      const bool better = cfg.tie_break == TieBreak::kLowestIndex ? gap < best_gap : gap <= best_gap;
      if (better) {
        best_gap = gap;
        chosen = i;
      }
    }
    // The candidate prediction doubles as the sufficiency check of V \ S'.
    bool keep = preds[chosen].top_class() == k && !remaining[chosen].empty();
    if (!keep && cfg.strict_minimality) {
      for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i].top_class() != k || remaining[i].empty()) continue;
        const double gap = std::abs(fk_x - preds[i].score(k));
        if (!keep || gap < best_gap) {
          keep = true;
          best_gap = gap;
          chosen = i;
        }
      }
    }

    if (trace) {
      trace->queries += batch.size();
      trace->levels.push_back(LevelRecord{view_index, depth, current.size(), groups.size(), chosen,
                                          best_gap, batch.size(), keep});
    }
    if (!keep) return EstimateResult{View(std::move(current)), seed, depth};
    current = std::move(remaining[chosen]);
    ++depth;
  }
}

MsvResult greedy_msvs(Classifier& f, const InputTensor& x, const InputTensor& b,
                      const GreedyConfig& cfg) {
  if (cfg.beta < 2) throw ParameterError("beta must be at least 2, got " + std::to_string(cfg.beta));
  if (x.shape() != b.shape()) {
    throw ConfigError("baseline shape " + b.shape().str() + " does not match input " +
                      x.shape().str());
  }
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = x.sites();
  const std::size_t max_views = cfg.max_views ? cfg.max_views : n;

  MsvResult result;
  MsvRunTrace& trace = result.trace;
  MsvSet& set = result.set;

  result.reference = f.classify(x);
  const Prediction& reference = result.reference;
  trace.queries += 1;
  const int k = reference.top_class();
  set.predicted_class = k;

  std::vector<Site> pool(n);
  std::iota(pool.begin(), pool.end(), Site{0});
  for (;;) {
    auto found = estimate_msv(f, x, b, View(pool), reference, cfg, 0, &trace, set.views.size());
    pool = set_difference(pool, found.view.sites());
    set.views.push_back(std::move(found.view));
    set.split_seeds.push_back(found.split_seed);

    const int remainder = f.classify(mask_input(x, pool, b)).top_class();
    trace.queries += 1;
    set.remainder_class = remainder;
    if (remainder != k) break;
    if (pool.empty()) {
      set.degenerate = true;
      break;
    }
    if (set.views.size() >= max_views) {
      set.truncated = true;
      break;
    }
  }

  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace msv
