#include <gtest/gtest.h>

#include <numeric>

#include "msv/error.hpp"
#include "msv/greedy.hpp"
#include "msv/random.hpp"
#include "msv/synthetic.hpp"

using namespace msv;

namespace {

bool contains_all(const View& v, const std::vector<Site>& sites) {
  for (Site s : sites) {
    if (!v.contains(s)) return false;
  }
  return true;
}

std::uint64_t expected_queries(const MsvResult& r) {
  std::uint64_t levels = 0;
  for (const auto& l : r.trace.levels) levels += l.queries;
  return 1 + levels + r.set.count();
}

}  // namespace

TEST(Greedy, FindsEachPatchOfAThreePatchScene) {
  PatchSceneParams p;
  p.height = 12;
  p.width = 12;
  const auto scene = make_patch_scene(p, 5);
  auto f = EvidenceClassifier::patches(scene.patches);
  const auto b = Baseline::black().materialize(scene.image);
  for (const auto& strategy :
       {SplitStrategy::grid(), SplitStrategy::voronoi(0), SplitStrategy::slic_with(0)}) {
    GreedyConfig cfg;
    cfg.split = strategy;
    const auto r = greedy_msvs(f, scene.image, b, cfg);
    ASSERT_EQ(r.set.count(), 3u) << to_string(strategy.kind);
    EXPECT_TRUE(r.set.completed());
    EXPECT_EQ(r.set.predicted_class, 1);
    EXPECT_EQ(r.set.remainder_class, 0);
    // Every view holds exactly one intact patch.
    for (const auto& v : r.set.views) {
      int intact = 0;
      for (const auto& patch : scene.patches) intact += contains_all(v, patch) ? 1 : 0;
      EXPECT_EQ(intact, 1);
    }
  }
}

TEST(Greedy, SinglePixelGivesOneSingletonView) {
  std::vector<float> data(25, 0.2f);
  data[13] = 0.9f;
  const InputTensor x(5, 5, 1, data);
  SinglePixelClassifier f(13);
  const auto b = Baseline::black().materialize(x);
  GreedyConfig cfg;
  cfg.beta = 4;
  const auto r = greedy_msvs(f, x, b, cfg);
  ASSERT_EQ(r.set.count(), 1u);
  EXPECT_EQ(r.set.views[0], View({13}));
  EXPECT_EQ(r.reference.top_class(), 1);
}

TEST(Greedy, CountsEveryQuery) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    PatchSceneParams p;
    p.height = 10;
    p.width = 10;
    p.patches = 1 + trial % 4;
    const auto scene = make_patch_scene(p, rng());
    auto f = EvidenceClassifier::patches(scene.patches);
    const auto b = Baseline::black().materialize(scene.image);
    GreedyConfig cfg;
    cfg.beta = 4 + trial % 8;
    cfg.split = SplitStrategy::slic_with(trial);
    const auto r = greedy_msvs(f, scene.image, b, cfg);
    EXPECT_EQ(r.trace.queries, f.queries());
    EXPECT_EQ(r.trace.queries, expected_queries(r));
    for (const auto& level : r.trace.levels) {
      EXPECT_EQ(level.queries, level.groups);
      EXPECT_LE(level.groups, static_cast<std::size_t>(cfg.beta));
    }
  }
}

TEST(Greedy, IsDeterministic) {
  PatchSceneParams p;
  p.channels = 3;
  const auto scene = make_patch_scene(p, 8);
  auto f = EvidenceClassifier::patches(scene.patches);
  const auto b = Baseline::random_normal(3).materialize(scene.image, 4);
  GreedyConfig cfg;
  cfg.split = SplitStrategy::slic_with(12);
  const auto a = greedy_msvs(f, scene.image, b, cfg);
  const auto c = greedy_msvs(f, scene.image, b, cfg);
  EXPECT_EQ(a.set.views, c.set.views);
  EXPECT_EQ(a.set.split_seeds, c.set.split_seeds);
  EXPECT_EQ(a.trace.queries, c.trace.queries);
}

TEST(Greedy, LevelSeedsDeriveFromTheRunSeed) {
  EXPECT_EQ(level_seed(5, 0), derive_seed(5, 0));
  EXPECT_NE(level_seed(5, 0), level_seed(5, 1));
  EXPECT_NE(level_seed(5, 1), level_seed(6, 1));
}

TEST(Greedy, DegenerateBaselineIsFlagged) {
  const auto x = InputTensor::flat({0.3f, 0.6f, 0.9f, 0.1f});
  ConstantClassifier f(1, 3);
  const auto b = Baseline::black().materialize(x);
  GreedyConfig cfg;
  cfg.beta = 2;
  const auto r = greedy_msvs(f, x, b, cfg);
  EXPECT_TRUE(r.set.degenerate);
  EXPECT_FALSE(r.set.completed());
  EXPECT_EQ(r.set.remainder_class, 1);
  std::size_t covered = 0;
  for (const auto& v : r.set.views) covered += v.size();
  EXPECT_EQ(covered, x.sites());
}

TEST(Greedy, MaxViewsTruncates) {
  PatchSceneParams p;
  p.patches = 4;
  const auto scene = make_patch_scene(p, 2);
  auto f = EvidenceClassifier::patches(scene.patches);
  const auto b = Baseline::black().materialize(scene.image);
  GreedyConfig cfg;
  cfg.max_views = 2;
  const auto r = greedy_msvs(f, scene.image, b, cfg);
  EXPECT_EQ(r.set.count(), 2u);
  EXPECT_TRUE(r.set.truncated);
  EXPECT_EQ(r.set.remainder_class, r.set.predicted_class);
}

TEST(Greedy, DepthCapRaisesRunError) {
  std::vector<float> data(64, 0.0f);
  data[63] = 1.0f;
  const InputTensor x(8, 8, 1, data);
  SinglePixelClassifier f(63);
  const auto b = Baseline::black().materialize(x);
  GreedyConfig cfg;
  cfg.beta = 2;
  cfg.split = SplitStrategy::grid();
  cfg.max_depth = 1;
  EXPECT_THROW(greedy_msvs(f, x, b, cfg), RunError);
}

TEST(Greedy, RejectsBadConfig) {
  const auto x = InputTensor::flat({1, 0});
  SinglePixelClassifier f(0);
  GreedyConfig cfg;
  cfg.beta = 1;
  EXPECT_THROW(greedy_msvs(f, x, InputTensor::flat({0, 0}), cfg), ParameterError);
  cfg.beta = 4;
  EXPECT_THROW(greedy_msvs(f, x, InputTensor::flat({0, 0, 0}), cfg), ConfigError);
  cfg.beta = 1;
  EXPECT_THROW(check_config(cfg), ParameterError);
}

TEST(Greedy, WarnsOutsideTheUsualBetaRange) {
  std::vector<std::string> seen;
  set_warning_sink([&](const std::string& m) { seen.push_back(m); });
  GreedyConfig cfg;
  cfg.beta = 2;
  check_config(cfg);
  cfg.beta = 16;
  check_config(cfg);
  cfg.beta = 100;
  check_config(cfg);
  set_warning_sink(nullptr);
  EXPECT_EQ(seen.size(), 2u);
}

TEST(Greedy, StrictMinimalityKeepsEveryViewSplitMinimal) {
  // A classifier that rewards removing site 0 breaks the minimal-change rule
  // for plain greedy; strict mode still certifies its views.
  const auto x = InputTensor::flat({1, 1, 1, 1, 1, 1});
  const auto b = InputTensor::flat({0, 0, 0, 0, 0, 0});
  FunctionClassifier f(2, [](const InputTensor& t) {
    double lit = 0;
    for (float v : t.data()) lit += v;
    const double p1 = t.at(0) > 0.5f ? 0.9 : (lit >= 3 ? 0.6 : 0.2);
    return std::vector<double>{1 - p1, p1};
  });
  GreedyConfig cfg;
  cfg.beta = 8;
  cfg.split = SplitStrategy::grid();
  cfg.strict_minimality = true;
  const auto r = greedy_msvs(f, x, b, cfg);
  const auto report = validate_msv_set(f, x, r.set, b, cfg.split, cfg.beta);
  for (std::size_t i = 0; i < r.set.count(); ++i) {
    EXPECT_TRUE(report.sufficient[i]);
    EXPECT_TRUE(report.split_minimal[i]) << "view " << i;
  }
}
