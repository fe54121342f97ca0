#include <gtest/gtest.h>

#include "msv/error.hpp"
#include "msv/oracle.hpp"
#include "msv/random.hpp"

using namespace msv;

namespace {

InputTensor lit_flat(std::size_t n, const std::vector<Site>& lit) {
  std::vector<float> v(n, 0.1f);
  for (Site s : lit) v[s] = 1.0f;
  return InputTensor::flat(std::move(v));
}

GreedyConfig singletons() {
  GreedyConfig cfg;
  cfg.split = SplitStrategy::grid();
  return cfg;
}

}  // namespace

TEST(Oracle, SinglePixel) {
  const auto x = lit_flat(4, {2});
  const auto b = InputTensor::flat({0, 0, 0, 0});
  SinglePixelClassifier f(2);
  const auto minimal = enumerate_minimal_sufficient(f, x, b);
  ASSERT_EQ(minimal.size(), 1u);
  EXPECT_EQ(minimal[0], View({2}));
  EXPECT_EQ(f.queries(), 1u + 15u);
  const auto verdict = verify_greedy_against_oracle(f, x, b, singletons());
  EXPECT_TRUE(verdict.passed()) << verdict.detail;
  EXPECT_EQ(verdict.greedy_views, 1u);
}

TEST(Oracle, TwoPatches) {
  const auto x = lit_flat(6, {0, 1, 3, 4});
  const auto b = InputTensor::flat(std::vector<float>(6, 0.0f));
  auto f = EvidenceClassifier::patches({{0, 1}, {3, 4}});
  const auto minimal = enumerate_minimal_sufficient(f, x, b);
  EXPECT_EQ(minimal, (std::vector<View>{View({0, 1}), View({3, 4})}));
  const auto verdict = verify_greedy_against_oracle(f, x, b, singletons());
  EXPECT_TRUE(verdict.passed()) << verdict.detail;
  EXPECT_EQ(verdict.greedy_views, 2u);
}

TEST(Oracle, OverlappingClauses) {
  const auto x = lit_flat(5, {0, 1, 2});
  const auto b = InputTensor::flat(std::vector<float>(5, 0.0f));
  auto f = EvidenceClassifier::overlap({{0, 1}, {1, 2}});
  const auto minimal = enumerate_minimal_sufficient(f, x, b);
  EXPECT_EQ(minimal, (std::vector<View>{View({0, 1}), View({1, 2})}));
  const auto verdict = verify_greedy_against_oracle(f, x, b, singletons());
  EXPECT_TRUE(verdict.passed()) << verdict.detail;
  EXPECT_EQ(verdict.greedy_views, 1u);
}

TEST(Oracle, DegenerateBaselinePassesOnValidity) {
  const auto x = lit_flat(3, {1});
  ConstantClassifier f(0);
  const auto b = InputTensor::flat({0, 0, 0});
  const auto verdict = verify_greedy_against_oracle(f, x, b, singletons());
  EXPECT_TRUE(verdict.degenerate);
  EXPECT_TRUE(verdict.passed()) << verdict.detail;
}

TEST(Oracle, GroupAtoms) {
  const auto x = lit_flat(8, {0, 1, 4, 5});
  const auto b = InputTensor::flat(std::vector<float>(8, 0.0f));
  auto f = EvidenceClassifier::patches({{0, 1}, {4, 5}});
  const std::vector<Group> atoms = {{0, 1}, {2, 3}, {4, 5}, {6, 7}};
  const auto minimal = enumerate_minimal_sufficient_groups(f, x, b, atoms);
  EXPECT_EQ(minimal, (std::vector<View>{View({0, 1}), View({4, 5})}));
}

TEST(Oracle, MatchesGreedyOnRandomEvidence) {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + uniform_index(rng, 9);
    std::vector<Site> order(n);
    for (Site s = 0; s < n; ++s) order[s] = s;
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t d = 1 + uniform_index(rng, std::min<std::size_t>(3, n / 2));
    std::vector<std::vector<Site>> patches(d);
    std::vector<Site> lit;
    for (std::size_t i = 0; i < d; ++i) {
      patches[i] = {order[2 * i], order[2 * i + 1]};
      lit.insert(lit.end(), patches[i].begin(), patches[i].end());
    }
    const auto x = lit_flat(n, lit);
    const auto b = InputTensor::flat(std::vector<float>(n, 0.0f));
    auto f = EvidenceClassifier::patches(patches);
    const auto verdict = verify_greedy_against_oracle(f, x, b, singletons());
    EXPECT_TRUE(verdict.passed()) << "trial " << trial << ": " << verdict.detail;
    EXPECT_EQ(verdict.greedy_views, d);
    EXPECT_EQ(verdict.oracle_views, d);
  }
}

TEST(Oracle, RefusesLargeInputs) {
  const auto x = InputTensor::flat(std::vector<float>(17, 0.5f));
  ConstantClassifier f(0);
  EXPECT_THROW(enumerate_minimal_sufficient(f, x, x), ParameterError);
  EXPECT_NO_THROW(enumerate_minimal_sufficient(f, x, x, OracleLimit{17, 20}));
}
