// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Tolerances are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "msv/classifier.hpp"
#include "msv/definitions.hpp"
#include "msv/error.hpp"
#include "msv/greedy.hpp"
#include "msv/image_io.hpp"
#include "msv/metrics.hpp"
#include "msv/oracle.hpp"
#include "msv/pipeline.hpp"
#include "msv/random.hpp"
#include "msv/synthetic.hpp"

namespace fs = std::filesystem;
using namespace msv;

namespace {

// ---------------------------------------------------------------------------
// Pinned tolerances and sizes.

constexpr std::size_t kValidityCases = 270;
constexpr std::size_t kValidityMinCompleted = 200;
constexpr std::size_t kOracleRandomCases = 120;
constexpr std::size_t kOraclePatchSeeds = 12;
constexpr int kCorrelationImages = 200;
constexpr double kCorrelationTrueSlot = 0.45;
constexpr double kCorrelationMinRho = 0.9;
constexpr int kTrendImages = 600;
constexpr double kTrendLabelNoise = 0.1;
constexpr int kMonotonicityImages = 100;
constexpr double kMonotonicityMaxViolations = 0.05;
constexpr int kDeterminismImages = 50;
constexpr int kSeedRobustnessFixtures = 40;
constexpr int kSeedRobustnessSeeds = 5;
constexpr std::size_t kSeedRobustnessMaxDelta = 1;

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
};

std::string fmt(double v, int digits = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Fuzzed synthetic cases shared by the validity, query and seed criteria.

struct FuzzCase {
  std::unique_ptr<Classifier> f;
  InputTensor x;
  InputTensor b;
  std::string kind;
  std::vector<std::vector<Site>> patches;  // patch evidence only
};

InputTensor random_background(Rng& rng, int h, int w, int c) {
  std::vector<float> data(static_cast<std::size_t>(h) * w * c);
  for (auto& v : data) v = static_cast<float>(uniform_index(rng, 103)) / 255.0f;
  return InputTensor(h, w, c, std::move(data));
}

void light(InputTensor& x, const std::vector<Site>& sites) {
  for (Site s : sites) {
    for (int ch = 0; ch < x.channels(); ++ch) x.at(s, ch) = 1.0f;
  }
}

std::vector<Site> rect(int r0, int c0, int h, int w, int width) {
  std::vector<Site> sites;
  for (int r = r0; r < r0 + h; ++r) {
    for (int c = c0; c < c0 + w; ++c) sites.push_back(static_cast<Site>(r * width + c));
  }
  return sites;
}

InputTensor fuzz_baseline(Rng& rng, const InputTensor& x) {
  switch (uniform_index(rng, 3)) {
    case 0:
      return Baseline::black().materialize(x);
    case 1:
      return Baseline::constant({0.2f}).materialize(x);
    default:
      return Baseline::random_normal(rng(), 0.2f, 0.1f).materialize(x);
  }
}

FuzzCase make_fuzz_case(std::uint64_t seed, std::size_t index) {
  Rng rng(seed);
  FuzzCase fc;
  const int h = 8 + static_cast<int>(uniform_index(rng, 9));
  const int w = 8 + static_cast<int>(uniform_index(rng, 9));
  const int c = uniform_index(rng, 2) ? 3 : 1;
  switch (index % 3) {
    case 0: {
      PatchSceneParams p;
      p.height = h;
      p.width = w;
      p.channels = c;
      p.patches = 1 + static_cast<int>(uniform_index(rng, 4));
      p.patch_height = 1 + static_cast<int>(uniform_index(rng, 3));
      p.patch_width = 1 + static_cast<int>(uniform_index(rng, 3));
      p.spacing = 0;
      const std::uint64_t scene_seed = rng();
      PatchScene scene;
      for (;;) {
        try {
          scene = make_patch_scene(p, scene_seed);
          break;
        } catch (const ParameterError&) {
          if (p.patches == 1) throw;
          --p.patches;
        }
      }
      fc.x = std::move(scene.image);
      fc.patches = scene.patches;
      fc.f = std::make_unique<EvidenceClassifier>(EvidenceClassifier::patches(scene.patches));
      fc.kind = "patch";
      break;
    }
    case 1: {
      fc.x = random_background(rng, h, w, c);
      const auto site = static_cast<Site>(uniform_index(rng, fc.x.sites()));
      light(fc.x, {site});
      fc.f = std::make_unique<SinglePixelClassifier>(site);
      fc.kind = "single-pixel";
      break;
    }
    default: {
      // Overlapping rectangles sharing sites.
      fc.x = random_background(rng, h, w, c);
      std::vector<std::vector<Site>> clauses;
      const int count = 2 + static_cast<int>(uniform_index(rng, 3));
      const int r0 = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(h - 3)));
      const int c0 = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(w - 3)));
      for (int i = 0; i < count; ++i) {
        const int dr = static_cast<int>(uniform_index(rng, 2));
        const int dc = static_cast<int>(uniform_index(rng, 2));
        auto sites = rect(r0 + dr, c0 + dc, 2, 2, w);
        light(fc.x, sites);
        clauses.push_back(std::move(sites));
      }
      fc.f = std::make_unique<EvidenceClassifier>(EvidenceClassifier::overlap(clauses));
      fc.kind = "overlap";
      break;
    }
  }
  fc.b = fuzz_baseline(rng, fc.x);
  return fc;
}

SplitStrategy fuzz_strategy(std::size_t index, std::uint64_t seed) {
  switch ((index / 3) % 3) {
    case 0:
      return SplitStrategy::grid();
    case 1:
      return SplitStrategy::voronoi(seed);
    default:
      return SplitStrategy::slic_with(seed);
  }
}

int fuzz_beta(std::size_t index) {
  static constexpr int kBetas[] = {4, 8, 16};
  return kBetas[(index / 9) % 3];
}

// Per-level and whole-run query accounting; empty string when consistent.
std::string audit_queries(const MsvResult& run, std::uint64_t counted) {
  std::uint64_t level_sum = 0;
  for (const auto& l : run.trace.levels) {
    if (l.queries > l.groups + 1) {
      return "level issued " + std::to_string(l.queries) + " queries for " + std::to_string(l.groups) +
             " groups";
    }
    level_sum += l.queries;
  }
  // One query for f(x) and one remainder check per extracted view.
  const std::uint64_t expected = 1 + level_sum + run.set.count();
  if (run.trace.queries != expected) {
    return "trace total " + std::to_string(run.trace.queries) + " != reconstructed " +
           std::to_string(expected);
  }
  if (counted != run.trace.queries) {
    return "classifier counter " + std::to_string(counted) + " != trace " +
           std::to_string(run.trace.queries);
  }
  return {};
}

// ---------------------------------------------------------------------------

Outcome validity_suite() {
  std::size_t completed = 0, degenerate = 0, invalid = 0;
  std::string first;
  std::map<std::string, std::size_t> per_kind;
  for (std::size_t i = 0; i < kValidityCases; ++i) {
    const std::uint64_t seed = derive_seed(0xa11d, i);
    auto fc = make_fuzz_case(seed, i);
    GreedyConfig cfg;
    cfg.beta = fuzz_beta(i);
    cfg.split = fuzz_strategy(i, seed);
    const auto run = greedy_msvs(*fc.f, fc.x, fc.b, cfg);
    if (!run.set.completed()) {
      ++degenerate;
      continue;
    }
    ++completed;
    ++per_kind[fc.kind];
    const auto rep = validate_msv_set(*fc.f, fc.x, run.set, fc.b, cfg.split, cfg.beta);
    if (!rep.valid()) {
      ++invalid;
      if (first.empty()) first = "case " + std::to_string(i) + " (" + fc.kind + "): " + rep.failure;
    }
  }
  Outcome o;
  o.passed = invalid == 0 && completed >= kValidityMinCompleted;
  o.detail = std::to_string(completed) + " completed runs (patch " + std::to_string(per_kind["patch"]) +
             ", single-pixel " + std::to_string(per_kind["single-pixel"]) + ", overlap " +
             std::to_string(per_kind["overlap"]) + "), " + std::to_string(degenerate) +
             " degenerate skipped, " + std::to_string(invalid) + " invalid";
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

Outcome oracle_equivalence() {
  std::size_t checked = 0, failed = 0;
  std::string first;
  for (std::size_t i = 0; i < kOracleRandomCases; ++i) {
    Rng rng(derive_seed(0x04ac1e, i));
    const int h = 1 + static_cast<int>(uniform_index(rng, 3));
    const int w = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(12 / h)));
    const int n = h * w;
    auto x = random_background(rng, h, w, 1);
    std::unique_ptr<Classifier> f;
    switch (i % 3) {
      case 0: {
        const auto site = static_cast<Site>(uniform_index(rng, static_cast<std::uint64_t>(n)));
        light(x, {site});
        f = std::make_unique<SinglePixelClassifier>(site);
        break;
      }
      default: {
        std::vector<std::vector<Site>> patterns;
        std::vector<char> used(static_cast<std::size_t>(n), 0);
        const int count = 1 + static_cast<int>(uniform_index(rng, 3));
        for (int k = 0; k < count; ++k) {
          std::vector<Site> p;
          const int size = 1 + static_cast<int>(uniform_index(rng, 3));
          for (int t = 0; t < size; ++t) {
            const auto s = static_cast<Site>(uniform_index(rng, static_cast<std::uint64_t>(n)));
            if (i % 3 == 1 && used[s]) continue;  // patches stay disjoint
            if (std::find(p.begin(), p.end(), s) == p.end()) p.push_back(s);
            used[s] = 1;
          }
          if (p.empty()) continue;
          std::sort(p.begin(), p.end());
          light(x, p);
          patterns.push_back(std::move(p));
        }
        if (patterns.empty()) continue;
        if (i % 3 == 1) {
          f = std::make_unique<EvidenceClassifier>(EvidenceClassifier::patches(patterns));
        } else {
          f = std::make_unique<EvidenceClassifier>(EvidenceClassifier::overlap(patterns));
        }
        break;
      }
    }
    const auto b = InputTensor::filled(x.shape(), 0.0f);
    const auto verdict = verify_greedy_against_oracle(*f, x, b, GreedyConfig{});
    ++checked;
    if (!verdict.passed()) {
      ++failed;
      if (first.empty()) first = "case " + std::to_string(i) + ": " + verdict.detail;
    }
  }

  std::size_t count_mismatch = 0;
  std::string count_first;
  for (int d = 1; d <= 5; ++d) {
    for (std::size_t s = 0; s < kOraclePatchSeeds; ++s) {
      PatchSceneParams p;
      p.height = 3;
      p.width = 4;
      p.patches = d;
      p.patch_height = 1;
      p.patch_width = d <= 3 ? 2 : 1;
      p.spacing = 0;
      const auto scene = make_patch_scene(p, derive_seed(0xd0, static_cast<std::uint64_t>(d) * 100 + s));
      auto f = EvidenceClassifier::patches(scene.patches);
      const auto b = InputTensor::filled(scene.image.shape(), 0.0f);
      const auto verdict = verify_greedy_against_oracle(f, scene.image, b, GreedyConfig{});
      ++checked;
      if (!verdict.passed()) {
        ++failed;
        if (first.empty()) first = "d=" + std::to_string(d) + ": " + verdict.detail;
      }
      if (verdict.greedy_views != static_cast<std::size_t>(d)) {
        ++count_mismatch;
        if (count_first.empty()) {
          count_first = "d=" + std::to_string(d) + " gave " + std::to_string(verdict.greedy_views);
        }
      }
    }
  }
  Outcome o;
  o.passed = failed == 0 && count_mismatch == 0;
  o.detail = std::to_string(checked) + " oracle comparisons (n <= 12), " + std::to_string(failed) +
             " failed; patch counts d=1..5 x " + std::to_string(kOraclePatchSeeds) + " seeds, " +
             std::to_string(count_mismatch) + " mismatches";
  if (!first.empty()) o.detail += "; " + first;
  if (!count_first.empty()) o.detail += "; " + count_first;
  return o;
}

// Records of one slot-vote model over a slot corpus, default search config.
std::vector<ImageRecord> score_slot_corpus(const SlotSceneParams& sp, int attended, int images,
                                           std::uint64_t corpus_seed, double label_noise,
                                           SlotVoteClassifier::Pooling pooling) {
  auto model = slot_model(sp, attended, pooling);
  RunConfig cfg;
  cfg.baseline = BaselineKind::kBlack;
  std::vector<ImageRecord> records;
  for (int i = 0; i < images; ++i) {
    const auto scene = make_slot_scene(sp, derive_seed(corpus_seed, static_cast<std::uint64_t>(i)));
    int label = scene.label;
    if (label_noise > 0.0) {
      Rng noise(derive_seed(corpus_seed ^ 0x1abe1, static_cast<std::uint64_t>(i)));
      if (uniform01(noise) < label_noise) label = static_cast<int>(uniform_index(noise, 3));
    }
    auto e = explain_image(model, scene.image, cfg, {}, "img" + std::to_string(i), label);
    records.push_back(e.record);
  }
  return records;
}

Outcome correlation() {
  SlotSceneParams sp;
  sp.p_true = kCorrelationTrueSlot;
  std::vector<MetricSummary> summaries;
  BootstrapOptions bopt;
  bopt.resamples = 1000;
  std::string detail;
  for (int m = 1; m <= sp.slots; ++m) {
    const auto records = score_slot_corpus(sp, m, kCorrelationImages, 0xc0441, 0.0,
                                           SlotVoteClassifier::Pooling::kMax);
    summaries.push_back(summarize("slots_" + std::to_string(m), records, bopt));
    const auto& s = summaries.back();
    detail += (m > 1 ? ", " : "") + std::string("m=") + std::to_string(m) + ": #MSVs " +
              fmt(s.get(Metric::kMsvCount).mean, 2) + " acc " + fmt(*s.accuracy, 3);
  }
  const auto report = rank_models(summaries);
  const auto& rho = report.per_metric[0].rho;
  Outcome o;
  o.passed = rho && *rho >= kCorrelationMinRho;
  o.detail = "rho(avg #MSVs, accuracy) = " + (rho ? fmt(*rho) : std::string("undefined")) +
             " (need >= " + fmt(kCorrelationMinRho, 2) + "); " + detail;
  return o;
}

Outcome accuracy_trend() {
  SlotSceneParams sp;
  sp.p_empty = 0.5;
  sp.p_true = 0.6;
  const auto records = score_slot_corpus(sp, sp.slots, kTrendImages, 0x7abe1, kTrendLabelNoise,
                                           SlotVoteClassifier::Pooling::kSum);
  const auto table = accuracy_by_count(records);
  const auto& one = table.rows[0];
  std::size_t n3 = 0;
  double hits3 = 0.0;
  for (std::size_t i = 2; i < table.rows.size(); ++i) {
    n3 += table.rows[i].n;
    hits3 += table.rows[i].accuracy * static_cast<double>(table.rows[i].n);
  }
  Outcome o;
  if (one.n == 0 || n3 == 0) {
    o.detail = "empty bucket: n(1) = " + std::to_string(one.n) + ", n(>=3) = " + std::to_string(n3);
    return o;
  }
  const double p3 = hits3 / static_cast<double>(n3);
  const double h1 = ci_half_width(one.accuracy, one.n);
  const double h3 = ci_half_width(p3, n3);
  o.passed = one.accuracy + h1 < p3 - h3;
  o.detail = "#MSVs=1: " + fmt(one.accuracy) + " +- " + fmt(h1) + " (n=" + std::to_string(one.n) +
             "), #MSVs>=3: " + fmt(p3) + " +- " + fmt(h3) + " (n=" + std::to_string(n3) + "), " +
             std::to_string(table.excluded_degenerate) + " degenerate excluded";
  return o;
}

Outcome beta_monotonicity() {
  const int betas[] = {4, 8, 16};
  std::vector<std::array<std::size_t, 3>> counts;
  for (int i = 0; i < kMonotonicityImages; ++i) {
    const std::uint64_t seed = derive_seed(0xbe7a, static_cast<std::uint64_t>(i));
    PatchSceneParams p;
    p.height = 16;
    p.width = 16;
    p.patches = 2 + i % 4;
    p.patch_height = 2;
    p.patch_width = 2;
    p.spacing = 0;
    const auto scene = make_patch_scene(p, seed);
    auto f = EvidenceClassifier::patches(scene.patches);
    const auto b = InputTensor::filled(scene.image.shape(), 0.0f);
    std::array<std::size_t, 3> c{};
    for (int k = 0; k < 3; ++k) {
      GreedyConfig cfg;
      cfg.beta = betas[k];
      cfg.split = SplitStrategy::slic_with(0);
      c[k] = greedy_msvs(f, scene.image, b, cfg).set.count();
    }
    counts.push_back(c);
  }
  double mean[3] = {0, 0, 0};
  std::size_t v48 = 0, v816 = 0;
  for (const auto& c : counts) {
    for (int k = 0; k < 3; ++k) mean[k] += static_cast<double>(c[k]);
    v48 += c[0] > c[1];
    v816 += c[1] > c[2];
  }
  for (double& m : mean) m /= static_cast<double>(counts.size());
  const double r48 = static_cast<double>(v48) / static_cast<double>(counts.size());
  const double r816 = static_cast<double>(v816) / static_cast<double>(counts.size());
  Outcome o;
  o.passed = mean[0] <= mean[1] && mean[1] <= mean[2] && r48 <= kMonotonicityMaxViolations &&
             r816 <= kMonotonicityMaxViolations;
  o.detail = "mean #MSVs beta=4: " + fmt(mean[0], 2) + ", 8: " + fmt(mean[1], 2) + ", 16: " +
             fmt(mean[2], 2) + "; per-image violations 4>8: " + fmt(100 * r48, 1) + "%, 8>16: " +
             fmt(100 * r816, 1) + "% (max " + fmt(100 * kMonotonicityMaxViolations, 0) + "%)";
  return o;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), root).generic_string();
    if (rel == "run_config.json") continue;  // records the worker count itself
    files[rel] = read_text(e.path());
  }
  return files;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("msv-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  SlotSceneParams sp;
  sp.p_empty = 0.2;
  std::string manifest = "path,label\n";
  for (int i = 0; i < kDeterminismImages; ++i) {
    const auto scene = make_slot_scene(sp, derive_seed(0xde7, static_cast<std::uint64_t>(i)));
    const std::string name = "img_" + std::to_string(i) + ".png";
    save_png(root / "corpus" / name, scene.image);
    manifest += name + "," + std::to_string(scene.label) + "\n";
  }
  write_text(root / "corpus" / "manifest.csv", manifest);
  const auto tasks = collect_tasks({(root / "corpus" / "manifest.csv").string()});
  auto model = slot_model(sp, 4);

  std::map<std::string, std::string> outputs[2];
  const int workers[2] = {1, 4};
  for (int k = 0; k < 2; ++k) {
    RunConfig cfg;
    cfg.command = "batch";
    cfg.baseline = BaselineKind::kRandomNormal;
    cfg.seed = 7;
    cfg.workers = workers[k];
    cfg.overlays = true;
    cfg.resamples = 2000;
    cfg.subsample = 10;
    cfg.out = (root / ("run" + std::to_string(workers[k]))).string();
    run_batch(model, tasks, cfg, {}, "slots_4");
    outputs[k] = read_tree(cfg.out);
  }
  std::size_t differing = 0;
  std::string first;
  for (const auto& [name, bytes] : outputs[0]) {
    auto it = outputs[1].find(name);
    if (it == outputs[1].end() || it->second != bytes) {
      ++differing;
      if (first.empty()) first = name;
    }
  }
  differing += outputs[1].size() > outputs[0].size() ? outputs[1].size() - outputs[0].size() : 0;
  const std::size_t overlays = std::count_if(outputs[0].begin(), outputs[0].end(), [](const auto& kv) {
    return kv.first.rfind("overlays/", 0) == 0;
  });
  fs::remove_all(root);
  Outcome o;
  o.passed = differing == 0 && overlays == kDeterminismImages && !outputs[0].empty();
  o.detail = std::to_string(outputs[0].size()) + " files (" + std::to_string(overlays) +
             " overlays, records.csv, summary.json, accuracy_by_count.csv) compared for 1 vs 4 workers, " +
             std::to_string(differing) + " differ";
  if (!first.empty()) o.detail += " (first: " + first + ")";
  return o;
}

Outcome query_budget() {
  std::size_t runs = 0, levels = 0, bad = 0;
  std::string first;
  for (std::size_t i = 0; i < kValidityCases; ++i) {
    const std::uint64_t seed = derive_seed(0xa11d, i);
    auto fc = make_fuzz_case(seed, i);
    GreedyConfig cfg;
    cfg.beta = fuzz_beta(i);
    cfg.split = fuzz_strategy(i, seed);
    fc.f->reset_queries();
    const auto run = greedy_msvs(*fc.f, fc.x, fc.b, cfg);
    ++runs;
    levels += run.trace.levels.size();
    const auto msg = audit_queries(run, fc.f->queries());
    if (!msg.empty()) {
      ++bad;
      if (first.empty()) first = "case " + std::to_string(i) + ": " + msg;
    }
  }
  Outcome o;
  o.passed = bad == 0;
  o.detail = std::to_string(runs) + " runs, " + std::to_string(levels) +
             " levels: every level <= beta' + 1 queries and counter == trace in " +
             std::to_string(runs - bad) + "/" + std::to_string(runs) + " runs";
  if (!first.empty()) o.detail += "; " + first;
  return o;
}

Outcome seed_robustness() {
  std::size_t invalid = 0, over = 0, changed = 0, cases = 0;
  std::size_t worst = 0;
  std::string first;
  for (int i = 0; i < kSeedRobustnessFixtures; ++i) {
    PatchSceneParams p;
    p.height = 16;
    p.width = 16;
    p.patches = 1 + i % 5;
    p.patch_height = 2 + i % 2;
    p.patch_width = 2;
    const auto scene = make_patch_scene(p, derive_seed(0x5eed, static_cast<std::uint64_t>(i)));
    auto f = EvidenceClassifier::patches(scene.patches);
    const auto b = InputTensor::filled(scene.image.shape(), 0.0f);
    std::vector<std::size_t> counts;
    for (int s = 0; s < kSeedRobustnessSeeds; ++s) {
      GreedyConfig cfg;
      cfg.beta = 16;
      cfg.split = SplitStrategy::slic_with(static_cast<std::uint64_t>(s));
      const auto run = greedy_msvs(f, scene.image, b, cfg);
      const auto rep = validate_msv_set(f, scene.image, run.set, b, cfg.split, cfg.beta);
      if (!rep.valid()) {
        ++invalid;
        if (first.empty()) first = "fixture " + std::to_string(i) + " seed " + std::to_string(s) + ": " + rep.failure;
      }
      counts.push_back(run.set.count());
    }
    ++cases;
    for (std::size_t s = 1; s < counts.size(); ++s) {
      const std::size_t delta = counts[s] > counts[0] ? counts[s] - counts[0] : counts[0] - counts[s];
      worst = std::max(worst, delta);
      if (delta > kSeedRobustnessMaxDelta) ++over;
    }
    changed += *std::max_element(counts.begin(), counts.end()) != *std::min_element(counts.begin(), counts.end());
  }
  Outcome o;
  o.passed = invalid == 0 && over == 0;
  o.detail = std::to_string(cases) + " fixtures x " + std::to_string(kSeedRobustnessSeeds) +
             " SLIC seeds: max |count - count(seed 0)| = " + std::to_string(worst) + " (allowed " +
             std::to_string(kSeedRobustnessMaxDelta) + "), " + std::to_string(changed) +
             " fixtures vary, " + std::to_string(invalid) + " invalid runs";
  if (!first.empty()) o.detail += "; " + first;
  return o;
}

}  // namespace

int main() {
  set_warning_sink(nullptr);
  const std::vector<Criterion> criteria = {
      {"definition validity suite", validity_suite},
      {"oracle equivalence", oracle_equivalence},
      {"correlation reproduction (desk scale)", correlation},
      {"accuracy-by-count trend", accuracy_trend},
      {"beta monotonicity", beta_monotonicity},
      {"determinism and replay", determinism},
      {"query-count budget", query_budget},
      {"seed robustness", seed_robustness},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << o.detail << " ("
              << fmt(secs, 1) << " s)" << std::endl;
    failed += o.passed ? 0 : 1;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed"))
            << std::endl;
  return failed ? 1 : 0;
}
