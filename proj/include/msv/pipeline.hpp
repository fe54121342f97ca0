#pragma once

// The work behind the CLI subcommands: configuration, model loading,
// per-image explanation, corpus batches and model ranking.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "msv/classifier.hpp"
#include "msv/greedy.hpp"
#include "msv/metrics.hpp"
#include "msv/reports.hpp"
#include "msv/split.hpp"
#include "msv/tensor.hpp"

namespace msv {

inline constexpr const char* kRunConfigSchema = "msv-run-config/1";

// Everything a run depends on. Echoed as run_config.json; feeding that file
// back through --config reproduces the run.
struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::string model;
  std::string meta;  // sidecar; empty: <model stem>.json next to an .onnx model
  int beta = 16;
  SplitKind split = SplitKind::kSlic;
  SlicParams slic;
  std::uint64_t seed = 0;
  BaselineKind baseline = BaselineKind::kDatasetMean;
  std::vector<float> baseline_values;  // constant baseline
  std::string out = "msv-out";
  int workers = 1;
  std::size_t resamples = 10000;
  std::size_t subsample = 0;  // 0: no sub-sampling study
  double xi = 0.25;
  std::size_t max_views = 0;
  bool overlays = false;  // batch only; explain always renders
  bool include_degenerate = false;
  bool strict_minimality = false;
  bool debug_highest_tiebreak = false;

  nlohmann::json to_json() const;
  // Keys absent from `j` keep their current values. Throws ConfigError on
  // unknown keys or wrong types.
  void merge_json(const nlohmann::json& j);

  GreedyConfig greedy() const;
  Baseline baseline_recipe(const std::vector<float>& dataset_mean) const;
};

struct LoadedModel {
  std::unique_ptr<Classifier> classifier;
  std::vector<float> dataset_mean;
  std::string name;  // model file stem
};

// .json files are synthetic models, anything else is ONNX with a sidecar.
// Throws BackendError when the model or sidecar cannot be loaded.
LoadedModel load_model(const RunConfig& cfg);

struct Explanation {
  std::string id;
  InputTensor image;
  InputTensor baseline;
  Prediction reference;
  MsvResult result;
  ImageRecord record;
};

// One greedy run. The baseline is materialized once, salted with the image
// content hash so random baselines do not depend on scheduling.
Explanation explain_image(Classifier& f, const InputTensor& x, const RunConfig& cfg,
                          const std::vector<float>& dataset_mean, std::string id,
                          std::optional<int> label = std::nullopt);

nlohmann::json explanation_json(const Explanation& e, const Classifier& f);

// Writes <stem>.json, <stem>_overlay.png and <stem>_view<i>.png into `dir`.
void write_explanation(const Explanation& e, const Classifier& f, const std::filesystem::path& dir,
                       const std::string& stem);

// File-name-safe form of an image id.
std::string safe_stem(const std::string& id);

struct ImageTask {
  std::string id;
  std::filesystem::path path;
  std::optional<int> label;
};

// Manifest: a header line ("path,label") then one "path[,label]" per line,
// paths relative to the manifest. Throws InputError on malformed lines.
std::vector<ImageTask> read_manifest(const std::filesystem::path& manifest);

// Expands images, directories (PNG/JPEG files, sorted) and manifests
// (.csv/.txt) into tasks.
std::vector<ImageTask> collect_tasks(const std::vector<std::string>& inputs);

struct BatchResult {
  std::vector<BatchRow> rows;  // sorted by (id, content hash)
  std::size_t reused = 0;
  std::size_t failed = 0;
  MetricSummary summary;
  std::optional<AccuracyByCountTable> accuracy_table;
  std::optional<std::vector<SubsampleEstimate>> subsample;  // one per metric
};

// Scores every task with cfg.workers threads and writes records.csv,
// summary.json, accuracy_by_count.csv (when labeled), overlays/ (when
// enabled) and run_config.json to cfg.out. Rows of an existing records.csv
// in cfg.out are reused by content hash.
BatchResult run_batch(Classifier& f, const std::vector<ImageTask>& tasks, const RunConfig& cfg,
                      const std::vector<float>& dataset_mean, const std::string& model_name);

struct RankResult {
  RankingReport report;
  std::vector<MetricSummary> summaries;
};

// Reads <dir>/summary.json for every run directory, writes ranking.json and
// rank_plot.csv to `out`. Throws ParameterError with fewer than two runs and
// InputError naming the first missing summary.
RankResult run_rank(const std::vector<std::filesystem::path>& run_dirs,
                    const std::filesystem::path& out);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace msv
