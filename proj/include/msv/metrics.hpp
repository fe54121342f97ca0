#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msv/definitions.hpp"
#include "msv/tensor.hpp"

namespace msv {

struct ImageRecord {
  std::string id;
  int predicted_class = 0;
  int remainder_class = 0;
  std::size_t msv_count = 0;
  bool degenerate = false;
  double confidence = 0.0;  // max_k p_k
  double entropy = 0.0;     // -sum p ln p
  double margin = 0.0;      // p_(1) - p_(2)
  std::optional<int> label;
  std::uint64_t queries = 0;
  std::uint64_t content_hash = 0;

  std::optional<bool> correct() const {
    if (!label) return std::nullopt;
    return *label == predicted_class;
  }
};

ImageRecord score_image(const Prediction& pred, const MsvSet* msvs, std::string id = {});
inline ImageRecord score_image(const Prediction& pred, const MsvSet& msvs, std::string id = {}) {
  return score_image(pred, &msvs, std::move(id));
}

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

struct BootstrapOptions {
  std::size_t resamples = 10000;
  double lower = 0.01;
  double upper = 0.99;
  std::uint64_t seed = 0;
};

// Percentile interval of resampled means (linear interpolation between order
// statistics). Throws DomainError on empty input.
Interval bootstrap_mean_interval(std::span<const double> values, const BootstrapOptions& opt = {});

// Draws `size` values without replacement (seeded) and bootstraps their mean.
struct SubsampleEstimate {
  double mean = 0.0;
  Interval interval;
  std::size_t size = 0;
};
SubsampleEstimate subsample_interval(std::span<const double> values, std::size_t size,
                                     const BootstrapOptions& opt = {});

// Spearman rank correlation with average ranks for ties. Returns nullopt
// when either input is constant. Throws DomainError on length mismatch or
// fewer than two points.
std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys);

// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> values);

struct AccuracyRow {
  std::string bucket;  // "1".."9", ">=10"
  std::size_t n = 0;
  double accuracy = 0.0;
  std::optional<double> half_width;  // 1.96 sqrt(p(1-p)/n); absent when n = 0
};

struct AccuracyByCountTable {
  std::array<AccuracyRow, 10> rows;
  std::size_t excluded_degenerate = 0;
  std::size_t unlabeled = 0;
};

double ci_half_width(double p, std::size_t n);

// Groups labeled records by #MSVs (1..9, >=10). Degenerate records are
// skipped unless include_degenerate is set, in which case they land in the
// bucket of their recorded count.
AccuracyByCountTable accuracy_by_count(std::span<const ImageRecord> records,
                                       bool include_degenerate = false);

enum class Metric { kMsvCount, kConfidence, kEntropy, kMargin };
inline constexpr std::array<Metric, 4> kAllMetrics = {Metric::kMsvCount, Metric::kConfidence,
                                                      Metric::kEntropy, Metric::kMargin};
const char* to_string(Metric m);
double metric_value(const ImageRecord& r, Metric m);

struct MetricEstimate {
  double mean = 0.0;
  Interval interval;
};

struct MetricSummary {
  std::string model;
  std::size_t sample_size = 0;       // records that entered the means
  std::size_t excluded_degenerate = 0;
  std::array<MetricEstimate, 4> metrics;  // indexed like kAllMetrics
  std::optional<double> accuracy;         // over labeled records, when any

  const MetricEstimate& get(Metric m) const { return metrics[static_cast<std::size_t>(m)]; }
};

// Order-independent: records are sorted by id before resampling.
// Degenerate records are excluded by default; with include_degenerate they
// count with msv_count as recorded.
MetricSummary summarize(std::string model, std::span<const ImageRecord> records,
                        const BootstrapOptions& opt = {}, bool include_degenerate = false);

struct MetricRanking {
  Metric metric;
  std::optional<double> rho;       // nullopt: undefined (constant scores)
  std::vector<std::string> order;  // models by descending score
  std::vector<double> ranks;       // average ranks by score, aligned with input
  bool has_ties = false;
};

struct RankingReport {
  std::vector<std::string> models;
  std::vector<double> accuracies;
  std::vector<MetricRanking> per_metric;
};

// Spearman rho of each metric's mean against accuracy. Throws
// ParameterError with fewer than two models or a missing accuracy.
RankingReport rank_models(std::span<const MetricSummary> summaries);

}  // namespace msv
