#include "msv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msv/error.hpp"
#include "msv/random.hpp"

namespace msv {

ImageRecord score_image(const Prediction& pred, const MsvSet* msvs, std::string id) {
  ImageRecord r;
  r.id = std::move(id);
  r.predicted_class = pred.top_class();
  std::vector<double> sorted(pred.scores().begin(), pred.scores().end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  r.confidence = sorted[0];
  r.margin = sorted[0] - sorted[1];
  double h = 0.0;
  for (double p : pred.scores()) {
    if (p > 0.0) h -= p * std::log(p);
  }
  r.entropy = std::max(0.0, h);
  if (msvs) {
    r.msv_count = msvs->count();
    r.degenerate = msvs->degenerate;
    r.remainder_class = msvs->remainder_class;
  } else {
    r.degenerate = true;
    r.remainder_class = r.predicted_class;
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

}  // namespace

Interval bootstrap_mean_interval(std::span<const double> values, const BootstrapOptions& opt) {
  if (values.empty()) throw DomainError("bootstrap needs at least one value");
  if (opt.resamples == 0) throw ParameterError("bootstrap needs at least one resample");
  if (!(opt.lower >= 0.0 && opt.lower <= opt.upper && opt.upper <= 1.0)) {
    throw ParameterError("bootstrap percentiles must satisfy 0 <= lower <= upper <= 1");
  }
  const std::size_t n = values.size();
  Rng rng(opt.seed);
  std::vector<double> means(opt.resamples);
  for (auto& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += values[uniform_index(rng, n)];
    m = sum / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  return {percentile(means, opt.lower), percentile(means, opt.upper)};
}

SubsampleEstimate subsample_interval(std::span<const double> values, std::size_t size,
                                     const BootstrapOptions& opt) {
  if (size == 0 || size > values.size()) {
    throw ParameterError("subsample size must lie in [1, " + std::to_string(values.size()) + "]");
  }
  std::vector<double> pool(values.begin(), values.end());
  Rng rng(derive_seed(opt.seed, 1));
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(size);
  SubsampleEstimate est;
  est.size = size;
  est.mean = std::accumulate(pool.begin(), pool.end(), 0.0) / static_cast<double>(size);
  est.interval = bootstrap_mean_interval(pool, opt);
  return est;
}

// ---------------------------------------------------------------------------

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DomainError("spearman inputs differ in length");
  if (xs.size() < 2) throw DomainError("spearman needs at least two points");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// ---------------------------------------------------------------------------

double ci_half_width(double p, std::size_t n) {
  if (n == 0) throw DomainError("confidence interval of an empty group");
  return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

AccuracyByCountTable accuracy_by_count(std::span<const ImageRecord> records,
                                       bool include_degenerate) {
  AccuracyByCountTable table;
  std::array<std::size_t, 10> hits{};
  for (std::size_t i = 0; i < 10; ++i) {
    table.rows[i].bucket = i < 9 ? std::to_string(i + 1) : ">=10";
  }
  for (const auto& r : records) {
    if (r.degenerate && !include_degenerate) {
      ++table.excluded_degenerate;
      continue;
    }
    if (!r.label) {
      ++table.unlabeled;
      continue;
    }
    if (r.msv_count == 0) continue;
    const std::size_t bucket = std::min<std::size_t>(r.msv_count, 10) - 1;
    ++table.rows[bucket].n;
    hits[bucket] += *r.correct() ? 1 : 0;
  }
  for (std::size_t i = 0; i < 10; ++i) {
    auto& row = table.rows[i];
    if (row.n == 0) continue;
    row.accuracy = static_cast<double>(hits[i]) / static_cast<double>(row.n);
    row.half_width = ci_half_width(row.accuracy, row.n);
  }
  return table;
}

// ---------------------------------------------------------------------------

const char* to_string(Metric m) {
  switch (m) {
    case Metric::kMsvCount:
      return "msv_count";
    case Metric::kConfidence:
      return "confidence";
    case Metric::kEntropy:
      return "entropy";
    case Metric::kMargin:
      return "margin";
  }
  return "unknown";
}

double metric_value(const ImageRecord& r, Metric m) {
  switch (m) {
    case Metric::kMsvCount:
      return static_cast<double>(r.msv_count);
    case Metric::kConfidence:
      return r.confidence;
    case Metric::kEntropy:
      return r.entropy;
    case Metric::kMargin:
      return r.margin;
  }
  return 0.0;
}

MetricSummary summarize(std::string model, std::span<const ImageRecord> records,
                        const BootstrapOptions& opt, bool include_degenerate) {
  std::vector<const ImageRecord*> kept;
  MetricSummary s;
  s.model = std::move(model);
  for (const auto& r : records) {
    if (r.degenerate && !include_degenerate) {
      ++s.excluded_degenerate;
    } else {
      kept.push_back(&r);
    }
  }
  std::sort(kept.begin(), kept.end(), [](const ImageRecord* a, const ImageRecord* b) {
    if (a->id != b->id) return a->id < b->id;
    return a->content_hash < b->content_hash;
  });
  s.sample_size = kept.size();
  std::size_t labeled = 0, correct = 0;
  for (const auto* r : kept) {
    if (auto c = r->correct()) {
      ++labeled;
      correct += *c ? 1 : 0;
    }
  }
  if (labeled > 0) s.accuracy = static_cast<double>(correct) / static_cast<double>(labeled);
  if (kept.empty()) return s;

  for (std::size_t mi = 0; mi < kAllMetrics.size(); ++mi) {
    std::vector<double> values;
    values.reserve(kept.size());
    for (const auto* r : kept) values.push_back(metric_value(*r, kAllMetrics[mi]));
    auto& est = s.metrics[mi];
    est.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    BootstrapOptions per = opt;
    per.seed = derive_seed(opt.seed, mi);
    est.interval = bootstrap_mean_interval(values, per);
  }
  return s;
}

RankingReport rank_models(std::span<const MetricSummary> summaries) {
  if (summaries.size() < 2) throw ParameterError("ranking needs at least two models");
  RankingReport report;
  for (const auto& s : summaries) {
    if (!s.accuracy) throw ParameterError("model '" + s.model + "' has no accuracy");
    report.models.push_back(s.model);
    report.accuracies.push_back(*s.accuracy);
  }
  for (Metric m : kAllMetrics) {
    MetricRanking r;
    r.metric = m;
    std::vector<double> scores;
    for (const auto& s : summaries) scores.push_back(s.get(m).mean);
    r.rho = spearman(scores, report.accuracies);
    r.ranks = average_ranks(scores);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    for (std::size_t i : order) r.order.push_back(summaries[i].model);
    auto sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    r.has_ties = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
    report.per_metric.push_back(std::move(r));
  }
  return report;
}

}  // namespace msv
