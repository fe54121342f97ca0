#include "msv/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "msv/error.hpp"

namespace msv {

std::vector<Prediction> Classifier::classify_batch(std::span<const InputTensor> batch) {
  if (batch.empty()) return {};
  if (const auto shape = input_shape()) {
    for (const auto& x : batch) {
      if (x.shape() != *shape) {
        throw ConfigError(describe() + " expects input " + shape->str() + ", got " +
                          x.shape().str());
      }
    }
  }
  queries_.fetch_add(batch.size(), std::memory_order_relaxed);
  auto out = do_classify(batch);
  if (out.size() != batch.size()) {
    throw BackendError(describe() + " returned " + std::to_string(out.size()) +
                       " predictions for a batch of " + std::to_string(batch.size()));
  }
  return out;
}

Prediction Classifier::classify(const InputTensor& x) {
  return classify_batch(std::span<const InputTensor>(&x, 1)).front();
}

namespace {

double channel_mean(const InputTensor& x, Site s) {
  double sum = 0.0;
  for (int c = 0; c < x.channels(); ++c) sum += x.at(s, c);
  return sum / x.channels();
}

void check_sites(const std::vector<std::vector<Site>>& patterns, const InputTensor& x,
                 const std::string& who) {
  for (const auto& p : patterns) {
    for (Site s : p) {
      if (s >= x.sites()) {
        throw ConfigError(who + " references site " + std::to_string(s) + " but the input has " +
                          std::to_string(x.sites()) + " sites");
      }
    }
  }
}

std::string list_patterns(const std::vector<std::vector<Site>>& patterns) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    os << (i ? ",{" : "{");
    for (std::size_t j = 0; j < patterns[i].size(); ++j) os << (j ? "," : "") << patterns[i][j];
    os << '}';
  }
  os << ']';
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

SinglePixelClassifier::SinglePixelClassifier(Site site, double threshold, double gain)
    : site_(site), threshold_(threshold), gain_(gain) {
  if (!(gain > 0.0)) throw ParameterError("single-pixel gain must be positive");
}

std::string SinglePixelClassifier::describe() const {
  return "single-pixel(site=" + std::to_string(site_) + ")";
}

std::vector<Prediction> SinglePixelClassifier::do_classify(std::span<const InputTensor> batch) {
  std::vector<Prediction> out;
  out.reserve(batch.size());
  for (const auto& x : batch) {
    if (site_ >= x.sites()) throw ConfigError(describe() + " does not fit input " + x.shape().str());
    const double v = channel_mean(x, site_);
    // At v == threshold both logits are 0 and the tie goes to class 0.
    const double logits[2] = {0.0, gain_ * (v - threshold_)};
    out.push_back(Prediction::from_logits(logits));
  }
  return out;
}

// ---------------------------------------------------------------------------

EvidenceClassifier::EvidenceClassifier(Kind kind, std::vector<std::vector<Site>> patterns,
                                       EvidenceScoring scoring)
    : kind_(kind), patterns_(std::move(patterns)), scoring_(scoring) {
  if (patterns_.empty()) throw ParameterError("evidence classifier needs at least one pattern");
  for (auto& p : patterns_) {
    if (p.empty()) throw ParameterError("evidence patterns must be non-empty");
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
  if (!(scoring_.gain > 0.0) || !(scoring_.noise >= 0.0) || !(scoring_.noise < scoring_.gain / 2)) {
    throw ParameterError("evidence scoring needs gain > 0 and 0 <= noise < gain / 2");
  }
  if (kind_ == Kind::kPatch) {
    for (std::size_t i = 0; i < patterns_.size(); ++i) {
      for (std::size_t j = i + 1; j < patterns_.size(); ++j) {
        if (sets_intersect(patterns_[i], patterns_[j])) {
          throw ParameterError("patch evidence requires pairwise-disjoint patches");
        }
      }
    }
  }
}

EvidenceClassifier EvidenceClassifier::patches(std::vector<std::vector<Site>> patches,
                                               EvidenceScoring scoring) {
  return EvidenceClassifier(Kind::kPatch, std::move(patches), scoring);
}

EvidenceClassifier EvidenceClassifier::overlap(std::vector<std::vector<Site>> clauses,
                                               EvidenceScoring scoring) {
  return EvidenceClassifier(Kind::kOverlap, std::move(clauses), scoring);
}

double EvidenceClassifier::closed_form_probability(int intact, double lit_fraction) const {
  const double logit = scoring_.gain * (intact - 0.5) + scoring_.noise * lit_fraction;
  return 1.0 / (1.0 + std::exp(-logit));
}

std::string EvidenceClassifier::describe() const {
  return std::string(kind_ == Kind::kPatch ? "patch-evidence" : "overlap-evidence") +
         list_patterns(patterns_);
}

std::vector<Prediction> EvidenceClassifier::do_classify(std::span<const InputTensor> batch) {
  std::vector<Prediction> out;
  out.reserve(batch.size());
  for (const auto& x : batch) {
    check_sites(patterns_, x, describe());
    int intact = 0;
    double lit_fraction = 0.0;
    for (const auto& p : patterns_) {
      std::size_t lit = 0;
      for (Site s : p) lit += channel_mean(x, s) > scoring_.threshold ? 1 : 0;
      if (lit == p.size()) ++intact;
      lit_fraction += static_cast<double>(lit) / static_cast<double>(p.size());
    }
    lit_fraction /= static_cast<double>(patterns_.size());
    const double logits[2] = {0.0, scoring_.gain * (intact - 0.5) + scoring_.noise * lit_fraction};
    out.push_back(Prediction::from_logits(logits));
  }
  return out;
}

std::size_t evidence_count(const EvidenceClassifier& c) {
  const auto& patterns = c.patterns();
  if (c.kind() == EvidenceClassifier::Kind::kPatch) return patterns.size();
  const std::size_t m = patterns.size();
  if (m > 20) throw ParameterError("evidence_count enumerates at most 20 overlap clauses");
  std::size_t best = 0;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    const auto count = static_cast<std::size_t>(std::popcount(mask));
    if (count <= best) continue;
    bool disjoint = true;
    for (std::size_t i = 0; i < m && disjoint; ++i) {
      if (!(mask >> i & 1u)) continue;
      for (std::size_t j = i + 1; j < m && disjoint; ++j) {
        if ((mask >> j & 1u) && sets_intersect(patterns[i], patterns[j])) disjoint = false;
      }
    }
    if (disjoint) best = count;
  }
  return best;
}

// ---------------------------------------------------------------------------

ConstantClassifier::ConstantClassifier(int label, int num_classes)
    : label_(label), num_classes_(num_classes) {
  if (num_classes < 2 || label < 0 || label >= num_classes) {
    throw ParameterError("constant classifier label out of range");
  }
}

std::string ConstantClassifier::describe() const {
  return "constant(" + std::to_string(label_) + ")";
}

std::vector<Prediction> ConstantClassifier::do_classify(std::span<const InputTensor> batch) {
  std::vector<double> onehot(static_cast<std::size_t>(num_classes_), 0.0);
  onehot[static_cast<std::size_t>(label_)] = 1.0;
  return std::vector<Prediction>(batch.size(), Prediction::from_probabilities(onehot));
}

// ---------------------------------------------------------------------------

SlotVoteClassifier::SlotVoteClassifier(std::vector<std::vector<Site>> slots, double activation,
                                       double gain, double nothing_logit, Pooling pooling)
    : slots_(std::move(slots)),
      activation_(activation),
      gain_(gain),
      nothing_logit_(nothing_logit),
      pooling_(pooling) {
  if (slots_.empty()) throw ParameterError("slot vote needs at least one slot");
  for (const auto& s : slots_) {
    if (s.empty()) throw ParameterError("slots must be non-empty");
  }
  if (!(nothing_logit_ < activation_)) {
    throw ParameterError("slot vote needs nothing_logit < activation");
  }
}

std::string SlotVoteClassifier::describe() const {
  return std::string(pooling_ == Pooling::kMax ? "slot-vote-max" : "slot-vote") +
         list_patterns(slots_);
}

std::vector<Prediction> SlotVoteClassifier::do_classify(std::span<const InputTensor> batch) {
  std::vector<Prediction> out;
  out.reserve(batch.size());
  for (const auto& x : batch) {
    if (x.channels() != kColorClasses) {
      throw ConfigError("slot vote expects a 3-channel input, got " + x.shape().str());
    }
    check_sites(slots_, x, describe());
    double votes[kColorClasses] = {0.0, 0.0, 0.0};
    for (const auto& slot : slots_) {
      for (int j = 0; j < kColorClasses; ++j) {
        double sum = 0.0;
        for (Site s : slot) sum += x.at(s, j);
        const double e = sum / static_cast<double>(slot.size());
        if (e <= activation_) continue;
        votes[j] = pooling_ == Pooling::kSum ? votes[j] + e : std::max(votes[j], e);
      }
    }
    double logits[kColorClasses + 1] = {gain_ * votes[0], gain_ * votes[1], gain_ * votes[2],
                                        gain_ * nothing_logit_};
    out.push_back(Prediction::from_logits(logits));
  }
  return out;
}

// ---------------------------------------------------------------------------

FunctionClassifier::FunctionClassifier(int num_classes, Fn fn, std::string name)
    : num_classes_(num_classes), fn_(std::move(fn)), name_(std::move(name)) {
  if (num_classes < 2) throw ParameterError("a classifier needs at least two classes");
}

std::vector<Prediction> FunctionClassifier::do_classify(std::span<const InputTensor> batch) {
  std::vector<Prediction> out;
  out.reserve(batch.size());
  for (const auto& x : batch) {
    auto scores = fn_(x);
    if (static_cast<int>(scores.size()) != num_classes_) {
      throw BackendError(name_ + " returned " + std::to_string(scores.size()) + " scores");
    }
    out.push_back(Prediction::from_probabilities(std::move(scores)));
  }
  return out;
}

// ---------------------------------------------------------------------------

DetectionAdapter::DetectionAdapter(BoxProbability p_det, double xi)
    : p_det_(std::move(p_det)), xi_(xi) {
  if (!(xi > 0.0 && xi < 1.0)) throw ParameterError("detection threshold must lie in (0, 1)");
  if (!p_det_) throw ParameterError("detection adapter needs a box-probability extractor");
}

std::string DetectionAdapter::describe() const {
  return "detection(xi=" + std::to_string(xi_) + ")";
}

std::vector<Prediction> DetectionAdapter::do_classify(std::span<const InputTensor> batch) {
  std::vector<Prediction> out;
  out.reserve(batch.size());
  for (const auto& x : batch) {
    const double raw = p_det_(x);
    if (!std::isfinite(raw)) throw BackendError("detector returned a non-finite probability");
    const double p = std::clamp(raw, 0.0, 1.0);
    const double total = p + xi_;
    out.push_back(Prediction::from_probabilities({p / total, xi_ / total}));
  }
  return out;
}

}  // namespace msv
