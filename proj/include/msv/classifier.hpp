#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msv/tensor.hpp"

namespace msv {

// The black-box boundary f: input -> K class probabilities.
//
// classify_batch() may be called from several threads at once; backends
// that are not reentrant serialize internally. Every input counts as one
// query, whether or not it arrived in a batch.
class Classifier {
 public:
  Classifier() = default;
  // Copies start with the source's query count.
  Classifier(const Classifier& other) : queries_(other.queries()) {}
  Classifier& operator=(const Classifier&) = delete;
  virtual ~Classifier() = default;

  std::vector<Prediction> classify_batch(std::span<const InputTensor> batch);
  Prediction classify(const InputTensor& x);

  std::uint64_t queries() const { return queries_.load(std::memory_order_relaxed); }
  void reset_queries() { queries_.store(0, std::memory_order_relaxed); }

  virtual int num_classes() const = 0;
  // Shape the classifier accepts, when it is fixed.
  virtual std::optional<Shape> input_shape() const { return std::nullopt; }
  virtual std::string describe() const = 0;

 protected:
  virtual std::vector<Prediction> do_classify(std::span<const InputTensor> batch) = 0;

 private:
  std::atomic<std::uint64_t> queries_{0};
};

// ---------------------------------------------------------------------------
// Synthetic classifiers. A site "lights" when the mean of its channels is
// strictly above `threshold`; evidence patterns are index sets over sites.

struct EvidenceScoring {
  double threshold = 0.75;  // site lit iff channel mean > threshold
  double gain = 4.0;        // logit per intact pattern
  double noise = 1.0;       // weight of the partial-evidence term, < gain / 2
};

// Two classes. Class 1 iff x[site] > threshold.
class SinglePixelClassifier final : public Classifier {
 public:
  SinglePixelClassifier(Site site, double threshold = 0.5, double gain = 8.0);
  int num_classes() const override { return 2; }
  std::string describe() const override;

 protected:
  std::vector<Prediction> do_classify(std::span<const InputTensor> batch) override;

 private:
  Site site_;
  double threshold_;
  double gain_;
};

// Two classes. With c = number of fully lit patterns and q = mean lit
// fraction over all patterns, the class-1 logit is gain * (c - 1/2) + noise * q
// and the class-0 logit is 0, so class 1 holds iff at least one pattern is
// intact. Masking lit sites to a dark baseline can only lower f_1.
//
// PatchEvidence uses pairwise-disjoint patches; OverlapEvidence allows
// clauses that share sites.
class EvidenceClassifier final : public Classifier {
 public:
  enum class Kind { kPatch, kOverlap };

  EvidenceClassifier(Kind kind, std::vector<std::vector<Site>> patterns,
                     EvidenceScoring scoring = {});

  static EvidenceClassifier patches(std::vector<std::vector<Site>> patches,
                                    EvidenceScoring scoring = {});
  static EvidenceClassifier overlap(std::vector<std::vector<Site>> clauses,
                                    EvidenceScoring scoring = {});

  Kind kind() const { return kind_; }
  const std::vector<std::vector<Site>>& patterns() const { return patterns_; }
  const EvidenceScoring& scoring() const { return scoring_; }

  // Class-1 probability of the closed form, given c intact patterns and
  // mean lit fraction q.
  double closed_form_probability(int intact, double lit_fraction) const;

  int num_classes() const override { return 2; }
  std::string describe() const override;

 protected:
  std::vector<Prediction> do_classify(std::span<const InputTensor> batch) override;

 private:
  Kind kind_;
  std::vector<std::vector<Site>> patterns_;
  EvidenceScoring scoring_;
};

// Number of designed independent sufficient views: the size of a largest
// family of pairwise-disjoint patterns (brute force for overlap clauses).
std::size_t evidence_count(const EvidenceClassifier& c);

// Always predicts `label`, one-hot.
class ConstantClassifier final : public Classifier {
 public:
  explicit ConstantClassifier(int label, int num_classes = 2);
  int num_classes() const override { return num_classes_; }
  std::string describe() const override;

 protected:
  std::vector<Prediction> do_classify(std::span<const InputTensor> batch) override;

 private:
  int label_;
  int num_classes_;
};

// Multi-class slot vote over an RGB image. A slot votes for color j in
// {0,1,2} with strength e when its mean channel-j value e exceeds
// `activation`; class j's logit is gain times the sum (kSum) or the maximum
// (kMax) of its votes. Class 3 ("nothing") has a constant logit. Used to
// build model families whose accuracy and evidence count co-vary.
class SlotVoteClassifier final : public Classifier {
 public:
  static constexpr int kColorClasses = 3;
  static constexpr int kNothingClass = 3;
  enum class Pooling { kSum, kMax };

  SlotVoteClassifier(std::vector<std::vector<Site>> slots, double activation = 0.5,
                     double gain = 6.0, double nothing_logit = 0.3,
                     Pooling pooling = Pooling::kSum);
  int num_classes() const override { return kColorClasses + 1; }
  std::string describe() const override;
  const std::vector<std::vector<Site>>& slots() const { return slots_; }
  double activation() const { return activation_; }
  double gain() const { return gain_; }
  double nothing_logit() const { return nothing_logit_; }
  Pooling pooling() const { return pooling_; }

 protected:
  std::vector<Prediction> do_classify(std::span<const InputTensor> batch) override;

 private:
  std::vector<std::vector<Site>> slots_;
  double activation_;
  double gain_;
  double nothing_logit_;
  Pooling pooling_;
};

// Wraps an arbitrary function from input to probabilities.
class FunctionClassifier final : public Classifier {
 public:
  using Fn = std::function<std::vector<double>(const InputTensor&)>;
  FunctionClassifier(int num_classes, Fn fn, std::string name = "function");
  int num_classes() const override { return num_classes_; }
  std::string describe() const override { return name_; }

 protected:
  std::vector<Prediction> do_classify(std::span<const InputTensor> batch) override;

 private:
  int num_classes_;
  Fn fn_;
  std::string name_;
};

// Turns a detector into a two-class classifier f(x) = (p_det(x), xi).
// Class 0 ("detected") iff p_det(x) >= xi, class 1 otherwise. Scores are
// (p_det, xi) / (p_det + xi) so they sum to one with the same argmax.
class DetectionAdapter final : public Classifier {
 public:
  using BoxProbability = std::function<double(const InputTensor&)>;
  static constexpr double kDefaultThreshold = 0.25;

  explicit DetectionAdapter(BoxProbability p_det, double xi = kDefaultThreshold);
  int num_classes() const override { return 2; }
  std::string describe() const override;
  double threshold() const { return xi_; }

 protected:
  std::vector<Prediction> do_classify(std::span<const InputTensor> batch) override;

 private:
  BoxProbability p_det_;
  double xi_;
};

}  // namespace msv
