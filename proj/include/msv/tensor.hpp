#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace msv {

// Index of a spatial site (pixel) in row-major order, 0-based.
using Site = std::uint32_t;

struct Shape {
  int height = 1;
  int width = 1;
  int channels = 1;

  std::size_t sites() const { return static_cast<std::size_t>(height) * width; }
  std::size_t elements() const { return sites() * channels; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

// Image (or flat vector) in HWC layout with values nominally in [0, 1].
// A view addresses sites; masking a site replaces all of its channels.
class InputTensor {
 public:
  InputTensor() = default;
  InputTensor(Shape shape, std::vector<float> data);
  InputTensor(int height, int width, int channels, std::vector<float> data)
      : InputTensor(Shape{height, width, channels}, std::move(data)) {}

  // A 1 x n single-channel tensor.
  static InputTensor flat(std::vector<float> values);
  static InputTensor filled(Shape shape, float value);

  const Shape& shape() const { return shape_; }
  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  int channels() const { return shape_.channels; }
  std::size_t sites() const { return shape_.sites(); }

  std::span<const float> data() const { return data_; }
  std::span<float> mutable_data() { return data_; }

  float at(Site site, int channel = 0) const {
    return data_[static_cast<std::size_t>(site) * shape_.channels + channel];
  }
  float& at(Site site, int channel = 0) {
    return data_[static_cast<std::size_t>(site) * shape_.channels + channel];
  }

  int row(Site site) const { return static_cast<int>(site) / shape_.width; }
  int col(Site site) const { return static_cast<int>(site) % shape_.width; }

  bool operator==(const InputTensor&) const = default;

 private:
  Shape shape_;
  std::vector<float> data_;
};

// 64-bit FNV-1a over the raw float bytes and the shape.
std::uint64_t content_hash(const InputTensor& x);

enum class BaselineKind { kDatasetMean, kWhite, kBlack, kRandomNormal, kConstant };

// Recipe for the fill value b. Materialize once per image and reuse it for
// every mask of that search.
struct Baseline {
  BaselineKind kind = BaselineKind::kDatasetMean;
  // kDatasetMean: per-channel statistics; empty means mid-range gray.
  // kConstant: per-channel fill values (one value broadcasts).
  std::vector<float> values;
  // kRandomNormal parameters.
  std::uint64_t seed = 0;
  float mean = 0.5f;
  float stddev = 0.25f;

  static Baseline dataset_mean(std::vector<float> channel_means = {});
  static Baseline white();
  static Baseline black();
  static Baseline random_normal(std::uint64_t seed, float mean = 0.5f, float stddev = 0.25f);
  static Baseline constant(std::vector<float> values);

  // Produces b with the shape of `like`, clamped to [0, 1].
  // `salt` is mixed into the random seed (callers pass a per-image key).
  InputTensor materialize(const InputTensor& like, std::uint64_t salt = 0) const;
};

const char* to_string(BaselineKind kind);
BaselineKind baseline_kind_from_string(const std::string& name);

// A non-empty, sorted, duplicate-free set of sites.
class View {
 public:
  View() = default;
  // Sorts; throws DomainError when empty or when a site repeats.
  explicit View(std::vector<Site> sites);
  static View all(std::size_t n);

  std::span<const Site> sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  bool contains(Site s) const;
  bool operator==(const View&) const = default;
  auto operator<=>(const View&) const = default;

  // Throws DomainError when some site is >= n.
  void check_bounds(std::size_t n) const;

 private:
  std::vector<Site> sites_;
};

// Sorted set difference a \ b for sorted inputs.
std::vector<Site> set_difference(std::span<const Site> a, std::span<const Site> b);
bool sets_intersect(std::span<const Site> a, std::span<const Site> b);

// m(x, V): x on the listed sites, b elsewhere. `sites` may be empty and need
// not be sorted. Throws ConfigError on shape mismatch and DomainError on an
// out-of-range site.
InputTensor mask_input(const InputTensor& x, std::span<const Site> sites, const InputTensor& b);
inline InputTensor mask_input(const InputTensor& x, const View& view, const InputTensor& b) {
  return mask_input(x, view.sites(), b);
}

inline constexpr double kProbabilityTolerance = 1e-6;

// Normalized class scores with argmax (ties resolved to the lowest index).
class Prediction {
 public:
  // Throws DomainError unless K >= 2, scores >= 0 and sum(scores) = 1 +- 1e-6.
  static Prediction from_probabilities(std::vector<double> scores);
  // Numerically stable softmax.
  static Prediction from_logits(std::span<const double> logits);

  std::span<const double> scores() const { return scores_; }
  double score(int k) const { return scores_[static_cast<std::size_t>(k)]; }
  int top_class() const { return top_; }
  int num_classes() const { return static_cast<int>(scores_.size()); }

 private:
  std::vector<double> scores_;
  int top_ = 0;
};

int argmax_lowest(std::span<const double> values);

}  // namespace msv
