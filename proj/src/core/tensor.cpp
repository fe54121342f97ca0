#include "msv/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <numeric>

#include "msv/error.hpp"
#include "msv/random.hpp"
#include "msv/simd.hpp"

namespace msv {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& sink() {
  static WarningSink s = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
  return s;
}

}  // namespace

void set_warning_sink(WarningSink s) {
  std::lock_guard lock(sink_mutex());
  sink() = std::move(s);
}

void warn(const std::string& message) {
  std::lock_guard lock(sink_mutex());
  if (sink()) sink()(message);
}

std::string Shape::str() const {
  return std::to_string(height) + "x" + std::to_string(width) + "x" + std::to_string(channels);
}

InputTensor::InputTensor(Shape shape, std::vector<float> data)
    : shape_(shape), data_(std::move(data)) {
  if (shape_.height < 1 || shape_.width < 1 || shape_.channels < 1) {
    throw DomainError("tensor shape must be positive, got " + shape_.str());
  }
  if (data_.size() != shape_.elements()) {
    throw ConfigError("tensor data has " + std::to_string(data_.size()) +
                      " values, shape " + shape_.str() + " needs " +
                      std::to_string(shape_.elements()));
  }
  for (float v : data_) {
    if (!std::isfinite(v)) throw DomainError("tensor values must be finite");
  }
}

InputTensor InputTensor::flat(std::vector<float> values) {
  const int n = static_cast<int>(values.size());
  return InputTensor(Shape{1, n, 1}, std::move(values));
}

InputTensor InputTensor::filled(Shape shape, float value) {
  return InputTensor(shape, std::vector<float>(shape.elements(), value));
}

std::uint64_t content_hash(const InputTensor& x) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* p, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const int dims[3] = {x.height(), x.width(), x.channels()};
  feed(dims, sizeof dims);
  feed(x.data().data(), x.data().size_bytes());
  return h;
}

// ---------------------------------------------------------------------------
// Baseline

Baseline Baseline::dataset_mean(std::vector<float> channel_means) {
  Baseline b;
  b.kind = BaselineKind::kDatasetMean;
  b.values = std::move(channel_means);
  return b;
}

Baseline Baseline::white() {
  Baseline b;
  b.kind = BaselineKind::kWhite;
  return b;
}

Baseline Baseline::black() {
  Baseline b;
  b.kind = BaselineKind::kBlack;
  return b;
}

Baseline Baseline::random_normal(std::uint64_t seed, float mean, float stddev) {
  Baseline b;
  b.kind = BaselineKind::kRandomNormal;
  b.seed = seed;
  b.mean = mean;
  b.stddev = stddev;
  return b;
}

Baseline Baseline::constant(std::vector<float> values) {
  Baseline b;
  b.kind = BaselineKind::kConstant;
  b.values = std::move(values);
  return b;
}

namespace {

std::vector<float> per_channel(const std::vector<float>& values, int channels, const char* what) {
  if (values.size() == 1) return std::vector<float>(static_cast<std::size_t>(channels), values[0]);
  if (values.size() != static_cast<std::size_t>(channels)) {
    throw ConfigError(std::string(what) + " has " + std::to_string(values.size()) +
                      " channel values, input has " + std::to_string(channels));
  }
  return values;
}

}  // namespace

InputTensor Baseline::materialize(const InputTensor& like, std::uint64_t salt) const {
  const Shape shape = like.shape();
  std::vector<float> data(shape.elements());
  auto fill_channels = [&](const std::vector<float>& ch) {
    for (std::size_t s = 0; s < shape.sites(); ++s) {
      for (int c = 0; c < shape.channels; ++c) data[s * shape.channels + c] = ch[c];
    }
  };
  switch (kind) {
    case BaselineKind::kDatasetMean:
      if (values.empty()) {
        warn("no dataset statistics supplied; using mid-range gray (0.5) as the mean baseline");
        std::fill(data.begin(), data.end(), 0.5f);
      } else {
        fill_channels(per_channel(values, shape.channels, "dataset mean"));
      }
      break;
    case BaselineKind::kWhite:
      std::fill(data.begin(), data.end(), 1.0f);
      break;
    case BaselineKind::kBlack:
      std::fill(data.begin(), data.end(), 0.0f);
      break;
    case BaselineKind::kRandomNormal: {
      if (!(stddev >= 0.0f) || !std::isfinite(mean)) {
        throw ParameterError("random baseline needs finite mean and stddev >= 0");
      }
      Rng rng(derive_seed(seed, salt));
      for (auto& v : data) v = static_cast<float>(mean + stddev * standard_normal(rng));
      break;
    }
    case BaselineKind::kConstant:
      if (values.empty()) throw ConfigError("constant baseline needs at least one value");
      fill_channels(per_channel(values, shape.channels, "constant baseline"));
      break;
  }
  for (auto& v : data) v = std::clamp(v, 0.0f, 1.0f);
  return InputTensor(shape, std::move(data));
}

const char* to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kDatasetMean:
      return "mean";
    case BaselineKind::kWhite:
      return "white";
    case BaselineKind::kBlack:
      return "black";
    case BaselineKind::kRandomNormal:
      return "random";
    case BaselineKind::kConstant:
      return "constant";
  }
  return "unknown";
}

BaselineKind baseline_kind_from_string(const std::string& name) {
  if (name == "mean") return BaselineKind::kDatasetMean;
  if (name == "white") return BaselineKind::kWhite;
  if (name == "black") return BaselineKind::kBlack;
  if (name == "random") return BaselineKind::kRandomNormal;
  if (name == "constant") return BaselineKind::kConstant;
  throw ParameterError("unknown baseline '" + name + "'");
}

// ---------------------------------------------------------------------------
// View

View::View(std::vector<Site> sites) : sites_(std::move(sites)) {
  if (sites_.empty()) throw DomainError("a view must contain at least one site");
  std::sort(sites_.begin(), sites_.end());
  if (std::adjacent_find(sites_.begin(), sites_.end()) != sites_.end()) {
    throw DomainError("a view must not repeat a site");
  }
}

View View::all(std::size_t n) {
  std::vector<Site> s(n);
  std::iota(s.begin(), s.end(), Site{0});
  return View(std::move(s));
}

bool View::contains(Site s) const { return std::binary_search(sites_.begin(), sites_.end(), s); }

void View::check_bounds(std::size_t n) const {
  if (!sites_.empty() && sites_.back() >= n) {
    throw DomainError("site " + std::to_string(sites_.back()) + " out of range for " +
                      std::to_string(n) + " sites");
  }
}

std::vector<Site> set_difference(std::span<const Site> a, std::span<const Site> b) {
  std::vector<Site> out;
  out.reserve(a.size());
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool sets_intersect(std::span<const Site> a, std::span<const Site> b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

InputTensor mask_input(const InputTensor& x, std::span<const Site> sites, const InputTensor& b) {
  if (x.shape() != b.shape()) {
    throw ConfigError("baseline shape " + b.shape().str() + " does not match input " +
                      x.shape().str());
  }
  const std::size_t n = x.sites();
  const int channels = x.channels();
  std::vector<std::uint8_t> keep(x.shape().elements(), 0);
  for (Site s : sites) {
    if (s >= n) {
      throw DomainError("site " + std::to_string(s) + " out of range for " + std::to_string(n) +
                        " sites");
    }
    std::fill_n(keep.begin() + static_cast<std::ptrdiff_t>(s) * channels, channels, 1);
  }
  std::vector<float> out(keep.size());
  simd::active().blend(x.data(), b.data(), keep, out);
  return InputTensor(x.shape(), std::move(out));
}

// ---------------------------------------------------------------------------
// Prediction

int argmax_lowest(std::span<const double> values) {
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

Prediction Prediction::from_probabilities(std::vector<double> scores) {
  if (scores.size() < 2) throw DomainError("a prediction needs at least two classes");
  double sum = 0.0;
  for (double s : scores) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw DomainError("class scores must be finite and nonnegative");
    }
    sum += s;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    throw DomainError("class scores sum to " + std::to_string(sum) + ", expected 1");
  }
  Prediction p;
  p.top_ = argmax_lowest(scores);
  p.scores_ = std::move(scores);
  return p;
}

Prediction Prediction::from_logits(std::span<const double> logits) {
  if (logits.size() < 2) throw DomainError("a prediction needs at least two classes");
  const double peak = *std::max_element(logits.begin(), logits.end());
  if (!std::isfinite(peak)) throw DomainError("logits must be finite");
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - peak);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return from_probabilities(std::move(p));
}

}  // namespace msv
