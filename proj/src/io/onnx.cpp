#include "msv/onnx.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <opencv2/dnn.hpp>
#include <opencv2/imgproc.hpp>

#include "msv/error.hpp"

namespace msv {

using nlohmann::json;

namespace {

std::vector<float> read_triplet(const json& j, const char* key, int channels) {
  auto v = j.at(key).get<std::vector<float>>();
  if (v.size() == 1) v.assign(static_cast<std::size_t>(channels), v[0]);
  if (v.size() != static_cast<std::size_t>(channels)) {
    throw ConfigError(std::string("normalization.") + key + " needs " + std::to_string(channels) +
                      " values");
  }
  return v;
}

}  // namespace

ModelMeta parse_model_meta(const std::string& json_text) {
  ModelMeta meta;
  try {
    const json j = json::parse(json_text);
    if (j.value("schema", "") != kModelMetaSchema) {
      throw ConfigError("model sidecar schema must be '" + std::string(kModelMetaSchema) + "'");
    }
    auto& pre = meta.preprocessing;
    const json& in = j.at("input");
    pre.height = in.value("height", 0);
    pre.width = in.value("width", 0);
    pre.channels = in.value("channels", 3);
    if (pre.height < 0 || pre.width < 0 || (pre.channels != 1 && pre.channels != 3)) {
      throw ConfigError("model sidecar input size is invalid");
    }
    const std::string order = in.value("channel_order", "rgb");
    if (order != "rgb" && order != "bgr") throw ConfigError("channel_order must be rgb or bgr");
    pre.bgr = order == "bgr";
    const std::string layout = in.value("layout", "nchw");
    if (layout != "nchw" && layout != "nhwc") throw ConfigError("layout must be nchw or nhwc");
    pre.nhwc = layout == "nhwc";

    if (j.contains("normalization")) {
      const json& norm = j.at("normalization");
      pre.mean = read_triplet(norm, "mean", pre.channels);
      pre.stddev = read_triplet(norm, "std", pre.channels);
    } else {
      pre.mean.assign(static_cast<std::size_t>(pre.channels), 0.0f);
      pre.stddev.assign(static_cast<std::size_t>(pre.channels), 1.0f);
    }
    for (float s : pre.stddev) {
      if (!(s > 0.0f)) throw ConfigError("normalization std must be positive");
    }

    meta.num_classes = j.at("num_classes").get<int>();
    const std::string output = j.value("output", "logits");
    if (output != "logits" && output != "probabilities") {
      throw ConfigError("output must be logits or probabilities");
    }
    meta.outputs_logits = output == "logits";
    meta.max_batch = j.value("max_batch", std::size_t{16});
    if (meta.max_batch == 0) throw ConfigError("max_batch must be positive");
    if (j.contains("class_names")) meta.class_names = j.at("class_names").get<std::vector<std::string>>();
    if (j.contains("detection")) {
      meta.detection_box = j.at("detection").at("box_index").get<int>();
      if (*meta.detection_box < 0 || *meta.detection_box >= meta.num_classes) {
        throw ConfigError("detection.box_index lies outside the model output");
      }
    } else if (meta.num_classes < 2) {
      throw ConfigError("num_classes must be at least 2");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model sidecar: ") + e.what());
  }
  return meta;
}

ModelMeta load_model_meta(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BackendError("cannot read model sidecar '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_model_meta(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void preprocess(const InputTensor& x, const PreprocessingSpec& spec, std::vector<float>& out) {
  const int c_in = x.channels();
  cv::Mat img(x.height(), x.width(), CV_32FC(c_in), const_cast<float*>(x.data().data()));
  cv::Mat work;
  if (c_in == spec.channels) {
    work = img;
  } else if (c_in == 3 && spec.channels == 1) {
    cv::cvtColor(img, work, cv::COLOR_RGB2GRAY);
  } else if (c_in == 1 && spec.channels == 3) {
    cv::cvtColor(img, work, cv::COLOR_GRAY2RGB);
  } else {
    throw ConfigError("cannot feed a " + std::to_string(c_in) + "-channel input to a " +
                      std::to_string(spec.channels) + "-channel model");
  }
  const int h = spec.height > 0 ? spec.height : x.height();
  const int w = spec.width > 0 ? spec.width : x.width();
  if (h != work.rows || w != work.cols) {
    cv::Mat resized;
    cv::resize(work, resized, cv::Size(w, h), 0, 0, cv::INTER_LINEAR);
    work = resized;
  }
  if (!work.isContinuous()) work = work.clone();

  const int c = spec.channels;
  const auto* p = work.ptr<float>();
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const std::size_t base = out.size();
  out.resize(base + plane * c);
  for (std::size_t i = 0; i < plane; ++i) {
    for (int ch = 0; ch < c; ++ch) {
      const int src = spec.bgr ? c - 1 - ch : ch;
      const float v = (p[i * c + src] - spec.mean[ch]) / spec.stddev[ch];
      if (spec.nhwc) {
        out[base + i * c + ch] = v;
      } else {
        out[base + ch * plane + i] = v;
      }
    }
  }
}

struct OnnxClassifier::Net {
  cv::dnn::Net net;
};

OnnxClassifier::OnnxClassifier(const std::filesystem::path& model, ModelMeta meta)
    : path_(model), meta_(std::move(meta)), net_(std::make_unique<Net>()) {
  if (!std::filesystem::is_regular_file(model)) {
    throw BackendError("model file '" + model.string() + "' does not exist");
  }
  try {
    net_->net = cv::dnn::readNetFromONNX(model.string());
  } catch (const cv::Exception& e) {
    throw BackendError("cannot load ONNX model '" + model.string() + "': " + e.what());
  }
  if (net_->net.empty()) throw BackendError("ONNX model '" + model.string() + "' is empty");
  net_->net.setPreferableBackend(cv::dnn::DNN_BACKEND_OPENCV);
  net_->net.setPreferableTarget(cv::dnn::DNN_TARGET_CPU);
}

OnnxClassifier::~OnnxClassifier() = default;

std::string OnnxClassifier::describe() const { return "onnx:" + path_.filename().string(); }

std::vector<std::vector<float>> OnnxClassifier::forward(std::span<const InputTensor> batch) {
  const auto& pre = meta_.preprocessing;
  std::vector<std::vector<float>> outputs;
  outputs.reserve(batch.size());
  std::vector<float> blob;
  for (std::size_t start = 0; start < batch.size(); start += meta_.max_batch) {
    const std::size_t count = std::min(meta_.max_batch, batch.size() - start);
    blob.clear();
    for (std::size_t i = 0; i < count; ++i) preprocess(batch[start + i], pre, blob);
    const int h = pre.height > 0 ? pre.height : batch[start].height();
    const int w = pre.width > 0 ? pre.width : batch[start].width();
    for (std::size_t i = 1; i < count; ++i) {
      if (pre.height == 0 && batch[start + i].shape() != batch[start].shape()) {
        throw ConfigError("inputs of one batch differ in size and the model has no resize target");
      }
    }
    const int n = static_cast<int>(count);
    std::vector<int> dims = pre.nhwc ? std::vector<int>{n, h, w, pre.channels}
                                     : std::vector<int>{n, pre.channels, h, w};
    cv::Mat input(static_cast<int>(dims.size()), dims.data(), CV_32F, blob.data());

    cv::Mat result;
    try {
      std::lock_guard lock(mutex_);
      net_->net.setInput(input);
      result = net_->net.forward().clone();
    } catch (const cv::Exception& e) {
      throw BackendError("inference failed for '" + path_.string() + "': " + e.what());
    }
    const std::size_t total = result.total();
    if (total != count * static_cast<std::size_t>(meta_.num_classes)) {
      throw BackendError("model '" + path_.string() + "' produced " + std::to_string(total) +
                         " values for " + std::to_string(count) + " inputs; expected " +
                         std::to_string(meta_.num_classes) + " per input");
    }
    const auto* p = result.ptr<float>();
    for (std::size_t i = 0; i < count; ++i) {
      outputs.emplace_back(p + i * meta_.num_classes, p + (i + 1) * meta_.num_classes);
    }
  }
  return outputs;
}

std::vector<Prediction> OnnxClassifier::do_classify(std::span<const InputTensor> batch) {
  const auto raw = forward(batch);
  std::vector<Prediction> preds;
  preds.reserve(raw.size());
  for (const auto& row : raw) {
    std::vector<double> v(row.begin(), row.end());
    for (double value : v) {
      if (!std::isfinite(value)) throw BackendError("model produced a non-finite score");
    }
    if (meta_.outputs_logits) {
      preds.push_back(Prediction::from_logits(v));
      continue;
    }
    // Float32 probabilities drift from one; renormalize within the model's own error.
    double sum = 0.0;
    for (double& value : v) {
      value = std::max(0.0, value);
      sum += value;
    }
    if (!(sum > 0.0) || std::abs(sum - 1.0) > 1e-3) {
      throw BackendError("model probabilities sum to " + std::to_string(sum));
    }
    for (double& value : v) value /= sum;
    preds.push_back(Prediction::from_probabilities(std::move(v)));
  }
  return preds;
}

std::unique_ptr<Classifier> load_onnx_classifier(const std::filesystem::path& model,
                                                 const std::filesystem::path& meta_path,
                                                 double xi) {
  if (!std::filesystem::is_regular_file(model)) {
    throw BackendError("model file '" + model.string() + "' does not exist");
  }
  ModelMeta meta = load_model_meta(meta_path);
  if (!meta.detection_box) return std::make_unique<OnnxClassifier>(model, std::move(meta));

  const int box = *meta.detection_box;
  const bool logits = meta.outputs_logits;
  auto net = std::make_shared<OnnxClassifier>(model, std::move(meta));
  auto p_det = [net, box, logits](const InputTensor& x) {
    const auto out = net->forward(std::span<const InputTensor>(&x, 1));
    const double v = out[0][static_cast<std::size_t>(box)];
    return logits ? 1.0 / (1.0 + std::exp(-v)) : std::clamp(v, 0.0, 1.0);
  };
  return std::make_unique<DetectionAdapter>(p_det, xi);
}

}  // namespace msv
