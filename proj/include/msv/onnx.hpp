#pragma once

// Neural backend: an ONNX model run through OpenCV's DNN module, described
// by a JSON sidecar (schema "msv-model-meta/1"):
//
//   {
//     "schema": "msv-model-meta/1",
//     "input": {"height": 224, "width": 224, "channels": 3,
//               "channel_order": "rgb" | "bgr", "layout": "nchw" | "nhwc"},
//     "normalization": {"mean": [..], "std": [..]},
//     "num_classes": 1000,
//     "output": "logits" | "probabilities",
//     "max_batch": 32,                       optional, default 16
//     "class_names": ["..", ..],             optional
//     "detection": {"box_index": 7}          optional, see below
//   }
//
// With "detection", output[box_index] is the detection probability of the
// chosen prior box (after a sigmoid when "output" is "logits") and the model
// is wrapped in a DetectionAdapter.

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "msv/classifier.hpp"
#include "msv/tensor.hpp"

namespace msv {

inline constexpr const char* kModelMetaSchema = "msv-model-meta/1";

// Applied to original and masked inputs alike, after masking.
struct PreprocessingSpec {
  int height = 0;  // 0: keep the input size
  int width = 0;
  int channels = 3;
  bool bgr = false;
  bool nhwc = false;
  std::vector<float> mean{0.0f, 0.0f, 0.0f};
  std::vector<float> stddev{1.0f, 1.0f, 1.0f};
};

struct ModelMeta {
  PreprocessingSpec preprocessing;
  int num_classes = 0;
  bool outputs_logits = true;
  std::size_t max_batch = 16;
  std::vector<std::string> class_names;
  std::optional<int> detection_box;
};

// Throws ConfigError on schema violations.
ModelMeta parse_model_meta(const std::string& json_text);
ModelMeta load_model_meta(const std::filesystem::path& path);

// Resizes (bilinear), reorders channels and normalizes one image into the
// model's layout. Appends height * width * channels floats to `out`.
void preprocess(const InputTensor& x, const PreprocessingSpec& spec, std::vector<float>& out);

class OnnxClassifier final : public Classifier {
 public:
  // Throws BackendError when the model cannot be loaded.
  OnnxClassifier(const std::filesystem::path& model, ModelMeta meta);
  ~OnnxClassifier() override;

  int num_classes() const override { return meta_.num_classes; }
  std::string describe() const override;
  const ModelMeta& meta() const { return meta_; }

  // Raw network outputs (logits or probabilities, as the model emits them).
  std::vector<std::vector<float>> forward(std::span<const InputTensor> batch);

 protected:
  std::vector<Prediction> do_classify(std::span<const InputTensor> batch) override;

 private:
  struct Net;
  std::filesystem::path path_;
  ModelMeta meta_;
  std::unique_ptr<Net> net_;
  std::mutex mutex_;
};

// Loads model + sidecar. Detection sidecars produce a DetectionAdapter with
// threshold `xi`.
std::unique_ptr<Classifier> load_onnx_classifier(const std::filesystem::path& model,
                                                 const std::filesystem::path& meta, double xi);

}  // namespace msv
