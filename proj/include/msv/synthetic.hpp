#pragma once

// Synthetic scenes and a JSON format for synthetic classifiers, so corpora
// with known evidence can be scored end to end through the CLI.
//
// Synthetic model files use schema "msv-synthetic/1":
//
//   {"schema": "msv-synthetic/1", "kind": "patch_evidence",
//    "patterns": [[0, 1], [4, 5]],
//    "scoring": {"threshold": 0.75, "gain": 4, "noise": 1},
//    "dataset_mean": [0.2]}
//
// kind is one of single_pixel {site, threshold, gain}, patch_evidence and
// overlap_evidence {patterns, scoring}, constant {label, num_classes},
// slot_vote {slots, activation, gain, nothing_logit, pooling: sum|max}. Site indices are
// 0-based, row-major.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "msv/classifier.hpp"
#include "msv/tensor.hpp"

namespace msv {

inline constexpr const char* kSyntheticSchema = "msv-synthetic/1";

struct SyntheticModel {
  std::unique_ptr<Classifier> classifier;
  std::string kind;
  std::vector<float> dataset_mean;  // empty when the file carries none
};

// Throws ConfigError on schema violations.
SyntheticModel parse_synthetic_model(const std::string& json_text);
SyntheticModel load_synthetic_model(const std::filesystem::path& path);

std::string synthetic_model_json(const EvidenceClassifier& c);
std::string synthetic_model_json(const SlotVoteClassifier& c);

// ---------------------------------------------------------------------------
// Patch scenes: lit rectangular patches on a dim noisy background.

struct PatchSceneParams {
  int height = 16;
  int width = 16;
  int channels = 1;
  int patches = 3;
  int patch_height = 2;
  int patch_width = 2;
  // Minimum number of background sites between two patches (Chebyshev).
  int spacing = 1;
  float background_max = 0.4f;  // background values are k/255 in [0, max]
};

struct PatchScene {
  InputTensor image;
  std::vector<std::vector<Site>> patches;
};

// Places the patches uniformly at random without overlap. Throws
// ParameterError when they cannot fit.
PatchScene make_patch_scene(const PatchSceneParams& params, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Slot scenes: an RGB image with fixed 2 x 2 slots. Each slot stays black
// with probability p_empty; otherwise it shows the label's color at full
// amplitude with probability p_true, else a different color at the
// distractor amplitude. A SlotVoteClassifier reading
// the first m slots acts as a model with m independent pieces of evidence.

struct SlotSceneParams {
  int height = 12;
  int width = 12;
  int slots = 6;
  double p_empty = 0.0;
  double p_true = 0.6;
  float true_amplitude = 1.0f;
  float distractor_amplitude = 0.6f;
};

struct SlotScene {
  InputTensor image;
  int label = 0;                 // 0..2
  std::vector<int> slot_colors;  // color shown in each slot, -1 when empty
};

// Slot sites in reading order of attention (slot 0 first).
std::vector<std::vector<Site>> slot_layout(const SlotSceneParams& params);
SlotScene make_slot_scene(const SlotSceneParams& params, std::uint64_t seed);
SlotVoteClassifier slot_model(const SlotSceneParams& params, int attended_slots,
                              SlotVoteClassifier::Pooling pooling = SlotVoteClassifier::Pooling::kSum);

}  // namespace msv
