#include "msv/synthetic.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "msv/error.hpp"
#include "msv/random.hpp"

namespace msv {

using nlohmann::json;

namespace {

float quantized_uniform(Rng& rng, float max) {
  const auto top = static_cast<std::uint64_t>(max * 255.0f);
  return static_cast<float>(uniform_index(rng, top + 1)) / 255.0f;
}

EvidenceScoring read_scoring(const json& j) {
  EvidenceScoring s;
  if (!j.contains("scoring")) return s;
  const json& sc = j.at("scoring");
  s.threshold = sc.value("threshold", s.threshold);
  s.gain = sc.value("gain", s.gain);
  s.noise = sc.value("noise", s.noise);
  return s;
}

}  // namespace

SyntheticModel parse_synthetic_model(const std::string& json_text) {
  SyntheticModel model;
  try {
    const json j = json::parse(json_text);
    if (j.value("schema", "") != kSyntheticSchema) {
      throw ConfigError("synthetic model schema must be '" + std::string(kSyntheticSchema) + "'");
    }
    model.kind = j.at("kind").get<std::string>();
    if (j.contains("dataset_mean")) model.dataset_mean = j.at("dataset_mean").get<std::vector<float>>();

    if (model.kind == "single_pixel") {
      model.classifier = std::make_unique<SinglePixelClassifier>(
          j.at("site").get<Site>(), j.value("threshold", 0.5), j.value("gain", 8.0));
    } else if (model.kind == "patch_evidence" || model.kind == "overlap_evidence") {
      const auto kind = model.kind == "patch_evidence" ? EvidenceClassifier::Kind::kPatch
                                                       : EvidenceClassifier::Kind::kOverlap;
      model.classifier = std::make_unique<EvidenceClassifier>(
          kind, j.at("patterns").get<std::vector<std::vector<Site>>>(), read_scoring(j));
    } else if (model.kind == "constant") {
      model.classifier =
          std::make_unique<ConstantClassifier>(j.at("label").get<int>(), j.value("num_classes", 2));
    } else if (model.kind == "slot_vote") {
      const std::string pooling = j.value("pooling", "sum");
      if (pooling != "sum" && pooling != "max") throw ConfigError("pooling must be sum or max");
      model.classifier = std::make_unique<SlotVoteClassifier>(
          j.at("slots").get<std::vector<std::vector<Site>>>(), j.value("activation", 0.5),
          j.value("gain", 6.0), j.value("nothing_logit", 0.3),
          pooling == "max" ? SlotVoteClassifier::Pooling::kMax : SlotVoteClassifier::Pooling::kSum);
    } else {
      throw ConfigError("unknown synthetic model kind '" + model.kind + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed synthetic model: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid synthetic model: ") + e.what());
  }
  return model;
}

SyntheticModel load_synthetic_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BackendError("model file '" + path.string() + "' does not exist");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_synthetic_model(ss.str());
  } catch (const ConfigError& e) {
    throw BackendError(path.string() + ": " + e.what());
  }
}

std::string synthetic_model_json(const EvidenceClassifier& c) {
  const auto& s = c.scoring();
  json j = {
      {"schema", kSyntheticSchema},
      {"kind", c.kind() == EvidenceClassifier::Kind::kPatch ? "patch_evidence" : "overlap_evidence"},
      {"patterns", c.patterns()},
      {"scoring", {{"threshold", s.threshold}, {"gain", s.gain}, {"noise", s.noise}}},
  };
  return j.dump(2) + "\n";
}

std::string synthetic_model_json(const SlotVoteClassifier& c) {
  json j = {
      {"schema", kSyntheticSchema},
      {"kind", "slot_vote"},
      {"slots", c.slots()},
      {"activation", c.activation()},
      {"gain", c.gain()},
      {"nothing_logit", c.nothing_logit()},
      {"pooling", c.pooling() == SlotVoteClassifier::Pooling::kMax ? "max" : "sum"},
  };
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

PatchScene make_patch_scene(const PatchSceneParams& p, std::uint64_t seed) {
  if (p.patches < 0 || p.patch_height < 1 || p.patch_width < 1 || p.channels < 1) {
    throw ParameterError("invalid patch scene parameters");
  }
  if (p.patch_height > p.height || p.patch_width > p.width) {
    throw ParameterError("patch larger than the scene");
  }
  Rng rng(seed);
  PatchScene scene;
  std::vector<float> data(static_cast<std::size_t>(p.height) * p.width * p.channels);
  for (auto& v : data) v = quantized_uniform(rng, p.background_max);

  struct Box {
    int r, c;
  };
  std::vector<Box> boxes;
  const int rows = p.height - p.patch_height + 1;
  const int cols = p.width - p.patch_width + 1;
  for (int i = 0; i < p.patches; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const int r = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(rows)));
      const int c = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(cols)));
      bool clear = true;
      for (const auto& b : boxes) {
        const bool apart_rows = r >= b.r + p.patch_height + p.spacing || b.r >= r + p.patch_height + p.spacing;
        const bool apart_cols = c >= b.c + p.patch_width + p.spacing || b.c >= c + p.patch_width + p.spacing;
        if (!apart_rows && !apart_cols) {
          clear = false;
          break;
        }
      }
      if (clear) {
        boxes.push_back({r, c});
        placed = true;
      }
    }
    if (!placed) {
      throw ParameterError("cannot place " + std::to_string(p.patches) + " patches of " +
                           std::to_string(p.patch_height) + "x" + std::to_string(p.patch_width) +
                           " in a " + std::to_string(p.height) + "x" + std::to_string(p.width) +
                           " scene");
    }
  }
  for (const auto& b : boxes) {
    std::vector<Site> sites;
    for (int r = b.r; r < b.r + p.patch_height; ++r) {
      for (int c = b.c; c < b.c + p.patch_width; ++c) {
        const auto s = static_cast<Site>(r * p.width + c);
        sites.push_back(s);
        for (int ch = 0; ch < p.channels; ++ch) data[static_cast<std::size_t>(s) * p.channels + ch] = 1.0f;
      }
    }
    scene.patches.push_back(std::move(sites));
  }
  scene.image = InputTensor(p.height, p.width, p.channels, std::move(data));
  return scene;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<Site>> slot_layout(const SlotSceneParams& p) {
  // Slots sit on a coarse lattice with one background row/column between
  // neighbours, filled column by column.
  const int per_row = (p.width - 1) / 3;
  const int per_col = (p.height - 1) / 3;
  if (p.slots < 1 || p.slots > per_row * per_col) {
    throw ParameterError("cannot lay out " + std::to_string(p.slots) + " slots in " +
                         std::to_string(p.height) + "x" + std::to_string(p.width));
  }
  std::vector<std::vector<Site>> slots;
  for (int i = 0; i < p.slots; ++i) {
    const int lr = i % per_col;
    const int lc = i / per_col;
    const int r0 = 1 + 3 * lr;
    const int c0 = 1 + 3 * lc;
    std::vector<Site> sites;
    for (int r = r0; r < r0 + 2; ++r) {
      for (int c = c0; c < c0 + 2; ++c) sites.push_back(static_cast<Site>(r * p.width + c));
    }
    slots.push_back(std::move(sites));
  }
  return slots;
}

SlotScene make_slot_scene(const SlotSceneParams& p, std::uint64_t seed) {
  const auto layout = slot_layout(p);
  Rng rng(seed);
  SlotScene scene;
  scene.label = static_cast<int>(uniform_index(rng, SlotVoteClassifier::kColorClasses));
  std::vector<float> data(static_cast<std::size_t>(p.height) * p.width * 3, 0.0f);
  for (const auto& slot : layout) {
    if (p.p_empty > 0.0 && uniform01(rng) < p.p_empty) {
      scene.slot_colors.push_back(-1);
      continue;
    }
    int color = scene.label;
    float amplitude = p.true_amplitude;
    if (uniform01(rng) >= p.p_true) {
      color = (scene.label + 1 + static_cast<int>(uniform_index(rng, 2))) % 3;
      amplitude = p.distractor_amplitude;
    }
    scene.slot_colors.push_back(color);
    for (Site s : slot) data[static_cast<std::size_t>(s) * 3 + color] = amplitude;
  }
  scene.image = InputTensor(p.height, p.width, 3, std::move(data));
  return scene;
}

SlotVoteClassifier slot_model(const SlotSceneParams& p, int attended_slots,
                              SlotVoteClassifier::Pooling pooling) {
  auto layout = slot_layout(p);
  if (attended_slots < 1 || attended_slots > static_cast<int>(layout.size())) {
    throw ParameterError("attended slot count out of range");
  }
  layout.resize(static_cast<std::size_t>(attended_slots));
  return SlotVoteClassifier(std::move(layout), 0.5, 6.0, 0.3, pooling);
}

}  // namespace msv
