// Writes synthetic corpora and matching synthetic model files for the CLI.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "msv/error.hpp"
#include "msv/image_io.hpp"
#include "msv/pipeline.hpp"
#include "msv/random.hpp"
#include "msv/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

int patch_scene(const fs::path& out, const msv::PatchSceneParams& p, std::uint64_t seed) {
  const auto scene = msv::make_patch_scene(p, seed);
  msv::save_png(out / "scene.png", scene.image);
  msv::write_text(out / "patch_model.json",
                  msv::synthetic_model_json(msv::EvidenceClassifier::patches(scene.patches)));
  std::cout << "wrote " << (out / "scene.png").string() << " with " << scene.patches.size()
            << " patches\n";
  return 0;
}

int slot_corpus(const fs::path& out, const msv::SlotSceneParams& p, int images, std::uint64_t seed,
                msv::SlotVoteClassifier::Pooling pooling) {
  std::string manifest = "path,label\n";
  for (int i = 0; i < images; ++i) {
    const auto scene = msv::make_slot_scene(p, msv::derive_seed(seed, static_cast<std::uint64_t>(i)));
    char name[32];
    std::snprintf(name, sizeof name, "img_%04d.png", i);
    msv::save_png(out / "images" / name, scene.image);
    manifest += std::string("images/") + name + "," + std::to_string(scene.label) + "\n";
  }
  msv::write_text(out / "manifest.csv", manifest);
  for (int m = 1; m <= p.slots; ++m) {
    msv::write_text(out / "models" / ("slots_" + std::to_string(m) + ".json"),
                    msv::synthetic_model_json(msv::slot_model(p, m, pooling)));
  }
  std::cout << "wrote " << images << " images and " << p.slots << " models to " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic fixtures for msv", "msv-fixtures"};
  app.require_subcommand(1);
  std::string out = "fixtures";
  std::uint64_t seed = 0;

  msv::PatchSceneParams pp;
  auto* patch = app.add_subcommand("patch-scene", "one patch image plus its patch-evidence model");
  patch->add_option("--out", out, "output directory");
  patch->add_option("--seed", seed, "placement seed");
  patch->add_option("--patches", pp.patches, "number of patches");
  patch->add_option("--height", pp.height);
  patch->add_option("--width", pp.width);
  patch->add_option("--patch-size", pp.patch_height, "patch side length");

  msv::SlotSceneParams sp;
  int images = 200;
  auto* slots = app.add_subcommand("slot-corpus", "labeled slot images plus a family of slot-vote models");
  slots->add_option("--out", out, "output directory");
  slots->add_option("--seed", seed, "corpus seed");
  slots->add_option("--images", images, "number of images");
  slots->add_option("--p-true", sp.p_true, "probability that a slot shows the label color");
  std::string pooling = "max";
  slots->add_option("--pooling", pooling, "vote pooling of the models")
      ->check(CLI::IsMember({"sum", "max"}));

  CLI11_PARSE(app, argc, argv);
  try {
    if (*patch) {
      pp.patch_width = pp.patch_height;
      return patch_scene(out, pp, seed);
    }
    return slot_corpus(out, sp, images, seed,
                       pooling == "max" ? msv::SlotVoteClassifier::Pooling::kMax
                                        : msv::SlotVoteClassifier::Pooling::kSum);
  } catch (const msv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
