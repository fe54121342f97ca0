#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "msv/cli.hpp"
#include "msv/image_io.hpp"
#include "msv/pipeline.hpp"
#include "msv/synthetic.hpp"

using namespace msv;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("msv_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  // Three lit patches and the matching patch-evidence model.
  void patch_fixture() {
    PatchSceneParams p;
    const auto scene = make_patch_scene(p, 4);
    save_png(dir / "scene.png", scene.image);
    write_text(dir / "patch.json", synthetic_model_json(EvidenceClassifier::patches(scene.patches)));
  }

  // A small labeled slot corpus and two models reading 1 and 4 slots.
  void slot_fixture(int images) {
    SlotSceneParams sp;
    std::string manifest = "path,label\n";
    for (int i = 0; i < images; ++i) {
      const auto s = make_slot_scene(sp, static_cast<std::uint64_t>(i));
      const std::string name = "img" + std::to_string(i) + ".png";
      save_png(dir / "corpus" / name, s.image);
      manifest += name + "," + std::to_string(s.label) + "\n";
    }
    write_text(dir / "corpus" / "manifest.csv", manifest);
    for (int m : {1, 4}) {
      write_text(dir / ("slots_" + std::to_string(m) + ".json"),
                 synthetic_model_json(slot_model(sp, m, SlotVoteClassifier::Pooling::kMax)));
    }
  }

  std::string p(const std::string& rel) const { return (dir / rel).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, ExplainFindsThreePatches) {
  patch_fixture();
  const auto r = run_cli({"explain", p("scene.png"), "--model", p("patch.json"), "--baseline",
                          "black", "--out", p("out")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto j = json::parse(read_text(dir / "out" / "scene.json"));
  EXPECT_EQ(j["schema"], "msv-explain/1");
  EXPECT_EQ(j["msv_count"], 3);
  EXPECT_EQ(j["degenerate"], false);
  EXPECT_EQ(j["views"].size(), 3u);
  EXPECT_TRUE(fs::exists(dir / "out" / "scene_overlay.png"));
  EXPECT_TRUE(fs::exists(dir / "out" / "scene_view2.png"));
  EXPECT_TRUE(fs::exists(dir / "out" / "run_config.json"));
}

TEST_F(Cli, ConfigEchoReplaysTheRun) {
  patch_fixture();
  auto a = run_cli({"explain", p("scene.png"), "--model", p("patch.json"), "--baseline", "random",
                    "--seed", "9", "--split", "voronoi", "--beta", "6", "--out", p("a")});
  ASSERT_EQ(a.code, cli::kOk) << a.err;
  auto cfg = json::parse(read_text(dir / "a" / "run_config.json"));
  EXPECT_EQ(cfg["beta"], 6);
  EXPECT_EQ(cfg["split"], "voronoi");
  auto b = run_cli({"explain", p("scene.png"), "--config", p("a/run_config.json"), "--out", p("b")});
  ASSERT_EQ(b.code, cli::kOk) << b.err;
  auto ja = json::parse(read_text(dir / "a" / "scene.json"));
  auto jb = json::parse(read_text(dir / "b" / "scene.json"));
  EXPECT_EQ(ja["views"], jb["views"]);
  EXPECT_EQ(ja["queries"], jb["queries"]);
  // Flags override the file.
  auto c = run_cli({"explain", p("scene.png"), "--config", p("a/run_config.json"), "--beta", "4",
                    "--out", p("c")});
  ASSERT_EQ(c.code, cli::kOk) << c.err;
  EXPECT_EQ(json::parse(read_text(dir / "c" / "run_config.json"))["beta"], 4);
}

TEST_F(Cli, DegenerateRunWarnsAndSucceeds) {
  patch_fixture();
  write_text(dir / "const.json", R"({"schema": "msv-synthetic/1", "kind": "constant", "label": 1})");
  const auto r = run_cli({"explain", p("scene.png"), "--model", p("const.json"), "--out", p("out"),
                          "--beta", "4"});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.err.find("degenerate"), std::string::npos);
  EXPECT_EQ(json::parse(read_text(dir / "out" / "scene.json"))["degenerate"], true);
}

TEST_F(Cli, MissingModelIsABackendErrorWithoutOutputs) {
  patch_fixture();
  const auto r = run_cli({"explain", p("scene.png"), "--model", p("absent.onnx"), "--out", p("out")});
  EXPECT_EQ(r.code, cli::kBackendError);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST_F(Cli, UsageAndInputErrors) {
  patch_fixture();
  EXPECT_EQ(run_cli({}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"explain"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"explain", p("scene.png"), "--model", p("patch.json"), "--beta", "1",
                     "--out", p("o")})
                .code,
            cli::kUsage);
  EXPECT_EQ(run_cli({"explain", p("scene.png"), "--model", p("patch.json"), "--split", "quad"}).code,
            cli::kUsage);
  EXPECT_EQ(run_cli({"explain", p("nope.png"), "--model", p("patch.json"), "--out", p("o")}).code,
            cli::kInputError);
  write_text(dir / "bad_config.json", R"({"betta": 3})");
  EXPECT_EQ(run_cli({"explain", p("scene.png"), "--config", p("bad_config.json")}).code, cli::kUsage);
}

TEST_F(Cli, BatchOnAnEmptyDirectoryWarns) {
  patch_fixture();
  fs::create_directories(dir / "empty");
  const auto r = run_cli({"batch", p("empty"), "--model", p("patch.json"), "--out", p("out")});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.err.find("no images"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "out" / "records.csv"));
}

TEST_F(Cli, BatchWithLabelsResumesAndRanks) {
  slot_fixture(24);
  for (int m : {1, 4}) {
    const std::string model = "slots_" + std::to_string(m);
    const auto r = run_cli({"batch", p("corpus/manifest.csv"), "--model", p(model + ".json"),
                            "--baseline", "black", "--resamples", "200", "--out", p(model)});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    EXPECT_TRUE(fs::exists(dir / model / "accuracy_by_count.csv"));
    const auto s = json::parse(read_text(dir / model / "summary.json"));
    EXPECT_EQ(s["schema"], "msv-summary/1");
    EXPECT_EQ(s["images"], 24);
  }
  const auto records = read_text(dir / "slots_4" / "records.csv");

  // A second run over the same directory reuses every row.
  const auto again = run_cli({"batch", p("corpus/manifest.csv"), "--model", p("slots_4.json"),
                              "--baseline", "black", "--resamples", "200", "--out", p("slots_4")});
  ASSERT_EQ(again.code, cli::kOk) << again.err;
  EXPECT_NE(again.out.find("24 reused"), std::string::npos) << again.out;
  EXPECT_EQ(read_text(dir / "slots_4" / "records.csv"), records);

  const auto rank = run_cli({"rank", p("slots_1"), p("slots_4"), "--out", p("rank")});
  ASSERT_EQ(rank.code, cli::kOk) << rank.err;
  const auto j = json::parse(read_text(dir / "rank" / "ranking.json"));
  EXPECT_EQ(j["schema"], "msv-ranking/1");
  EXPECT_TRUE(fs::exists(dir / "rank" / "rank_plot.csv"));
}

TEST_F(Cli, RankErrors) {
  slot_fixture(6);
  const auto r = run_cli({"batch", p("corpus/manifest.csv"), "--model", p("slots_1.json"),
                          "--baseline", "black", "--resamples", "50", "--out", p("one")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto missing = run_cli({"rank", p("one"), p("absent"), "--out", p("rank")});
  EXPECT_EQ(missing.code, cli::kInputError);
  EXPECT_NE(missing.err.find("absent"), std::string::npos);
  EXPECT_EQ(run_cli({"rank", p("one"), "--out", p("rank")}).code, cli::kUsage);

  // The same run twice: every metric ties and no correlation is defined.
  const auto tie = run_cli({"rank", p("one"), p("one"), "--out", p("rank")});
  ASSERT_EQ(tie.code, cli::kOk) << tie.err;
  EXPECT_NE(tie.out.find("(ties)"), std::string::npos);
  EXPECT_NE(tie.out.find("rho undefined"), std::string::npos);
}

TEST_F(Cli, VerifyPassesAndTheNegativeControlFails) {
  const auto ok = run_cli({"verify", "--out", p("v")});
  EXPECT_EQ(ok.code, cli::kOk) << ok.out;
  EXPECT_NE(ok.out.find("all checks passed"), std::string::npos);
  const auto bad = run_cli({"verify", "--debug-tiebreak", "highest", "--out", p("v2")});
  EXPECT_EQ(bad.code, cli::kVerificationFailed) << bad.out;
}

TEST_F(Cli, BinaryRunsStandalone) {
  const std::string cmd = std::string("\"") + MSV_CLI_PATH + "\" --help > " + p("help.txt");
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_NE(read_text(dir / "help.txt").find("explain"), std::string::npos);
}
