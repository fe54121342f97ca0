#include "msv/cli.hpp"

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "msv/error.hpp"
#include "msv/image_io.hpp"
#include "msv/pipeline.hpp"
#include "msv/verify_suite.hpp"

namespace msv::cli {

namespace fs = std::filesystem;

namespace {

// Flags shared by the scoring subcommands. Values are applied on top of the
// config file only when given on the command line.
struct Flags {
  std::string config;
  std::string model, meta, out, split, baseline;
  int beta = 0, workers = 0;
  std::uint64_t seed = 0;
  std::size_t resamples = 0, subsample = 0, max_views = 0;
  double xi = 0.0;
  bool overlays = false, include_degenerate = false, strict = false;
  std::string debug_tiebreak;

  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters;

  template <typename T>
  void add(CLI::App* app, const std::string& name, T& target, const std::string& help,
           std::function<void(RunConfig&)> apply) {
    setters.emplace_back(app->add_option(name, target, help), std::move(apply));
  }
  void add_flag(CLI::App* app, const std::string& name, bool& target, const std::string& help,
                std::function<void(RunConfig&)> apply) {
    setters.emplace_back(app->add_flag(name, target, help), std::move(apply));
  }

  void search(CLI::App* app) {
    add(app, "--beta", beta, "groups per split (default 16)", [this](RunConfig& c) { c.beta = beta; });
    add(app, "--split", split, "split strategy: slic, voronoi or grid",
        [this](RunConfig& c) { c.split = split_kind_from_string(split); });
    setters.back().first->check(CLI::IsMember({"slic", "voronoi", "grid"}));
    add(app, "--seed", seed, "run seed (default 0)", [this](RunConfig& c) { c.seed = seed; });
    add(app, "--baseline", baseline, "baseline: mean, white, black, random or constant (values from --config)",
        [this](RunConfig& c) { c.baseline = baseline_kind_from_string(baseline); });
    setters.back().first->check(CLI::IsMember({"mean", "white", "black", "random", "constant"}));
    add(app, "--max-views", max_views, "cap on the number of views (default n)",
        [this](RunConfig& c) { c.max_views = max_views; });
    add_flag(app, "--strict-minimality", strict,
             "continue with a sufficiency-preserving group when the closest one breaks sufficiency",
             [this](RunConfig& c) { c.strict_minimality = strict; });
    add(app, "--debug-tiebreak", debug_tiebreak, "argmin tie rule (debug): lowest or highest",
        [this](RunConfig& c) { c.debug_highest_tiebreak = debug_tiebreak == "highest"; });
    setters.back().first->check(CLI::IsMember({"lowest", "highest"}));
  }

  void model_flags(CLI::App* app) {
    add(app, "--model", model, "model file: .onnx or synthetic .json", [this](RunConfig& c) { c.model = model; });
    add(app, "--meta", meta, "ONNX sidecar JSON (default: <model>.json)", [this](RunConfig& c) { c.meta = meta; });
    add(app, "--xi", xi, "detection threshold for detection sidecars (default 0.25)",
        [this](RunConfig& c) { c.xi = xi; });
  }

  void common(CLI::App* app) {
    app->add_option("--config", config, "JSON configuration (flags take precedence)");
    add(app, "--out", out, "output directory", [this](RunConfig& c) { c.out = out; });
  }

  RunConfig resolve(const std::string& command, const std::vector<std::string>& inputs) const {
    RunConfig cfg;
    if (!config.empty()) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_text(config));
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(config + ": " + e.what());
      }
      cfg.merge_json(j);
    }
    cfg.command = command;
    if (!inputs.empty()) cfg.inputs = inputs;
    for (const auto& [opt, apply] : setters) {
      if (opt->count() > 0) apply(cfg);
    }
    if (!(cfg.xi > 0.0 && cfg.xi < 1.0)) throw ParameterError("--xi must lie in (0, 1)");
    return cfg;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_explain(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.inputs.size() != 1) throw ParameterError("explain takes exactly one image");
  check_config(cfg.greedy());
  auto model = load_model(cfg);
  const fs::path image_path(cfg.inputs[0]);
  const InputTensor x = load_image(image_path);

  const auto t0 = std::chrono::steady_clock::now();
  const auto e = explain_image(*model.classifier, x, cfg, model.dataset_mean,
                               image_path.filename().string());
  const double elapsed = seconds_since(t0);

  const fs::path dir(cfg.out);
  const std::string stem = safe_stem(image_path.filename().string());
  write_explanation(e, *model.classifier, dir, stem);
  write_text(dir / "run_config.json", cfg.to_json().dump(2) + "\n");

  const auto& set = e.result.set;
  if (set.degenerate) {
    err << "warning: degenerate run: the baseline alone predicts class " << set.predicted_class
        << "; the remainder condition cannot hold\n";
  }
  out << e.id << ": class " << set.predicted_class << ", " << set.count() << " MSVs, remainder class "
      << set.remainder_class << ", " << e.result.trace.queries << " queries, " << std::fixed
      << std::setprecision(3) << elapsed << " s\n";
  out << "wrote " << (dir / (stem + ".json")).string() << "\n";
  return kOk;
}

int cmd_batch(const RunConfig& cfg, std::ostream& out) {
  auto model = load_model(cfg);
  const auto tasks = collect_tasks(cfg.inputs);
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = run_batch(*model.classifier, tasks, cfg, model.dataset_mean, model.name);
  const auto& s = result.summary;

  out << tasks.size() << " images, " << result.failed << " failed, " << result.reused
      << " reused, " << s.excluded_degenerate << " degenerate excluded, " << std::fixed
      << std::setprecision(2) << seconds_since(t0) << " s\n";
  out << std::setprecision(4);
  for (Metric m : kAllMetrics) {
    const auto& e = s.get(m);
    if (s.sample_size == 0) break;
    out << "  " << std::left << std::setw(11) << to_string(m) << e.mean << "  [" << e.interval.low
        << ", " << e.interval.high << "]\n";
  }
  if (s.accuracy) out << "  accuracy   " << *s.accuracy << "\n";
  out << "wrote " << (fs::path(cfg.out) / "records.csv").string() << "\n";
  if (!tasks.empty() && result.failed == tasks.size()) return kInputError;
  return kOk;
}

int cmd_rank(const std::vector<std::string>& dirs, const RunConfig& cfg, std::ostream& out) {
  std::vector<fs::path> paths(dirs.begin(), dirs.end());
  const auto result = run_rank(paths, cfg.out);
  for (const auto& m : result.report.per_metric) {
    out << std::left << std::setw(11) << to_string(m.metric) << ' ';
    if (m.rho) {
      out << "rho " << std::fixed << std::setprecision(3) << *m.rho;
    } else {
      out << "rho undefined (constant metric)";
    }
    out << "  order:";
    for (const auto& name : m.order) out << ' ' << name;
    if (m.has_ties) out << "  (ties)";
    out << '\n';
  }
  out << "wrote " << (fs::path(cfg.out) / "ranking.json").string() << "\n";
  return kOk;
}

int cmd_verify(const RunConfig& cfg, bool write, std::ostream& out) {
  VerifyOptions opt;
  opt.seed = cfg.seed;
  opt.beta = cfg.beta;
  opt.tie_break = cfg.debug_highest_tiebreak ? TieBreak::kHighestIndex : TieBreak::kLowestIndex;
  const auto report = run_verify_suite(opt);
  nlohmann::json cases = nlohmann::json::array();
  for (const auto& c : report.cases) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.passed) out << ": " << c.detail;
    out << '\n';
    cases.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  out << (report.passed() ? "all checks passed\n" : "verification failed\n");
  if (write) {
    write_text(fs::path(cfg.out) / "verify.json",
               nlohmann::json{{"schema", "msv-verify/1"}, {"passed", report.passed()}, {"cases", cases}}
                       .dump(2) +
                   "\n");
  }
  return report.passed() ? kOk : kVerificationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal sufficient views: explanations and label-free model scores", "msv"};
  app.require_subcommand(1);

  Flags ex, ba, ra, ve;
  std::string image;
  std::vector<std::string> inputs, runs;

  auto* explain = app.add_subcommand("explain", "find the MSVs of one image");
  explain->add_option("image", image, "PNG or JPEG image")->required();
  ex.common(explain);
  ex.model_flags(explain);
  ex.search(explain);

  auto* batch = app.add_subcommand("batch", "score a corpus (images, directories or manifests)");
  batch->add_option("inputs", inputs, "images, directories or manifest files");
  ba.common(batch);
  ba.model_flags(batch);
  ba.search(batch);
  ba.add(batch, "--workers", ba.workers, "parallel images (default 1)",
         [&ba](RunConfig& c) { c.workers = ba.workers; });
  ba.add(batch, "--resamples", ba.resamples, "bootstrap resamples (default 10000)",
         [&ba](RunConfig& c) { c.resamples = ba.resamples; });
  ba.add(batch, "--subsample", ba.subsample, "also bootstrap a random sub-sample of this size",
         [&ba](RunConfig& c) { c.subsample = ba.subsample; });
  ba.add_flag(batch, "--overlays", ba.overlays, "write an overlay PNG per image",
              [&ba](RunConfig& c) { c.overlays = ba.overlays; });
  ba.add_flag(batch, "--include-degenerate", ba.include_degenerate,
              "count degenerate runs in the averages", [&ba](RunConfig& c) { c.include_degenerate = ba.include_degenerate; });

  auto* rank = app.add_subcommand("rank", "rank models from two or more batch runs");
  rank->add_option("runs", runs, "batch output directories")->required();
  ra.common(rank);

  auto* verify = app.add_subcommand("verify", "run the brute-force oracle suite");
  ve.common(verify);
  ve.search(verify);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  set_warning_sink([&err](const std::string& msg) { err << "warning: " << msg << '\n'; });
  struct RestoreSink {
    ~RestoreSink() {
      set_warning_sink([](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; });
    }
  } restore;

  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kUsage;
  }

  try {
    if (*explain) return cmd_explain(ex.resolve("explain", {image}), out, err);
    if (*batch) return cmd_batch(ba.resolve("batch", inputs), out);
    if (*rank) return cmd_rank(runs, ra.resolve("rank", runs), out);
    if (*verify) return cmd_verify(ve.resolve("verify", {}), verify->count("--out") > 0, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const BackendError& e) {
    err << "error: " << e.what() << "\n";
    return kBackendError;
  } catch (const RunError& e) {
    err << "error: " << e.what() << "\n";
    return kBackendError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kUsage;
}

}  // namespace msv::cli
