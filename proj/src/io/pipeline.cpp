#include "msv/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "msv/error.hpp"
#include "msv/image_io.hpp"
#include "msv/onnx.hpp"
#include "msv/random.hpp"
#include "msv/synthetic.hpp"

namespace msv {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

json RunConfig::to_json() const {
  json j = {
      {"schema", kRunConfigSchema},
      {"command", command},
      {"inputs", inputs},
      {"model", model},
      {"meta", meta},
      {"beta", beta},
      {"split", to_string(split)},
      {"slic", {{"compactness", slic.compactness},
                {"max_iterations", slic.max_iterations},
                {"min_fragment_fraction", slic.min_fragment_fraction}}},
      {"seed", seed},
      {"baseline", to_string(baseline)},
      {"baseline_values", baseline_values},
      {"out", out},
      {"workers", workers},
      {"resamples", resamples},
      {"subsample", subsample},
      {"xi", xi},
      {"max_views", max_views},
      {"overlays", overlays},
      {"include_degenerate", include_degenerate},
      {"strict_minimality", strict_minimality},
      {"debug_tiebreak", debug_highest_tiebreak ? "highest" : "lowest"},
  };
  return j;
}

void RunConfig::merge_json(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "schema") {
        if (value.get<std::string>() != kRunConfigSchema) {
          throw ConfigError("configuration schema must be '" + std::string(kRunConfigSchema) + "'");
        }
      } else if (key == "command") {
        command = value.get<std::string>();
      } else if (key == "inputs") {
        inputs = value.get<std::vector<std::string>>();
      } else if (key == "model") {
        model = value.get<std::string>();
      } else if (key == "meta") {
        meta = value.get<std::string>();
      } else if (key == "beta") {
        beta = value.get<int>();
      } else if (key == "split") {
        split = split_kind_from_string(value.get<std::string>());
      } else if (key == "slic") {
        slic.compactness = value.value("compactness", slic.compactness);
        slic.max_iterations = value.value("max_iterations", slic.max_iterations);
        slic.min_fragment_fraction = value.value("min_fragment_fraction", slic.min_fragment_fraction);
      } else if (key == "seed") {
        seed = value.get<std::uint64_t>();
      } else if (key == "baseline") {
        baseline = baseline_kind_from_string(value.get<std::string>());
      } else if (key == "baseline_values") {
        baseline_values = value.get<std::vector<float>>();
      } else if (key == "out") {
        out = value.get<std::string>();
      } else if (key == "workers") {
        workers = value.get<int>();
      } else if (key == "resamples") {
        resamples = value.get<std::size_t>();
      } else if (key == "subsample") {
        subsample = value.get<std::size_t>();
      } else if (key == "xi") {
        xi = value.get<double>();
      } else if (key == "max_views") {
        max_views = value.get<std::size_t>();
      } else if (key == "overlays") {
        overlays = value.get<bool>();
      } else if (key == "include_degenerate") {
        include_degenerate = value.get<bool>();
      } else if (key == "strict_minimality") {
        strict_minimality = value.get<bool>();
      } else if (key == "debug_tiebreak") {
        const auto s = value.get<std::string>();
        if (s != "lowest" && s != "highest") throw ConfigError("debug_tiebreak must be lowest or highest");
        debug_highest_tiebreak = s == "highest";
      } else {
        throw ConfigError("unknown configuration key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad configuration value: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

GreedyConfig RunConfig::greedy() const {
  GreedyConfig g;
  g.beta = beta;
  g.split = SplitStrategy{split, slic, seed};
  g.max_views = max_views;
  g.tie_break = debug_highest_tiebreak ? TieBreak::kHighestIndex : TieBreak::kLowestIndex;
  g.strict_minimality = strict_minimality;
  return g;
}

Baseline RunConfig::baseline_recipe(const std::vector<float>& dataset_mean) const {
  switch (baseline) {
    case BaselineKind::kDatasetMean:
      return Baseline::dataset_mean(dataset_mean);
    case BaselineKind::kWhite:
      return Baseline::white();
    case BaselineKind::kBlack:
      return Baseline::black();
    case BaselineKind::kRandomNormal:
      return Baseline::random_normal(seed);
    case BaselineKind::kConstant:
      if (baseline_values.empty()) throw ConfigError("constant baseline needs baseline_values");
      return Baseline::constant(baseline_values);
  }
  throw ConfigError("unknown baseline kind");
}

// ---------------------------------------------------------------------------
// Models

LoadedModel load_model(const RunConfig& cfg) {
  if (cfg.model.empty()) throw ConfigError("no model given (--model)");
  const fs::path model(cfg.model);
  if (!fs::is_regular_file(model)) {
    throw BackendError("model file '" + model.string() + "' does not exist");
  }
  LoadedModel loaded;
  loaded.name = model.stem().string();
  if (model.extension() == ".json") {
    auto synth = load_synthetic_model(model);
    loaded.classifier = std::move(synth.classifier);
    loaded.dataset_mean = std::move(synth.dataset_mean);
    return loaded;
  }
  fs::path meta = cfg.meta.empty() ? fs::path(model).replace_extension(".json") : fs::path(cfg.meta);
  if (!fs::is_regular_file(meta)) {
    throw BackendError("model sidecar '" + meta.string() + "' does not exist (--meta)");
  }
  loaded.classifier = load_onnx_classifier(model, meta, cfg.xi);
  loaded.dataset_mean = load_model_meta(meta).preprocessing.mean;
  return loaded;
}

// ---------------------------------------------------------------------------
// Explanations

Explanation explain_image(Classifier& f, const InputTensor& x, const RunConfig& cfg,
                          const std::vector<float>& dataset_mean, std::string id,
                          std::optional<int> label) {
  const GreedyConfig g = cfg.greedy();
  const std::uint64_t hash = content_hash(x);
  Explanation e;
  e.id = std::move(id);
  e.image = x;
  e.baseline = cfg.baseline_recipe(dataset_mean).materialize(x, hash);
  e.result = greedy_msvs(f, x, e.baseline, g);
  e.reference = e.result.reference;
  e.record = score_image(e.reference, e.result.set, e.id);
  e.record.label = label;
  e.record.queries = e.result.trace.queries;
  e.record.content_hash = hash;
  return e;
}

json explanation_json(const Explanation& e, const Classifier& f) {
  const auto& set = e.result.set;
  json views = json::array();
  for (std::size_t i = 0; i < set.views.size(); ++i) {
    const auto sites = set.views[i].sites();
    const Rgb8 c = palette_color(i);
    views.push_back({{"index", i},
                     {"size", sites.size()},
                     {"split_seed", set.split_seeds[i]},
                     {"color", {c.r, c.g, c.b}},
                     {"sites", std::vector<Site>(sites.begin(), sites.end())}});
  }
  json levels = json::array();
  for (const auto& l : e.result.trace.levels) {
    levels.push_back({{"view", l.view_index},
                      {"depth", l.depth},
                      {"view_size", l.view_size},
                      {"groups", l.groups},
                      {"chosen", l.chosen},
                      {"gap", l.gap},
                      {"queries", l.queries},
                      {"shrunk", l.shrunk}});
  }
  const auto& r = e.record;
  json j = {
      {"schema", kExplainSchema},
      {"id", e.id},
      {"model", f.describe()},
      {"content_hash", format_hash(r.content_hash)},
      {"shape", {e.image.height(), e.image.width(), e.image.channels()}},
      {"predicted_class", set.predicted_class},
      {"remainder_class", set.remainder_class},
      {"scores", std::vector<double>(e.reference.scores().begin(), e.reference.scores().end())},
      {"confidence", r.confidence},
      {"entropy", r.entropy},
      {"margin", r.margin},
      {"msv_count", set.count()},
      {"degenerate", set.degenerate},
      {"truncated", set.truncated},
      {"queries", e.result.trace.queries},
      {"views", views},
      {"levels", levels},
  };
  j["label"] = r.label ? json(*r.label) : json(nullptr);
  return j;
}

std::string safe_stem(const std::string& id) {
  fs::path p(id);
  std::string s = p.replace_extension().string();
  for (char& c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return s.empty() ? "image" : s;
}

void write_explanation(const Explanation& e, const Classifier& f, const fs::path& dir,
                       const std::string& stem) {
  fs::create_directories(dir);
  write_text(dir / (stem + ".json"), explanation_json(e, f).dump(2) + "\n");
  save_png(dir / (stem + "_overlay.png"), render_overlay(e.image, e.result.set));
  for (std::size_t i = 0; i < e.result.set.views.size(); ++i) {
    save_png(dir / (stem + "_view" + std::to_string(i) + ".png"),
             mask_input(e.image, e.result.set.views[i], e.baseline));
  }
}

// ---------------------------------------------------------------------------
// Inputs

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw InputError("cannot write '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

bool is_image_file(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

std::vector<ImageTask> read_manifest(const fs::path& manifest) {
  std::istringstream in(read_text(manifest));
  std::string line;
  std::vector<ImageTask> tasks;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (header) {
      header = false;
      if (trim(fields[0]) != "path") {
        throw InputError(manifest.string() + ": first line must be the header 'path,label'");
      }
      continue;
    }
    if (fields.size() > 2) {
      throw InputError(manifest.string() + ":" + std::to_string(line_no) + ": expected path[,label]");
    }
    ImageTask t;
    t.id = trim(fields[0]);
    if (t.id.empty()) throw InputError(manifest.string() + ":" + std::to_string(line_no) + ": empty path");
    t.path = manifest.parent_path() / t.id;
    if (fields.size() == 2 && !trim(fields[1]).empty()) {
      const std::string label = trim(fields[1]);
      int v = 0;
      const auto res = std::from_chars(label.data(), label.data() + label.size(), v);
      if (res.ec != std::errc() || res.ptr != label.data() + label.size()) {
        throw InputError(manifest.string() + ":" + std::to_string(line_no) + ": label '" + label +
                         "' is not an integer");
      }
      t.label = v;
    }
    tasks.push_back(std::move(t));
  }
  return tasks;
}

std::vector<ImageTask> collect_tasks(const std::vector<std::string>& inputs) {
  std::vector<ImageTask> tasks;
  for (const auto& input : inputs) {
    const fs::path p(input);
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::recursive_directory_iterator(p)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) tasks.push_back({fs::relative(f, p).generic_string(), f, {}});
    } else if (!fs::exists(p)) {
      throw InputError("input '" + input + "' does not exist");
    } else if (is_image_file(p)) {
      tasks.push_back({p.filename().string(), p, {}});
    } else {
      auto more = read_manifest(p);
      tasks.insert(tasks.end(), std::make_move_iterator(more.begin()),
                   std::make_move_iterator(more.end()));
    }
  }
  return tasks;
}

// ---------------------------------------------------------------------------
// Batches

namespace {

bool row_less(const BatchRow& a, const BatchRow& b) {
  if (a.record.id != b.record.id) return a.record.id < b.record.id;
  return a.record.content_hash < b.record.content_hash;
}

}  // namespace

BatchResult run_batch(Classifier& f, const std::vector<ImageTask>& tasks, const RunConfig& cfg,
                      const std::vector<float>& dataset_mean, const std::string& model_name) {
  if (cfg.workers < 1) throw ParameterError("workers must be at least 1");
  check_config(cfg.greedy());
  const fs::path out(cfg.out);
  fs::create_directories(out);
  if (tasks.empty()) warn("no images to score; writing an empty report");

  std::map<std::uint64_t, BatchRow> previous;
  if (fs::is_regular_file(out / "records.csv")) {
    for (auto& row : parse_records_csv(read_text(out / "records.csv"))) {
      if (row.error.empty()) previous.emplace(row.record.content_hash, std::move(row));
    }
  }

  BatchResult result;
  result.rows.resize(tasks.size());
  std::vector<char> reused(tasks.size(), 0);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const ImageTask& task = tasks[i];
      BatchRow& row = result.rows[i];
      row.record.id = task.id;
      row.record.label = task.label;
      try {
        const InputTensor x = load_image(task.path);
        row.record.content_hash = content_hash(x);
        if (auto it = previous.find(row.record.content_hash); it != previous.end()) {
          row = it->second;
          row.record.id = task.id;
          row.record.label = task.label;
          reused[i] = 1;
          continue;
        }
        const auto e = explain_image(f, x, cfg, dataset_mean, task.id, task.label);
        row.record = e.record;
        row.truncated = e.result.set.truncated;
        if (cfg.overlays) {
          save_png(out / "overlays" / (safe_stem(task.id) + ".png"),
                   render_overlay(e.image, e.result.set));
        }
      } catch (const Error& err) {
        row.error = err.what();
      } catch (const std::exception& err) {
        row.error = std::string("unexpected failure: ") + err.what();
      }
    }
  };
  const int threads = std::min<int>(cfg.workers, std::max<std::size_t>(1, tasks.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::sort(result.rows.begin(), result.rows.end(), row_less);
  std::vector<ImageRecord> records;
  for (std::size_t i = 0; i < tasks.size(); ++i) result.reused += reused[i];
  for (const auto& row : result.rows) {
    if (!row.error.empty()) {
      ++result.failed;
      warn("image '" + row.record.id + "' failed: " + row.error);
    } else {
      records.push_back(row.record);
    }
  }

  std::string csv = records_csv_header() + "\n";
  for (const auto& row : result.rows) csv += records_csv_row(row) + "\n";
  write_text(out / "records.csv", csv);

  BootstrapOptions bopt;
  bopt.resamples = cfg.resamples;
  bopt.seed = cfg.seed;
  result.summary = summarize(model_name, records, bopt, cfg.include_degenerate);

  json summary = summary_json(result.summary);
  summary["schema"] = kSummarySchema;
  summary["images"] = tasks.size();
  summary["failed"] = result.failed;
  summary["bootstrap"] = {{"resamples", bopt.resamples},
                          {"lower", bopt.lower},
                          {"upper", bopt.upper},
                          {"seed", bopt.seed}};
  summary["config"] = {{"beta", cfg.beta},
                       {"split", to_string(cfg.split)},
                       {"seed", cfg.seed},
                       {"baseline", to_string(cfg.baseline)},
                       {"include_degenerate", cfg.include_degenerate}};

  if (cfg.subsample > 0) {
    std::vector<const ImageRecord*> kept;
    for (const auto& r : records) {
      if (!r.degenerate || cfg.include_degenerate) kept.push_back(&r);
    }
    if (cfg.subsample > kept.size()) {
      warn("sub-sample size " + std::to_string(cfg.subsample) + " exceeds the " +
           std::to_string(kept.size()) + " usable records; skipping the sub-sampling study");
    } else {
      std::vector<SubsampleEstimate> estimates;
      json sub = json::object();
      for (std::size_t mi = 0; mi < kAllMetrics.size(); ++mi) {
        std::vector<double> values;
        for (const auto* r : kept) values.push_back(metric_value(*r, kAllMetrics[mi]));
        BootstrapOptions per = bopt;
        per.seed = derive_seed(cfg.seed, 100 + mi);
        estimates.push_back(subsample_interval(values, cfg.subsample, per));
        sub[to_string(kAllMetrics[mi])] = {{"mean", estimates.back().mean},
                                           {"interval", interval_json(estimates.back().interval)}};
      }
      summary["subsample"] = {{"size", cfg.subsample}, {"metrics", sub}};
      result.subsample = std::move(estimates);
    }
  }

  const bool labeled = std::any_of(records.begin(), records.end(),
                                   [](const ImageRecord& r) { return r.label.has_value(); });
  if (labeled) {
    result.accuracy_table = accuracy_by_count(records, cfg.include_degenerate);
    summary["accuracy_by_count"] = accuracy_table_json(*result.accuracy_table);
    write_text(out / "accuracy_by_count.csv", accuracy_table_csv(*result.accuracy_table));
  }
  write_text(out / "summary.json", summary.dump(2) + "\n");
  write_text(out / "run_config.json", cfg.to_json().dump(2) + "\n");
  return result;
}

// ---------------------------------------------------------------------------
// Ranking

RankResult run_rank(const std::vector<fs::path>& run_dirs, const fs::path& out) {
  if (run_dirs.size() < 2) {
    throw ParameterError("ranking needs at least two batch runs, got " + std::to_string(run_dirs.size()));
  }
  RankResult result;
  for (const auto& dir : run_dirs) {
    const fs::path summary = dir / "summary.json";
    if (!fs::is_regular_file(summary)) {
      throw InputError("missing batch output '" + summary.string() + "'");
    }
    json j;
    try {
      j = json::parse(read_text(summary));
    } catch (const json::exception& e) {
      throw InputError(summary.string() + ": " + e.what());
    }
    auto s = summary_from_json(j);
    if (!s.accuracy) {
      throw InputError(summary.string() + " has no accuracy; rank needs labeled batch runs");
    }
    result.summaries.push_back(std::move(s));
  }
  result.report = rank_models(result.summaries);

  std::string plot = "model,metric,score,low,high,accuracy\n";
  for (Metric m : kAllMetrics) {
    for (const auto& s : result.summaries) {
      const auto& e = s.get(m);
      plot += csv_field(s.model) + ',' + to_string(m) + ',' + format_real(e.mean) + ',' +
              format_real(e.interval.low) + ',' + format_real(e.interval.high) + ',' +
              format_real(*s.accuracy) + '\n';
    }
  }
  json report = ranking_json(result.report);
  std::vector<std::string> dirs;
  for (const auto& d : run_dirs) dirs.push_back(d.string());
  report["runs"] = dirs;
  write_text(out / "ranking.json", report.dump(2) + "\n");
  write_text(out / "rank_plot.csv", plot);
  return result;
}

}  // namespace msv
