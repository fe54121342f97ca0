#include "msv/reports.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "msv/error.hpp"

namespace msv {

using nlohmann::json;

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_hash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t parse_hash(std::string_view hex) {
  std::uint64_t h = 0;
  const auto res = std::from_chars(hex.data(), hex.data() + hex.size(), h, 16);
  if (res.ec != std::errc() || res.ptr != hex.data() + hex.size() || hex.size() != 16) {
    throw InputError("bad content hash '" + std::string(hex) + "'");
  }
  return h;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string records_csv_header() {
  return "id,content_hash,label,predicted_class,remainder_class,msv_count,degenerate,truncated,"
         "confidence,entropy,margin,queries,error";
}

std::string records_csv_row(const BatchRow& row) {
  const ImageRecord& r = row.record;
  std::string out = csv_field(r.id);
  out += ',' + format_hash(r.content_hash);
  out += ',' + (r.label ? std::to_string(*r.label) : std::string());
  if (!row.error.empty()) {
    out += ",,,,,,,,,,";
    out += csv_field(row.error);
    return out;
  }
  out += ',' + std::to_string(r.predicted_class);
  out += ',' + std::to_string(r.remainder_class);
  out += ',' + std::to_string(r.msv_count);
  out += r.degenerate ? ",1" : ",0";
  out += row.truncated ? ",1" : ",0";
  out += ',' + format_real(r.confidence);
  out += ',' + format_real(r.entropy);
  out += ',' + format_real(r.margin);
  out += ',' + std::to_string(r.queries);
  out += ',';
  return out;
}

namespace {

template <typename T>
T parse_number(const std::string& s, std::size_t line_no) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InputError("records.csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<BatchRow> parse_records_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(records_csv_header())) {
    throw InputError("records.csv has an unexpected header");
  }
  std::vector<BatchRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 13) {
      throw InputError("records.csv line " + std::to_string(line_no) + " has " +
                       std::to_string(f.size()) + " fields");
    }
    BatchRow row;
    auto& r = row.record;
    r.id = f[0];
    r.content_hash = parse_hash(f[1]);
    if (!f[2].empty()) r.label = parse_number<int>(f[2], line_no);
    row.error = f[12];
    if (row.error.empty()) {
      r.predicted_class = parse_number<int>(f[3], line_no);
      r.remainder_class = parse_number<int>(f[4], line_no);
      r.msv_count = parse_number<std::size_t>(f[5], line_no);
      r.degenerate = f[6] == "1";
      row.truncated = f[7] == "1";
      r.confidence = parse_number<double>(f[8], line_no);
      r.entropy = parse_number<double>(f[9], line_no);
      r.margin = parse_number<double>(f[10], line_no);
      r.queries = parse_number<std::uint64_t>(f[11], line_no);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------

json interval_json(const Interval& i) { return json::array({i.low, i.high}); }

json summary_json(const MetricSummary& s) {
  json metrics = json::object();
  for (Metric m : kAllMetrics) {
    const auto& e = s.get(m);
    metrics[to_string(m)] = {{"mean", e.mean}, {"interval", interval_json(e.interval)}};
  }
  json j = {
      {"model", s.model},
      {"sample_size", s.sample_size},
      {"excluded_degenerate", s.excluded_degenerate},
      {"metrics", metrics},
  };
  j["accuracy"] = s.accuracy ? json(*s.accuracy) : json(nullptr);
  return j;
}

MetricSummary summary_from_json(const json& j) {
  MetricSummary s;
  try {
    s.model = j.at("model").get<std::string>();
    s.sample_size = j.at("sample_size").get<std::size_t>();
    s.excluded_degenerate = j.value("excluded_degenerate", std::size_t{0});
    for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
      const json& m = j.at("metrics").at(to_string(kAllMetrics[i]));
      s.metrics[i].mean = m.at("mean").get<double>();
      s.metrics[i].interval = {m.at("interval").at(0).get<double>(),
                               m.at("interval").at(1).get<double>()};
    }
    if (j.contains("accuracy") && !j.at("accuracy").is_null()) s.accuracy = j.at("accuracy").get<double>();
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed summary: ") + e.what());
  }
  return s;
}

json accuracy_table_json(const AccuracyByCountTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = {{"msv_count", r.bucket}, {"n", r.n}};
    row["accuracy"] = r.n ? json(r.accuracy) : json(nullptr);
    row["ci_half_width"] = r.half_width ? json(*r.half_width) : json(nullptr);
    rows.push_back(std::move(row));
  }
  return {{"rows", rows},
          {"excluded_degenerate", t.excluded_degenerate},
          {"unlabeled", t.unlabeled}};
}

std::string accuracy_table_csv(const AccuracyByCountTable& t) {
  std::string out = "msv_count,n,accuracy,ci_half_width\n";
  for (const auto& r : t.rows) {
    out += csv_field(r.bucket) + ',' + std::to_string(r.n) + ',';
    if (r.n) out += format_real(r.accuracy);
    out += ',';
    if (r.half_width) out += format_real(*r.half_width);
    out += '\n';
  }
  return out;
}

json ranking_json(const RankingReport& r) {
  json metrics = json::object();
  for (const auto& m : r.per_metric) {
    json entry = {{"order", m.order}, {"ranks", m.ranks}, {"ties", m.has_ties}};
    entry["spearman_rho"] = m.rho ? json(*m.rho) : json(nullptr);
    if (!m.rho) entry["note"] = "undefined: the metric is constant across models";
    metrics[to_string(m.metric)] = std::move(entry);
  }
  return {{"schema", kRankingSchema},
          {"models", r.models},
          {"accuracy", r.accuracies},
          {"metrics", metrics}};
}

}  // namespace msv
