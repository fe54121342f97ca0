#pragma once

// Report formats.
//
// records.csv (schema msv-records/1), one row per image, columns in order:
//   id, content_hash, label, predicted_class, remainder_class, msv_count,
//   degenerate, truncated, confidence, entropy, margin, queries, error
// content_hash is 16 lowercase hex digits; label is empty when unknown;
// booleans are 0/1; reals use the shortest round-trip decimal form; error is
// empty for scored rows. Fields containing a comma or quote are quoted.
//
// summary.json (schema msv-summary/1) and ranking.json (schema
// msv-ranking/1) are described by the writers below.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "msv/metrics.hpp"

namespace msv {

inline constexpr const char* kRecordsSchema = "msv-records/1";
inline constexpr const char* kSummarySchema = "msv-summary/1";
inline constexpr const char* kRankingSchema = "msv-ranking/1";
inline constexpr const char* kExplainSchema = "msv-explain/1";

struct BatchRow {
  ImageRecord record;
  bool truncated = false;
  std::string error;  // non-empty when the image could not be scored
};

// Shortest decimal that parses back to the same double.
std::string format_real(double v);
std::string format_hash(std::uint64_t h);
std::uint64_t parse_hash(std::string_view hex);

std::string records_csv_header();
std::string records_csv_row(const BatchRow& row);
// Parses a records.csv written by records_csv_row. Throws InputError on a
// malformed file.
std::vector<BatchRow> parse_records_csv(const std::string& text);

// RFC 4180 field splitting for one line.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_field(std::string_view value);

nlohmann::json interval_json(const Interval& i);
nlohmann::json summary_json(const MetricSummary& s);
MetricSummary summary_from_json(const nlohmann::json& j);
nlohmann::json accuracy_table_json(const AccuracyByCountTable& t);
std::string accuracy_table_csv(const AccuracyByCountTable& t);
nlohmann::json ranking_json(const RankingReport& r);

}  // namespace msv
