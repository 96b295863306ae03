#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "colorref/corpus/records.hpp"

namespace colorref::corpus {

struct RowError {
  std::size_t line = 0;  // 1-based line (JSONL) or data row (CSV)
  std::string message;
};

/// Valid records plus one entry per rejected row.
struct LoadResult {
  std::vector<GameRecord> records;
  std::vector<RowError> errors;
};

/// Native JSON Lines schema, one round per line:
///   {"game_id", "round_index", "colors": [{h,s,v} x3], "target_index",
///    "condition", "messages": [{role, text, language}], "clicked_index"}
nlohmann::ordered_json record_to_json(const GameRecord& r);
/// Throws DataError describing the first violation.
GameRecord record_from_json(const nlohmann::json& j);

std::string to_jsonl(const std::vector<GameRecord>& records);
void save_corpus(const std::string& path, const std::vector<GameRecord>& records);

LoadResult parse_corpus(std::string_view text);
/// Throws DataError if the file cannot be read.
LoadResult load_corpus(const std::string& path);
/// Loads several files and throws DataError listing every row error.
std::vector<GameRecord> load_corpora_strict(const std::vector<std::string>& paths);

/// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

struct ImportOptions {
  Language default_language = Language::kEnglish;
  double theta = context::kDefaultTheta;
};

/// Imports a CSV with one row per message using a {column -> field} mapping.
/// Fields: game_id, round_index, role, text, language, condition,
/// target_index, clicked_index, and color{0,1,2}_{h,s,v} (or _l for HSL
/// lightness, converted to HSV). Rows sharing (game_id, round_index) are
/// merged into one round; colors, target and condition come from its first
/// row. Missing conditions are classified from the colors.
LoadResult import_csv(std::string_view csv_text, const nlohmann::json& mapping, const ImportOptions& opts = {});
LoadResult import_csv_file(const std::string& csv_path, const std::string& mapping_path,
                           const ImportOptions& opts = {});

}  // namespace colorref::corpus
