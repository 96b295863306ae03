#include "colorref/corpus/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>

#include "colorref/error.hpp"
#include "colorref/resources.hpp"

namespace colorref::corpus {

namespace {

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw DataError(std::string("missing field '") + key + "'");
  return j.at(key);
}

int require_int(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_number_integer()) throw DataError(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

std::string require_string(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_string()) throw DataError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

void check_index(int idx, const char* what) {
  if (idx < 0 || idx > 2) throw DataError(std::string(what) + " must be 0, 1 or 2");
}

}  // namespace

nlohmann::ordered_json record_to_json(const GameRecord& r) {
  nlohmann::ordered_json j;
  j["game_id"] = r.game_id;
  j["round_index"] = r.round_index;
  auto colors = nlohmann::ordered_json::array();
  for (const auto& c : r.context.colors) {
    nlohmann::ordered_json cj;
    cj["h"] = c.h();
    cj["s"] = c.s();
    cj["v"] = c.v();
    colors.push_back(cj);
  }
  j["colors"] = colors;
  j["target_index"] = r.context.target_index;
  j["condition"] = context::to_string(r.context.condition);
  auto messages = nlohmann::ordered_json::array();
  for (const auto& m : r.messages) {
    nlohmann::ordered_json mj;
    mj["role"] = to_string(m.role);
    mj["text"] = m.utterance.raw_text;
    mj["language"] = to_string(m.utterance.language);
    messages.push_back(mj);
  }
  j["messages"] = messages;
  if (r.clicked_index) {
    j["clicked_index"] = *r.clicked_index;
  } else {
    j["clicked_index"] = nullptr;
  }
  return j;
}

GameRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("row is not a JSON object");
  GameRecord r;
  r.game_id = require_string(j, "game_id");
  r.round_index = require_int(j, "round_index");
  const auto& colors = require(j, "colors");
  if (!colors.is_array() || colors.size() != 3) throw DataError("field 'colors' must hold exactly 3 colors");
  for (std::size_t i = 0; i < 3; ++i) r.context.colors[i] = context::color_from_json(colors[i]);
  r.context.target_index = require_int(j, "target_index");
  check_index(r.context.target_index, "target_index");
  r.context.condition = context::parse_condition(require_string(j, "condition"));
  const auto& messages = require(j, "messages");
  if (!messages.is_array()) throw DataError("field 'messages' must be an array");
  for (const auto& mj : messages) {
    if (!mj.is_object()) throw DataError("message is not an object");
    Message m;
    m.role = parse_role(require_string(mj, "role"));
    m.utterance = make_utterance(require_string(mj, "text"), parse_language(require_string(mj, "language")));
    r.messages.push_back(std::move(m));
  }
  if (j.contains("clicked_index") && !j.at("clicked_index").is_null()) {
    const int c = require_int(j, "clicked_index");
    check_index(c, "clicked_index");
    r.clicked_index = c;
  }
  return r;
}

std::string to_jsonl(const std::vector<GameRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r).dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
    out.push_back('\n');
  }
  return out;
}

void save_corpus(const std::string& path, const std::vector<GameRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << to_jsonl(records);
  if (!out) throw DataError("failed writing '" + path + "'");
}

LoadResult parse_corpus(std::string_view text) {
  LoadResult result;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      result.records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      result.errors.push_back({line_no, std::string("invalid JSON: ") + e.what()});
    } catch (const Error& e) {
      result.errors.push_back({line_no, e.what()});
    }
  }
  return result;
}

LoadResult load_corpus(const std::string& path) { return parse_corpus(read_file(path)); }

std::vector<GameRecord> load_corpora_strict(const std::vector<std::string>& paths) {
  std::vector<GameRecord> all;
  std::string problems;
  for (const auto& p : paths) {
    auto res = load_corpus(p);
    for (const auto& e : res.errors) problems += "\n  " + p + ":" + std::to_string(e.line) + ": " + e.message;
    all.insert(all.end(), std::make_move_iterator(res.records.begin()), std::make_move_iterator(res.records.end()));
  }
  if (!problems.empty()) throw DataError("corpus rows rejected:" + problems);
  return all;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };
  while (i < text.size()) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        quoted = false;
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_row();
      ++i;
    } else if (c == '\n') {
      end_row();
    } else {
      field.push_back(c);
      field_started = true;
    }
    ++i;
  }
  if (quoted) throw DataError("CSV ends inside a quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

namespace {

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

int parse_int_field(const std::string& s, const std::string& field) {
  const auto v = parse_number(s);
  if (!v || *v != static_cast<double>(static_cast<long long>(*v))) {
    throw DataError("field '" + field + "' is not an integer: '" + s + "'");
  }
  return static_cast<int>(*v);
}

const std::set<std::string>& known_fields() {
  static const std::set<std::string> fields = [] {
    std::set<std::string> f = {"game_id", "round_index", "role", "text", "language", "condition", "target_index",
                               "clicked_index"};
    for (int i = 0; i < 3; ++i) {
      for (const char* ch : {"h", "s", "v", "l"}) f.insert("color" + std::to_string(i) + "_" + ch);
    }
    return f;
  }();
  return fields;
}

struct PendingRound {
  GameRecord record;
  std::size_t first_row = 0;
  bool has_condition = false;
};

}  // namespace

LoadResult import_csv(std::string_view csv_text, const nlohmann::json& mapping, const ImportOptions& opts) {
  if (!mapping.is_object()) throw DataError("column mapping must be a JSON object {column: field}");
  auto rows = parse_csv(csv_text);
  if (rows.empty()) throw DataError("CSV has no header row");
  const auto& header = rows.front();

  std::map<std::string, std::size_t> field_col;
  for (const auto& [column, field_json] : mapping.items()) {
    if (!field_json.is_string()) throw DataError("mapping value for column '" + column + "' must be a string");
    const auto field = field_json.get<std::string>();
    if (!known_fields().contains(field)) throw DataError("mapping names unknown field '" + field + "'");
    auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) throw DataError("mapped column '" + column + "' not in CSV header");
    field_col[field] = static_cast<std::size_t>(it - header.begin());
  }
  for (const char* f : {"game_id", "round_index", "text", "target_index"}) {
    if (!field_col.contains(f)) throw DataError(std::string("mapping lacks required field '") + f + "'");
  }
  bool hsl = false;
  for (int i = 0; i < 3; ++i) {
    const auto p = "color" + std::to_string(i) + "_";
    const bool has_v = field_col.contains(p + "v");
    const bool has_l = field_col.contains(p + "l");
    if (!field_col.contains(p + "h") || !field_col.contains(p + "s") || has_v == has_l) {
      throw DataError("mapping needs " + p + "h, " + p + "s and exactly one of " + p + "v / " + p + "l");
    }
    hsl = has_l;
  }

  LoadResult result;
  std::map<std::pair<std::string, int>, PendingRound> rounds;
  std::vector<std::pair<std::string, int>> order;
  std::set<std::pair<std::string, int>> bad;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto get = [&](const std::string& field) -> std::optional<std::string> {
      auto it = field_col.find(field);
      if (it == field_col.end()) return std::nullopt;
      if (it->second >= row.size()) throw DataError("row has too few columns");
      return row[it->second];
    };
    std::pair<std::string, int> key;
    try {
      key = {*get("game_id"), parse_int_field(*get("round_index"), "round_index")};
      if (bad.contains(key)) continue;
      auto [it, inserted] = rounds.try_emplace(key);
      auto& pending = it->second;
      if (inserted) {
        order.push_back(key);
        pending.first_row = r;
        auto& rec = pending.record;
        rec.game_id = key.first;
        rec.round_index = key.second;
        for (int i = 0; i < 3; ++i) {
          const auto p = "color" + std::to_string(i) + "_";
          auto num = [&](const std::string& f) {
            auto v = parse_number(*get(p + f));
            if (!v) throw DataError("field '" + p + f + "' is not a number");
            return *v;
          };
          try {
            rec.context.colors[static_cast<std::size_t>(i)] =
                hsl ? color::hsl_to_hsv(num("h"), num("s"), num("l")) : color::ColorHSV(num("h"), num("s"), num("v"));
          } catch (const ContractError& e) {
            throw DataError(e.what());
          }
        }
        rec.context.theta = opts.theta;
        rec.context.target_index = parse_int_field(*get("target_index"), "target_index");
        check_index(rec.context.target_index, "target_index");
        if (auto c = get("condition"); c && !c->empty()) {
          rec.context.condition = context::parse_condition(*c);
          pending.has_condition = true;
        }
      }
      auto& rec = pending.record;
      Language lang = opts.default_language;
      if (auto l = get("language"); l && !l->empty()) lang = parse_language(*l);
      Role role = Role::kSpeaker;
      if (auto ro = get("role"); ro && !ro->empty()) role = parse_role(*ro);
      if (auto c = get("clicked_index"); c && !c->empty()) {
        const int ci = parse_int_field(*c, "clicked_index");
        check_index(ci, "clicked_index");
        rec.clicked_index = ci;
      }
      const auto text = *get("text");
      if (!text.empty()) rec.messages.push_back({role, make_utterance(text, lang)});
    } catch (const Error& e) {
      result.errors.push_back({r, e.what()});
      if (!key.first.empty()) {
        bad.insert(key);
        rounds.erase(key);
      }
    }
  }

  for (const auto& key : order) {
    auto it = rounds.find(key);
    if (it == rounds.end()) continue;
    auto& p = it->second;
    if (!p.has_condition) {
      try {
        p.record.context.condition =
            context::classify_condition(p.record.context.colors, p.record.context.target_index, opts.theta);
      } catch (const Error& e) {
        result.errors.push_back({p.first_row, e.what()});
        continue;
      }
    }
    result.records.push_back(std::move(p.record));
  }
  return result;
}

LoadResult import_csv_file(const std::string& csv_path, const std::string& mapping_path, const ImportOptions& opts) {
  nlohmann::json mapping;
  try {
    mapping = nlohmann::json::parse(read_file(mapping_path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("mapping file '" + mapping_path + "' is not valid JSON: " + e.what());
  }
  return import_csv(read_file(csv_path), mapping, opts);
}

}  // namespace colorref::corpus
