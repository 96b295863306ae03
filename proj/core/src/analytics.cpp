#include "colorref/analytics.hpp"

#include <algorithm>
#include <cmath>

#include "colorref/error.hpp"
#include "colorref/resources.hpp"
#include "colorref/rng.hpp"

namespace colorref::analytics {

namespace {

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
  }
  return out;
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto tab = line.find('\t', pos);
    out.emplace_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

bool is_comment_or_blank(std::string_view line) {
  const auto first = line.find_first_not_of(" \t");
  return first == std::string_view::npos || line[first] == '#';
}

std::string read_version(std::string_view line, std::string& version) {
  const std::string_view key = "# version:";
  if (line.starts_with(key)) {
    auto v = line.substr(key.size());
    while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
    version = std::string(v);
  }
  return version;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// Adjective stems that could have produced `word` + `suffix`.
bool suffix_form_of_adjective(const std::string& word, std::string_view suffix, const std::set<std::string>& adjs) {
  if (word.size() <= suffix.size() + 1 || !word.ends_with(suffix)) return false;
  const std::string base = word.substr(0, word.size() - suffix.size());
  if (adjs.contains(base) || adjs.contains(base + "e")) return true;
  const std::size_t n = base.size();
  if (n >= 2 && base[n - 1] == base[n - 2] && !is_vowel(base[n - 1]) && adjs.contains(base.substr(0, n - 1))) {
    return true;
  }
  if (base.back() == 'i' && adjs.contains(base.substr(0, n - 1) + "y")) return true;
  return false;
}

bool detect_degree(const std::vector<std::string>& tokens, corpus::Language lang, const MarkerLexicon& lex,
                   const std::map<corpus::Language, std::set<std::string>>& markers, std::string_view analytic,
                   std::string_view suffix) {
  if (auto it = markers.find(lang); it != markers.end()) {
    for (const auto& t : tokens) {
      if (it->second.contains(t)) return true;
    }
  }
  if (lang != corpus::Language::kEnglish) return false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == analytic && i + 1 < tokens.size() && lex.adjectives_en.contains(tokens[i + 1])) return true;
    if (suffix_form_of_adjective(tokens[i], suffix, lex.adjectives_en)) return true;
  }
  return false;
}

}  // namespace

std::string to_string(Specificity s) {
  switch (s) {
    case Specificity::kBasic: return "basic";
    case Specificity::kSpecific: return "specific";
    case Specificity::kNominalModifier: return "nominal-modifier";
  }
  return "basic";
}

MarkerLexicon MarkerLexicon::parse(std::string_view markers_tsv, std::string_view adjectives_txt,
                                   std::string_view specificity_tsv) {
  MarkerLexicon lex;
  std::size_t n = 0;
  for (auto line : lines_of(markers_tsv)) {
    ++n;
    read_version(line, lex.version);
    if (is_comment_or_blank(line)) continue;
    const auto f = split_tabs(line);
    if (f.size() < 3) throw DataError("markers.tsv line " + std::to_string(n) + ": expected language, kind, token");
    const auto lang = corpus::parse_language(f[0]);
    if (f[1] == "negation") {
      lex.negation[lang].insert(f[2]);
    } else if (f[1] == "comparative") {
      lex.comparative[lang].insert(f[2]);
    } else if (f[1] == "superlative") {
      lex.superlative[lang].insert(f[2]);
    } else {
      throw DataError("markers.tsv line " + std::to_string(n) + ": unknown kind '" + f[1] + "'");
    }
  }
  for (auto line : lines_of(adjectives_txt)) {
    if (is_comment_or_blank(line)) continue;
    lex.adjectives_en.insert(split_tabs(line)[0]);
  }
  n = 0;
  for (auto line : lines_of(specificity_tsv)) {
    ++n;
    if (is_comment_or_blank(line)) continue;
    const auto f = split_tabs(line);
    if (f.size() < 2) throw DataError("specificity.tsv line " + std::to_string(n) + ": expected token, label");
    Specificity label;
    if (f[1] == "basic") {
      label = Specificity::kBasic;
    } else if (f[1] == "specific") {
      label = Specificity::kSpecific;
    } else if (f[1] == "nominal-modifier") {
      label = Specificity::kNominalModifier;
    } else {
      throw DataError("specificity.tsv line " + std::to_string(n) + ": unknown label '" + f[1] + "'");
    }
    lex.specificity[f[0]] = label;
  }
  return lex;
}

const MarkerLexicon& MarkerLexicon::bundled() {
  static const MarkerLexicon lex = parse(bundled_resource("markers.tsv"), bundled_resource("adjectives_en.txt"),
                                         bundled_resource("specificity.tsv"));
  return lex;
}

bool detect_negation(const std::vector<std::string>& tokens, corpus::Language lang, const MarkerLexicon& lex) {
  auto it = lex.negation.find(lang);
  if (it == lex.negation.end()) return false;
  return std::any_of(tokens.begin(), tokens.end(), [&](const auto& t) { return it->second.contains(t); });
}

bool detect_comparative(const std::vector<std::string>& tokens, corpus::Language lang, const MarkerLexicon& lex) {
  return detect_degree(tokens, lang, lex, lex.comparative, "more", "er");
}

bool detect_superlative(const std::vector<std::string>& tokens, corpus::Language lang, const MarkerLexicon& lex) {
  return detect_degree(tokens, lang, lex, lex.superlative, "most", "est");
}

bool is_specific(const std::vector<std::string>& tokens, const MarkerLexicon& lex) {
  return std::any_of(tokens.begin(), tokens.end(), [&](const auto& t) {
    auto it = lex.specificity.find(t);
    return it != lex.specificity.end() && it->second == Specificity::kSpecific;
  });
}

bool has_nominal_modifier(const std::vector<std::string>& tokens, const MarkerLexicon& lex) {
  return std::any_of(tokens.begin(), tokens.end(), [&](const auto& t) {
    auto it = lex.specificity.find(t);
    return it != lex.specificity.end() && it->second == Specificity::kNominalModifier;
  });
}

std::size_t ConditionStats::total_count() const {
  std::size_t n = 0;
  for (const auto& [c, s] : by_condition) n += s.count;
  return n;
}

Summary summarize(const std::vector<double>& values, std::uint64_t seed, int resamples) {
  if (values.empty()) throw ContractError("summarize: no values");
  if (resamples <= 0) throw ContractError("summarize: resamples must be positive");
  Summary s;
  s.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  Rng rng(seed);
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (auto& m : means) {
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += values[rng.uniform_int(values.size())];
    m = acc / static_cast<double>(values.size());
  }
  std::sort(means.begin(), means.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(means.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, means.size() - 1);
    return means[lo] + (pos - static_cast<double>(lo)) * (means[hi] - means[lo]);
  };
  s.ci_low = quantile(0.025);
  s.ci_high = quantile(0.975);
  return s;
}

ConditionStats condition_stats(const std::vector<corpus::GameRecord>& records, const MessageStatistic& stat,
                               std::uint64_t seed) {
  std::map<context::Condition, std::vector<double>> buckets;
  for (const auto& r : records) {
    for (const auto* u : r.speaker_messages()) buckets[r.context.condition].push_back(stat(*u));
  }
  ConditionStats out;
  for (const auto& [cond, values] : buckets) {
    out.by_condition[cond] = summarize(values, Rng::derive({seed, static_cast<std::uint64_t>(cond)}).next());
  }
  return out;
}

ConditionStats specificity_rate(const std::vector<corpus::GameRecord>& records, const MarkerLexicon& lex,
                                std::uint64_t seed) {
  return condition_stats(
      records, [&](const corpus::Utterance& u) { return is_specific(u.tokens, lex) ? 1.0 : 0.0; }, seed);
}

CoverageReport coverage(const std::vector<corpus::GameRecord>& records, const MarkerLexicon& lex) {
  CoverageReport c;
  for (const auto& r : records) {
    for (const auto* u : r.speaker_messages()) {
      for (const auto& t : u->tokens) {
        ++c.tokens;
        if (lex.specificity.contains(t)) {
          ++c.covered;
        } else {
          ++c.unlabeled[t];
        }
        if (u->language == corpus::Language::kEnglish) {
          const bool er = t.size() > 3 && t.ends_with("er") && !suffix_form_of_adjective(t, "er", lex.adjectives_en);
          const bool est =
              t.size() > 4 && t.ends_with("est") && !suffix_form_of_adjective(t, "est", lex.adjectives_en);
          if (er || est) ++c.suffix_misses[t];
        }
      }
    }
  }
  return c;
}

PairedStats compare_model_human(const speaker::Speaker& s, const std::vector<corpus::GameRecord>& records,
                                const MessageStatistic& stat, std::uint64_t seed) {
  PairedStats out;
  out.human = condition_stats(records, stat, seed);
  std::map<context::Condition, std::vector<double>> buckets;
  for (const auto& r : records) {
    if (!r.has_speaker_message()) continue;
    const auto u = s.describe(r.context, r.language());
    buckets[r.context.condition].push_back(stat(u));
  }
  for (const auto& [cond, values] : buckets) {
    out.model.by_condition[cond] = summarize(values, Rng::derive({seed, 100 + static_cast<std::uint64_t>(cond)}).next());
  }
  return out;
}

const std::vector<std::string>& statistic_names() {
  static const std::vector<std::string> names = {"length",      "specificity", "comparative",
                                                 "superlative", "negation",    "nominal"};
  return names;
}

MessageStatistic named_statistic(const std::string& name, const MarkerLexicon& lex) {
  const auto* l = &lex;
  if (name == "length") return [](const corpus::Utterance& u) { return static_cast<double>(u.tokens.size()); };
  if (name == "specificity") return [l](const corpus::Utterance& u) { return is_specific(u.tokens, *l) ? 1.0 : 0.0; };
  if (name == "comparative") {
    return [l](const corpus::Utterance& u) { return detect_comparative(u.tokens, u.language, *l) ? 1.0 : 0.0; };
  }
  if (name == "superlative") {
    return [l](const corpus::Utterance& u) { return detect_superlative(u.tokens, u.language, *l) ? 1.0 : 0.0; };
  }
  if (name == "negation") {
    return [l](const corpus::Utterance& u) { return detect_negation(u.tokens, u.language, *l) ? 1.0 : 0.0; };
  }
  if (name == "nominal") {
    return [l](const corpus::Utterance& u) { return has_nominal_modifier(u.tokens, *l) ? 1.0 : 0.0; };
  }
  throw DataError("unknown statistic '" + name + "'");
}

nlohmann::json to_json(const ConditionStats& s) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [cond, sum] : s.by_condition) {
    j[context::to_string(cond)] = {
        {"mean", sum.mean}, {"count", sum.count}, {"ci95", {sum.ci_low, sum.ci_high}}};
  }
  return j;
}

nlohmann::json to_json(const CoverageReport& c, std::size_t top) {
  auto top_of = [top](const std::map<std::string, std::size_t>& m) {
    std::vector<std::pair<std::string, std::size_t>> v(m.begin(), m.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (v.size() > top) v.resize(top);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [t, n] : v) arr.push_back({t, n});
    return arr;
  };
  return {{"tokens", c.tokens},
          {"covered", c.covered},
          {"coverage", c.tokens ? static_cast<double>(c.covered) / static_cast<double>(c.tokens) : 0.0},
          {"top_unlabeled", top_of(c.unlabeled)},
          {"suffix_misses", top_of(c.suffix_misses)}};
}

}  // namespace colorref::analytics
