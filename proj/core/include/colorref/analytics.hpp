#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "colorref/corpus/records.hpp"
#include "colorref/speaker/speaker.hpp"

namespace colorref::analytics {

enum class Specificity { kBasic, kSpecific, kNominalModifier };

std::string to_string(Specificity s);

/// Marker tokens, English adjective list and specificity labels. The bundled
/// version is read from markers.tsv, adjectives_en.txt and specificity.tsv.
struct MarkerLexicon {
  std::string version;
  std::map<corpus::Language, std::set<std::string>> negation;
  std::map<corpus::Language, std::set<std::string>> comparative;  // marker tokens
  std::map<corpus::Language, std::set<std::string>> superlative;
  std::set<std::string> adjectives_en;
  std::map<std::string, Specificity> specificity;

  static const MarkerLexicon& bundled();
  /// Throws DataError on malformed lines.
  static MarkerLexicon parse(std::string_view markers_tsv, std::string_view adjectives_txt,
                             std::string_view specificity_tsv);
};

bool detect_negation(const std::vector<std::string>& tokens, corpus::Language lang, const MarkerLexicon& lex);
/// English: a marker token, "more" followed by an adjective, or an "-er"
/// token whose stem is an adjective (stem, stem+e, undoubled final
/// consonant, i -> y). Chinese: marker membership.
bool detect_comparative(const std::vector<std::string>& tokens, corpus::Language lang, const MarkerLexicon& lex);
/// As detect_comparative with "most" and "-est".
bool detect_superlative(const std::vector<std::string>& tokens, corpus::Language lang, const MarkerLexicon& lex);
bool is_specific(const std::vector<std::string>& tokens, const MarkerLexicon& lex);
bool has_nominal_modifier(const std::vector<std::string>& tokens, const MarkerLexicon& lex);

using MessageStatistic = std::function<double(const corpus::Utterance&)>;

struct Summary {
  double mean = 0.0;
  std::size_t count = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Per-condition summaries; empty buckets are absent.
struct ConditionStats {
  std::map<context::Condition, Summary> by_condition;
  std::size_t total_count() const;
};

inline constexpr int kBootstrapResamples = 1000;

/// Mean of `values` with a seeded percentile bootstrap 95% interval.
Summary summarize(const std::vector<double>& values, std::uint64_t seed, int resamples = kBootstrapResamples);

/// One value per speaker message, grouped by the round's condition.
ConditionStats condition_stats(const std::vector<corpus::GameRecord>& records, const MessageStatistic& stat,
                               std::uint64_t seed = 0);

/// Fraction of speaker messages with at least one token labeled specific.
ConditionStats specificity_rate(const std::vector<corpus::GameRecord>& records, const MarkerLexicon& lex,
                                std::uint64_t seed = 0);

struct CoverageReport {
  std::size_t tokens = 0;
  std::size_t covered = 0;  // tokens with a specificity label
  std::map<std::string, std::size_t> unlabeled;  // token -> count
  /// English "-er"/"-est" tokens the suffix rule did not accept.
  std::map<std::string, std::size_t> suffix_misses;
};

CoverageReport coverage(const std::vector<corpus::GameRecord>& records, const MarkerLexicon& lex);

struct PairedStats {
  ConditionStats human;
  ConditionStats model;
};

/// Human statistic over speaker messages versus the statistic over one
/// greedy model utterance per round, decoded in the round's language.
PairedStats compare_model_human(const speaker::Speaker& s, const std::vector<corpus::GameRecord>& records,
                                const MessageStatistic& stat, std::uint64_t seed = 0);

/// Named statistics used by the analyze and compare commands: "length",
/// "specificity", "comparative", "superlative", "negation", "nominal".
MessageStatistic named_statistic(const std::string& name, const MarkerLexicon& lex);
const std::vector<std::string>& statistic_names();

nlohmann::json to_json(const ConditionStats& s);
nlohmann::json to_json(const CoverageReport& c, std::size_t top = 50);

}  // namespace colorref::analytics
