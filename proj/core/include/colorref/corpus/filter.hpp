#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include <nlohmann/json.hpp>

#include "colorref/corpus/records.hpp"

namespace colorref::corpus {

struct FilterConfig {
  double length_sigma = 4.0;
  int spam_duplicate_threshold = 25;
};

struct LengthStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::size_t count = 0;
};

/// Every input message is either kept or counted in exactly one removal
/// class, so messages_in == messages_out + removed_length + removed_spam +
/// removed_orphaned.
struct FilterReport {
  std::size_t games_in = 0;
  std::size_t games_out = 0;
  std::size_t games_removed_spam = 0;
  std::size_t rounds_in = 0;
  std::size_t rounds_out = 0;
  std::size_t rounds_removed_no_speaker = 0;
  std::size_t messages_in = 0;
  std::size_t messages_out = 0;
  std::size_t removed_length = 0;
  std::size_t removed_spam = 0;
  std::size_t removed_orphaned = 0;  // listener messages of rounds with no speaker message left
  std::map<Language, LengthStats> length_stats;

  bool reconciles() const { return messages_in == messages_out + removed_length + removed_spam + removed_orphaned; }
};

struct FilterResult {
  std::vector<GameRecord> records;
  FilterReport report;
};

/// Length filter (per-language mean + length_sigma * sigma over all
/// messages), then the spam filter: a game is dropped when the messages whose
/// text occurs at least twice in it number spam_duplicate_threshold or more.
/// Rounds left without any speaker message are dropped too.
FilterResult filter_corpus(const std::vector<GameRecord>& records, const FilterConfig& cfg = {});

/// Number of messages in one game whose text is repeated within that game.
std::size_t duplicate_message_count(const std::vector<const GameRecord*>& game);

nlohmann::json to_json(const FilterReport& r);

struct SplitRatios {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  std::vector<GameRecord> train;
  std::vector<GameRecord> dev;
  std::vector<GameRecord> test;
};

/// Shuffles game ids with `seed` and cuts them by the ratios; all rounds of
/// a game land in one part, in their input order.
DatasetSplit split_dataset(const std::vector<GameRecord>& records, const SplitRatios& ratios, std::uint64_t seed);

}  // namespace colorref::corpus
