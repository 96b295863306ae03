#include "colorref/corpus/filter.hpp"

#include <cmath>
#include <set>
#include <unordered_map>

#include "colorref/error.hpp"
#include "colorref/rng.hpp"

namespace colorref::corpus {

namespace {

// Games in order of first appearance.
std::vector<std::string> game_order(const std::vector<GameRecord>& records) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (seen.insert(r.game_id).second) order.push_back(r.game_id);
  }
  return order;
}

}  // namespace

std::size_t duplicate_message_count(const std::vector<const GameRecord*>& game) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto* r : game) {
    for (const auto& m : r->messages) ++counts[join_tokens(m.utterance.tokens)];
  }
  std::size_t dup = 0;
  for (const auto& [text, n] : counts) {
    if (n >= 2) dup += n;
  }
  return dup;
}

FilterResult filter_corpus(const std::vector<GameRecord>& records, const FilterConfig& cfg) {
  if (!(cfg.length_sigma > 0.0) || cfg.spam_duplicate_threshold <= 0) {
    throw ContractError("filter_corpus: thresholds must be positive");
  }
  FilterResult result;
  auto& rep = result.report;
  rep.rounds_in = records.size();
  rep.games_in = game_order(records).size();

  // Length statistics per language over all messages.
  std::map<Language, std::pair<double, double>> sums;
  for (const auto& r : records) {
    for (const auto& m : r.messages) {
      const auto n = static_cast<double>(m.utterance.tokens.size());
      auto& s = sums[m.utterance.language];
      s.first += n;
      s.second += n * n;
      ++rep.length_stats[m.utterance.language].count;
      ++rep.messages_in;
    }
  }
  std::map<Language, double> limit;
  for (auto& [lang, st] : rep.length_stats) {
    const auto n = static_cast<double>(st.count);
    st.mean = sums[lang].first / n;
    st.stddev = std::sqrt(std::max(0.0, sums[lang].second / n - st.mean * st.mean));
    limit[lang] = st.mean + cfg.length_sigma * st.stddev;
  }

  std::vector<GameRecord> kept;
  kept.reserve(records.size());
  for (const auto& r : records) {
    GameRecord copy = r;
    copy.messages.clear();
    for (const auto& m : r.messages) {
      if (static_cast<double>(m.utterance.tokens.size()) > limit[m.utterance.language]) {
        ++rep.removed_length;
      } else {
        copy.messages.push_back(m);
      }
    }
    kept.push_back(std::move(copy));
  }

  std::map<std::string, std::vector<const GameRecord*>> games;
  for (const auto& r : kept) games[r.game_id].push_back(&r);
  std::set<std::string> spam;
  for (const auto& [id, rounds] : games) {
    if (duplicate_message_count(rounds) >= static_cast<std::size_t>(cfg.spam_duplicate_threshold)) spam.insert(id);
  }
  rep.games_removed_spam = spam.size();

  for (auto& r : kept) {
    if (spam.contains(r.game_id)) {
      rep.removed_spam += r.messages.size();
      continue;
    }
    rep.messages_out += r.messages.size();
    result.records.push_back(std::move(r));
  }
  // Rounds left without a speaker message are unusable; their remaining
  // (listener) messages are counted as orphaned.
  std::vector<GameRecord> final_records;
  final_records.reserve(result.records.size());
  for (auto& r : result.records) {
    if (!r.has_speaker_message()) {
      ++rep.rounds_removed_no_speaker;
      rep.messages_out -= r.messages.size();
      rep.removed_orphaned += r.messages.size();
      continue;
    }
    final_records.push_back(std::move(r));
  }
  result.records = std::move(final_records);
  rep.rounds_out = result.records.size();
  rep.games_out = game_order(result.records).size();
  return result;
}

nlohmann::json to_json(const FilterReport& r) {
  nlohmann::json stats = nlohmann::json::object();
  for (const auto& [lang, st] : r.length_stats) {
    stats[to_string(lang)] = {{"mean", st.mean}, {"stddev", st.stddev}, {"count", st.count}};
  }
  return {{"games_in", r.games_in},
          {"games_out", r.games_out},
          {"games_removed_spam", r.games_removed_spam},
          {"rounds_in", r.rounds_in},
          {"rounds_out", r.rounds_out},
          {"rounds_removed_no_speaker", r.rounds_removed_no_speaker},
          {"messages_in", r.messages_in},
          {"messages_out", r.messages_out},
          {"removed_length", r.removed_length},
          {"removed_spam", r.removed_spam},
          {"removed_orphaned", r.removed_orphaned},
          {"length_stats", stats}};
}

DatasetSplit split_dataset(const std::vector<GameRecord>& records, const SplitRatios& ratios, std::uint64_t seed) {
  const double total = ratios.train + ratios.dev + ratios.test;
  if (ratios.train < 0.0 || ratios.dev < 0.0 || ratios.test < 0.0 || std::fabs(total - 1.0) > 1e-9) {
    throw ContractError("split ratios must be non-negative and sum to 1");
  }
  auto ids = game_order(records);
  Rng rng(seed);
  shuffle(ids, rng);
  const auto n = ids.size();
  const auto n_train = static_cast<std::size_t>(std::llround(ratios.train * static_cast<double>(n)));
  const auto n_dev =
      std::min(n - std::min(n, n_train), static_cast<std::size_t>(std::llround(ratios.dev * static_cast<double>(n))));
  std::map<std::string, int> part;
  for (std::size_t i = 0; i < n; ++i) part[ids[i]] = i < n_train ? 0 : (i < n_train + n_dev ? 1 : 2);

  DatasetSplit out;
  for (const auto& r : records) {
    switch (part.at(r.game_id)) {
      case 0: out.train.push_back(r); break;
      case 1: out.dev.push_back(r); break;
      default: out.test.push_back(r); break;
    }
  }
  return out;
}

}  // namespace colorref::corpus
