#pragma once

#include <optional>
#include <string>
#include <vector>

#include "colorref/contextgen.hpp"
#include "colorref/corpus/tokenize.hpp"

namespace colorref::corpus {

enum class Role { kSpeaker, kListener };

std::string to_string(Role role);
Role parse_role(std::string_view text);

struct Utterance {
  std::vector<std::string> tokens;
  Language language = Language::kEnglish;
  std::string raw_text;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

/// Tokenizes `text`; throws DataError if nothing is left.
Utterance make_utterance(std::string text, Language lang);

struct Message {
  Role role = Role::kSpeaker;
  Utterance utterance;

  friend bool operator==(const Message&, const Message&) = default;
};

/// One round of a reference game.
struct GameRecord {
  std::string game_id;
  int round_index = 0;
  context::ReferenceContext context;
  std::vector<Message> messages;  // chat order
  std::optional<int> clicked_index;

  std::vector<const Utterance*> speaker_messages() const;
  bool has_speaker_message() const;
  /// Set iff the round was completed.
  std::optional<bool> correct() const;
  /// Language of the first speaker message (English if none).
  Language language() const;

  friend bool operator==(const GameRecord&, const GameRecord&) = default;
};

/// One training/evaluation item: all speaker messages of a round joined into
/// a single token sequence.
struct Example {
  context::ReferenceContext context;
  std::vector<std::string> tokens;
  Language language = Language::kEnglish;
};

/// Rounds without a speaker message are skipped.
std::vector<Example> make_examples(const std::vector<GameRecord>& records);

/// Speaker messages only.
std::size_t count_speaker_messages(const std::vector<GameRecord>& records);

}  // namespace colorref::corpus
