#include "colorref/corpus/records.hpp"

#include "colorref/error.hpp"

namespace colorref::corpus {

std::string to_string(Role role) { return role == Role::kSpeaker ? "speaker" : "listener"; }

Role parse_role(std::string_view text) {
  std::string lower(text);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "speaker") return Role::kSpeaker;
  if (lower == "listener") return Role::kListener;
  throw DataError("unknown role '" + std::string(text) + "'");
}

Utterance make_utterance(std::string text, Language lang) {
  Utterance u;
  u.tokens = tokenize(text, lang);
  if (u.tokens.empty()) throw DataError("message is empty after tokenization");
  u.language = lang;
  u.raw_text = std::move(text);
  return u;
}

std::vector<const Utterance*> GameRecord::speaker_messages() const {
  std::vector<const Utterance*> out;
  for (const auto& m : messages) {
    if (m.role == Role::kSpeaker) out.push_back(&m.utterance);
  }
  return out;
}

bool GameRecord::has_speaker_message() const {
  for (const auto& m : messages) {
    if (m.role == Role::kSpeaker) return true;
  }
  return false;
}

std::optional<bool> GameRecord::correct() const {
  if (!clicked_index) return std::nullopt;
  return *clicked_index == context.target_index;
}

Language GameRecord::language() const {
  for (const auto& m : messages) {
    if (m.role == Role::kSpeaker) return m.utterance.language;
  }
  return Language::kEnglish;
}

std::vector<Example> make_examples(const std::vector<GameRecord>& records) {
  std::vector<Example> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    Example ex;
    for (const auto* u : r.speaker_messages()) ex.tokens.insert(ex.tokens.end(), u->tokens.begin(), u->tokens.end());
    if (ex.tokens.empty()) continue;
    ex.context = r.context;
    ex.language = r.language();
    out.push_back(std::move(ex));
  }
  return out;
}

std::size_t count_speaker_messages(const std::vector<GameRecord>& records) {
  std::size_t n = 0;
  for (const auto& r : records) n += r.speaker_messages().size();
  return n;
}

}  // namespace colorref::corpus
