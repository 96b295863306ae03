#include "colorref/corpus/vocabulary.hpp"

#include <algorithm>
#include <map>

#include "colorref/error.hpp"

namespace colorref::corpus {

Vocabulary::Vocabulary() {
  add(kStartToken);
  add(kEndToken);
  add(kUnkToken);
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens, std::vector<std::uint64_t> counts, int min_count) {
  if (tokens.size() < kNumSpecial || tokens[0] != kStartToken || tokens[1] != kEndToken || tokens[2] != kUnkToken) {
    throw DataError("vocabulary must start with the special tokens <s>, </s>, <unk>");
  }
  if (!counts.empty() && counts.size() != tokens.size()) throw DataError("vocabulary counts do not match tokens");
  Vocabulary v;
  v.min_count_ = min_count;
  for (std::size_t i = kNumSpecial; i < tokens.size(); ++i) {
    if (v.contains(tokens[i])) throw DataError("duplicate vocabulary token '" + tokens[i] + "'");
    v.add(tokens[i]);
  }
  if (!counts.empty()) v.counts_ = std::move(counts);
  return v;
}

int Vocabulary::add(const std::string& token, std::uint64_t count) {
  if (auto it = index_.find(token); it != index_.end()) return it->second;
  const int id = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  counts_.push_back(count);
  index_.emplace(token, id);
  return id;
}

int Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw ContractError("token id " + std::to_string(id) + " outside vocabulary of size " + std::to_string(size()));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

std::vector<std::string> Vocabulary::decode(std::span<const int> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(token(i));
  return out;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& sequences, int min_count) {
  if (min_count < 1) throw ContractError("min_count must be at least 1");
  std::map<std::string, std::uint64_t> counts;
  for (const auto& seq : sequences) {
    for (const auto& t : seq) {
      if (t == Vocabulary::kStartToken || t == Vocabulary::kEndToken || t == Vocabulary::kUnkToken) continue;
      ++counts[t];
    }
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (const auto& [t, n] : counts) {
    if (n >= static_cast<std::uint64_t>(min_count)) kept.emplace_back(t, n);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  for (const auto& [t, n] : kept) v.add(t, n);
  return Vocabulary::from_tokens(v.tokens(), v.counts(), min_count);
}

Vocabulary build_vocabulary(const std::vector<GameRecord>& records, int min_count) {
  std::vector<std::vector<std::string>> seqs;
  for (const auto& r : records) {
    for (const auto* u : r.speaker_messages()) seqs.push_back(u->tokens);
  }
  return build_vocabulary(seqs, min_count);
}

}  // namespace colorref::corpus
