#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "colorref/corpus/records.hpp"

namespace colorref::corpus {

/// Token <-> id bijection with dense ids. Ids 0, 1, 2 are the sequence
/// start, sequence end and unknown tokens.
class Vocabulary {
 public:
  static constexpr int kStart = 0;
  static constexpr int kEnd = 1;
  static constexpr int kUnk = 2;
  static constexpr std::size_t kNumSpecial = 3;
  static constexpr const char* kStartToken = "<s>";
  static constexpr const char* kEndToken = "</s>";
  static constexpr const char* kUnkToken = "<unk>";

  Vocabulary();
  /// Rebuilds from tokens in id order (the first three must be the
  /// specials); counts default to zero.
  static Vocabulary from_tokens(std::vector<std::string> tokens, std::vector<std::uint64_t> counts = {},
                                int min_count = 1);

  /// Adds a token (no-op if present) and returns its id.
  int add(const std::string& token, std::uint64_t count = 0);

  std::size_t size() const noexcept { return tokens_.size(); }
  bool contains(const std::string& token) const { return index_.contains(token); }
  /// Unknown id for tokens outside the vocabulary.
  int id(const std::string& token) const;
  const std::string& token(int id) const;
  std::uint64_t count(int id) const { return counts_.at(static_cast<std::size_t>(id)); }
  static bool is_special(int id) noexcept { return id >= 0 && id < static_cast<int>(kNumSpecial); }

  std::vector<int> encode(std::span<const std::string> tokens) const;
  std::vector<std::string> decode(std::span<const int> ids) const;

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  int min_count() const noexcept { return min_count_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.counts_ == b.counts_ && a.min_count_ == b.min_count_;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, int> index_;
  int min_count_ = 1;
};

/// Keeps tokens seen at least `min_count` times, ordered by count
/// (descending) then token bytes. Special tokens in the input are ignored.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& sequences, int min_count = 2);
/// Counts tokens of speaker messages.
Vocabulary build_vocabulary(const std::vector<GameRecord>& records, int min_count = 2);

}  // namespace colorref::corpus
