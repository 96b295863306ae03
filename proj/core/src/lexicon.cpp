#include "colorref/lexicon.hpp"

#include <limits>
#include <sstream>

#include "colorref/error.hpp"

namespace colorref::lexicon {

namespace {

int require_id(const corpus::Vocabulary& vocab, const std::string& token) {
  if (!vocab.contains(token)) throw DataError("token '" + token + "' is not in the vocabulary");
  return vocab.id(token);
}

corpus::Language source_language(Direction d) {
  return d == Direction::kZhToEn ? corpus::Language::kChinese : corpus::Language::kEnglish;
}

void check_rows(const nn::Tensor& w, const corpus::Vocabulary& vocab) {
  if (w.rank() != 2 || w.rows() != vocab.size()) {
    throw ShapeError("word_vectors", nn::to_string(w.shape()) + " does not have one row per vocabulary token (" +
                                         std::to_string(vocab.size()) + ")");
  }
}

}  // namespace

std::string to_string(Direction d) { return d == Direction::kZhToEn ? "zh-en" : "en-zh"; }

Direction parse_direction(const std::string& text) {
  if (text == "zh-en") return Direction::kZhToEn;
  if (text == "en-zh") return Direction::kEnToZh;
  throw DataError("unknown direction '" + text + "' (expected zh-en or en-zh)");
}

corpus::Language token_language(const std::string& token) {
  return corpus::contains_cjk(token) ? corpus::Language::kChinese : corpus::Language::kEnglish;
}

std::vector<double> translation_vector(std::span<const PivotPair> pivots, const nn::Tensor& word_vectors,
                                       const corpus::Vocabulary& vocab, Direction direction) {
  if (pivots.empty()) throw ContractError("translation_vector needs at least one pivot pair");
  check_rows(word_vectors, vocab);
  const std::size_t dim = word_vectors.cols();
  std::vector<double> v(dim, 0.0);
  const auto src_lang = source_language(direction);
  for (const auto& p : pivots) {
    auto from = require_id(vocab, p.source);
    auto to = require_id(vocab, p.target);
    if (token_language(p.source) != src_lang) std::swap(from, to);
    const auto a = word_vectors.row_span(static_cast<std::size_t>(from));
    const auto b = word_vectors.row_span(static_cast<std::size_t>(to));
    for (std::size_t k = 0; k < dim; ++k) v[k] += b[k] - a[k];
  }
  for (auto& x : v) x /= static_cast<double>(pivots.size());
  return v;
}

std::vector<LexiconEntry> induce_lexicon(const std::vector<std::string>& sources, Direction direction,
                                         const nn::Tensor& word_vectors, const corpus::Vocabulary& vocab,
                                         std::span<const PivotPair> pivots) {
  const auto offset = translation_vector(pivots, word_vectors, vocab, direction);
  const auto target_lang =
      direction == Direction::kZhToEn ? corpus::Language::kEnglish : corpus::Language::kChinese;
  std::vector<int> candidates;
  for (std::size_t id = corpus::Vocabulary::kNumSpecial; id < vocab.size(); ++id) {
    if (token_language(vocab.tokens()[id]) == target_lang) candidates.push_back(static_cast<int>(id));
  }
  if (candidates.empty()) throw DataError("no " + corpus::to_string(target_lang) + " candidates in the vocabulary");

  std::vector<LexiconEntry> out;
  for (const auto& src : sources) {
    const int sid = require_id(vocab, src);
    if (token_language(src) == target_lang) {
      throw DataError("source token '" + src + "' is not in the " + to_string(direction) + " source language");
    }
    std::vector<int> excluded;
    for (const auto& p : pivots) {
      if (p.source == src) excluded.push_back(vocab.id(p.target));
      if (p.target == src) excluded.push_back(vocab.id(p.source));
    }
    const auto row = word_vectors.row_span(static_cast<std::size_t>(sid));
    std::vector<double> query(row.begin(), row.end());
    for (std::size_t k = 0; k < query.size(); ++k) query[k] += offset[k];
    LexiconEntry best{src, {}, -std::numeric_limits<double>::infinity()};
    for (int c : candidates) {
      if (std::find(excluded.begin(), excluded.end(), c) != excluded.end()) continue;
      const double s = nn::dot(query, word_vectors.row_span(static_cast<std::size_t>(c)));
      if (s > best.score) {
        best.score = s;
        best.target = vocab.tokens()[static_cast<std::size_t>(c)];
      }
    }
    if (best.target.empty()) throw DataError("empty candidate pool for '" + src + "'");
    out.push_back(std::move(best));
  }
  return out;
}

std::string lexicon_tsv(const std::vector<LexiconEntry>& entries) {
  std::ostringstream out;
  out << "source\ttarget\tscore\n";
  for (const auto& e : entries) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", e.score);
    out << e.source << '\t' << e.target << '\t' << buf << '\n';
  }
  return out.str();
}

}  // namespace colorref::lexicon
