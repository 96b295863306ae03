#pragma once

#include <span>
#include <string>
#include <vector>

#include "colorref/corpus/tokenize.hpp"
#include "colorref/corpus/vocabulary.hpp"
#include "colorref/numerics/tensor.hpp"

namespace colorref::lexicon {

struct PivotPair {
  std::string source;
  std::string target;
};

enum class Direction { kZhToEn, kEnToZh };

std::string to_string(Direction d);
/// "zh-en" or "en-zh".
Direction parse_direction(const std::string& text);

/// Chinese if the token contains a CJK ideograph, English otherwise.
corpus::Language token_language(const std::string& token);

/// Mean over pivots of row(target) - row(source), each pivot first oriented
/// so its source is in the direction's source language. `word_vectors` has
/// one row per vocabulary id.
std::vector<double> translation_vector(std::span<const PivotPair> pivots, const nn::Tensor& word_vectors,
                                       const corpus::Vocabulary& vocab, Direction direction);

struct LexiconEntry {
  std::string source;
  std::string target;
  double score = 0.0;
};

/// For each source token, the opposite-language, non-special vocabulary
/// token maximizing <row(source) + translation_vector, row(candidate)>.
/// A pivot token's own pivot partner is excluded from its candidates.
/// Ties go to the lower id.
std::vector<LexiconEntry> induce_lexicon(const std::vector<std::string>& sources, Direction direction,
                                         const nn::Tensor& word_vectors, const corpus::Vocabulary& vocab,
                                         std::span<const PivotPair> pivots);

std::string lexicon_tsv(const std::vector<LexiconEntry>& entries);

}  // namespace colorref::lexicon
