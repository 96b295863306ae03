#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "colorref/colorspace.hpp"
#include "colorref/corpus/tokenize.hpp"
#include "colorref/speaker/speaker.hpp"

namespace colorref::lexicon {

/// Result of eliciting color terms for the 330 WCS chips.
struct WcsMap {
  corpus::Language language = corpus::Language::kEnglish;
  std::uint64_t seed = 0;
  int n_contexts = 10;
  std::vector<std::string> chip_terms;  // index chip_index - 1; tokens joined by spaces
  /// Averaged probability of each elected term on every chip (index chip_index - 1).
  std::map<std::string, std::vector<double>> term_scores;
  std::map<std::string, int> star_chip;  // term -> chip_index
};

/// For every chip: draws n_contexts pairs of distractors uniform over the
/// stimulus gamut (stream derived from (seed, chip_index)), greedy-decodes a
/// description in each context, averages each distinct description's
/// probability over all of the chip's contexts, and elects the best. Each
/// elected term is then scored on every chip; its star chip is the argmax
/// (ties to the lowest chip index).
WcsMap elicit_wcs_terms(const speaker::Speaker& s, corpus::Language lang, int n_contexts, std::uint64_t seed);

/// The n_contexts contexts used for a chip (target at display index 0).
std::vector<context::ReferenceContext> wcs_chip_contexts(const color::WcsChip& chip, int n_contexts,
                                                         std::uint64_t seed);

nlohmann::ordered_json to_json(const WcsMap& m);

/// WCS grid (achromatic column plus 40 hue columns by rows A..J); each chip is
/// filled with its term's star-chip color and labeled, stars mark star chips.
std::string wcs_svg(const WcsMap& m);

}  // namespace colorref::lexicon
