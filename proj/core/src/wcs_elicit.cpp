#include "colorref/wcs.hpp"

#include <cmath>
#include <sstream>

#include "colorref/contextgen.hpp"
#include "colorref/error.hpp"
#include "colorref/svg.hpp"

namespace colorref::lexicon {

std::vector<context::ReferenceContext> wcs_chip_contexts(const color::WcsChip& chip, int n_contexts,
                                                         std::uint64_t seed) {
  Rng rng = Rng::derive({seed, static_cast<std::uint64_t>(chip.chip_index)});
  std::vector<context::ReferenceContext> out;
  out.reserve(static_cast<std::size_t>(n_contexts));
  for (int i = 0; i < n_contexts; ++i) {
    context::ReferenceContext ctx;
    ctx.colors[0] = chip.color;
    ctx.colors[1] = context::sample_stimulus_color(rng);
    ctx.colors[2] = context::sample_stimulus_color(rng);
    ctx.target_index = 0;
    out.push_back(ctx);
  }
  return out;
}

namespace {

// Mean probability of each description over the contexts.
std::vector<double> averaged_probs(const speaker::Speaker& s, const std::vector<std::vector<std::string>>& descs,
                                   const std::vector<context::ReferenceContext>& contexts, corpus::Language lang) {
  std::vector<speaker::ScoringQuery> queries;
  queries.reserve(descs.size() * contexts.size());
  for (const auto& d : descs) {
    for (const auto& c : contexts) queries.push_back({&c, &d, lang});
  }
  const auto lp = s.utterance_log_probs(queries);
  std::vector<double> out(descs.size(), 0.0);
  for (std::size_t i = 0; i < descs.size(); ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < contexts.size(); ++k) sum += std::exp(lp[i * contexts.size() + k]);
    out[i] = sum / static_cast<double>(contexts.size());
  }
  return out;
}

std::vector<std::string> split_term(const std::string& term) {
  std::vector<std::string> tokens;
  std::istringstream in(term);
  for (std::string t; in >> t;) tokens.push_back(t);
  return tokens;
}

}  // namespace

WcsMap elicit_wcs_terms(const speaker::Speaker& s, corpus::Language lang, int n_contexts, std::uint64_t seed) {
  if (n_contexts <= 0) throw ContractError("n_contexts must be positive");
  const auto& chips = color::wcs_palette();
  WcsMap m;
  m.language = lang;
  m.seed = seed;
  m.n_contexts = n_contexts;
  m.chip_terms.resize(chips.size());

  std::vector<std::vector<context::ReferenceContext>> chip_contexts;
  chip_contexts.reserve(chips.size());
  for (const auto& chip : chips) chip_contexts.push_back(wcs_chip_contexts(chip, n_contexts, seed));

  for (std::size_t c = 0; c < chips.size(); ++c) {
    std::vector<std::vector<std::string>> descs;
    for (const auto& ctx : chip_contexts[c]) {
      auto u = s.describe(ctx, lang);
      if (std::find(descs.begin(), descs.end(), u.tokens) == descs.end()) descs.push_back(std::move(u.tokens));
    }
    const auto probs = averaged_probs(s, descs, chip_contexts[c], lang);
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
      if (probs[i] > probs[best]) best = i;
    }
    m.chip_terms[c] = corpus::join_tokens(descs[best]);
  }

  for (const auto& term : m.chip_terms) m.term_scores.try_emplace(term);
  for (auto& [term, scores] : m.term_scores) {
    const auto tokens = split_term(term);
    std::vector<speaker::ScoringQuery> queries;
    queries.reserve(chips.size() * static_cast<std::size_t>(n_contexts));
    for (const auto& contexts : chip_contexts) {
      for (const auto& ctx : contexts) queries.push_back({&ctx, &tokens, lang});
    }
    const auto lp = s.utterance_log_probs(queries);
    scores.assign(chips.size(), 0.0);
    for (std::size_t c = 0; c < chips.size(); ++c) {
      double sum = 0.0;
      for (int k = 0; k < n_contexts; ++k) sum += std::exp(lp[c * static_cast<std::size_t>(n_contexts) + static_cast<std::size_t>(k)]);
      scores[c] = sum / n_contexts;
    }
    std::size_t star = 0;
    for (std::size_t c = 1; c < chips.size(); ++c) {
      if (scores[c] > scores[star]) star = c;
    }
    m.star_chip[term] = chips[star].chip_index;
  }
  return m;
}

nlohmann::ordered_json to_json(const WcsMap& m) {
  const auto& chips = color::wcs_palette();
  nlohmann::ordered_json j;
  j["language"] = corpus::to_string(m.language);
  j["seed"] = m.seed;
  j["n_contexts"] = m.n_contexts;
  auto chip_list = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < chips.size(); ++c) {
    nlohmann::ordered_json cj;
    cj["chip_index"] = chips[c].chip_index;
    cj["hue_column"] = chips[c].hue_column;
    cj["row"] = std::string(1, color::wcs_row_letter(chips[c].lightness_row));
    cj["term"] = m.chip_terms[c];
    chip_list.push_back(cj);
  }
  j["chips"] = chip_list;
  auto terms = nlohmann::ordered_json::array();
  for (const auto& [term, star] : m.star_chip) {
    nlohmann::ordered_json tj;
    tj["term"] = term;
    tj["star_chip"] = star;
    tj["star_probability"] = m.term_scores.at(term)[static_cast<std::size_t>(star - 1)];
    tj["chip_count"] = std::count(m.chip_terms.begin(), m.chip_terms.end(), term);
    terms.push_back(tj);
  }
  j["terms"] = terms;
  return j;
}

std::string wcs_svg(const WcsMap& m) {
  const auto& chips = color::wcs_palette();
  constexpr double cell = 22.0, left = 30.0, top = 40.0;
  const double width = left + cell * (color::kWcsHueColumns + 2) + 20;
  const double height = top + cell * 10 + 30 + 18.0 * static_cast<double>((m.star_chip.size() + 3) / 4);

  std::map<std::string, std::string> fill;
  for (const auto& [term, star] : m.star_chip) {
    const auto rgb = color::to_rgb8(color::hsv_to_rgb(chips[static_cast<std::size_t>(star - 1)].color));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb.r, rgb.g, rgb.b);
    fill[term] = buf;
  }

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left << "\" y=\"18\" font-size=\"13\">WCS color terms (" << corpus::to_string(m.language)
      << ", seed " << m.seed << ")</text>\n";
  for (int row = 0; row < 10; ++row) {
    out << "<text x=\"" << left - 14 << "\" y=\"" << top + cell * row + 15 << "\">" << color::wcs_row_letter(row)
        << "</text>\n";
  }
  for (int col = 0; col <= color::kWcsHueColumns; ++col) {
    if (col % 5 == 0) {
      const double x = left + cell * (col == 0 ? 0 : col + 1);
      out << "<text x=\"" << x + 4 << "\" y=\"" << top - 4 << "\">" << col << "</text>\n";
    }
  }
  for (std::size_t c = 0; c < chips.size(); ++c) {
    const auto& chip = chips[c];
    const double x = left + cell * (chip.hue_column == 0 ? 0 : chip.hue_column + 1);
    const double y = top + cell * chip.lightness_row;
    const auto& term = m.chip_terms[c];
    out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
        << fill[term] << "\" stroke=\"#888\" stroke-width=\"0.5\"><title>" << chip.chip_index << ": "
        << svg::escape(term) << "</title></rect>\n";
    if (m.star_chip.at(term) == chip.chip_index) {
      out << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + 15 << "\" text-anchor=\"middle\" font-size=\"14\">"
          << "\xE2\x98\x85</text>\n";
    }
  }
  std::size_t k = 0;
  for (const auto& [term, color_hex] : fill) {
    const double lx = left + 200.0 * static_cast<double>(k % 4);
    const double ly = top + cell * 10 + 24 + 18.0 * static_cast<double>(k / 4);
    out << "<rect x=\"" << lx << "\" y=\"" << ly - 10 << "\" width=\"12\" height=\"12\" fill=\"" << color_hex
        << "\" stroke=\"#888\"/>\n";
    out << "<text x=\"" << lx + 16 << "\" y=\"" << ly << "\">" << svg::escape(term.empty() ? "(empty)" : term)
        << "</text>\n";
    ++k;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace colorref::lexicon
