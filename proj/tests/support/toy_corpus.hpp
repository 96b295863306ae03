#pragma once

#include <string>
#include <vector>

#include "colorref/contextgen.hpp"
#include "colorref/corpus/records.hpp"
#include "colorref/rng.hpp"

namespace colorref::testing {

inline constexpr int kToyBuckets = 6;

inline std::string toy_word(int bucket) {
  static const char* words[kToyBuckets] = {"red", "yellow", "green", "cyan", "blue", "magenta"};
  return words[bucket];
}

/// Rounds whose three colors come from distinct 60-degree hue buckets; the
/// speaker message is the target bucket's word, so it singles out the target.
inline std::vector<corpus::GameRecord> toy_records(std::size_t n, std::uint64_t seed,
                                                   corpus::Language lang = corpus::Language::kEnglish) {
  std::vector<corpus::GameRecord> out;
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const int b = static_cast<int>(i % kToyBuckets);
    const int t = static_cast<int>(i % 3);
    std::array<color::ColorHSV, 3> colors;
    context::Condition cond{};
    // Redraw until the triple falls into a difficulty condition.
    for (;;) {
      int d1 = static_cast<int>(rng.uniform_int(kToyBuckets - 1));
      if (d1 >= b) ++d1;
      int d2 = 0;
      do {
        d2 = static_cast<int>(rng.uniform_int(kToyBuckets));
      } while (d2 == b || d2 == d1);
      auto hue = [&](int bucket) { return 60.0 * bucket + 30.0 + rng.uniform(-10.0, 10.0); };
      colors[static_cast<std::size_t>(t)] = color::ColorHSV(hue(b), 80.0, color::kStimulusValue);
      colors[static_cast<std::size_t>((t + 1) % 3)] = color::ColorHSV(hue(d1), 80.0, color::kStimulusValue);
      colors[static_cast<std::size_t>((t + 2) % 3)] = color::ColorHSV(hue(d2), 80.0, color::kStimulusValue);
      try {
        cond = context::classify_condition(colors, t);
        break;
      } catch (const context::UnclassifiableError&) {
      }
    }
    corpus::GameRecord r;
    r.game_id = "toy" + std::to_string(i / 8);
    r.round_index = static_cast<int>(i % 8) + 1;
    r.context.colors = colors;
    r.context.target_index = t;
    r.context.condition = cond;
    r.messages.push_back({corpus::Role::kSpeaker, corpus::make_utterance(toy_word(b), lang)});
    r.clicked_index = t;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace colorref::testing
