#pragma once

#include <string>
#include <vector>

#include "colorref/contextgen.hpp"
#include "support/tabular_speaker.hpp"

namespace colorref::testing {

/// Twenty fixed contexts over the five hue buckets, some with repeated
/// buckets so the listener meets exact ties.
inline std::vector<context::ReferenceContext> enumerated_contexts() {
  std::vector<context::ReferenceContext> out;
  for (int i = 0; i < 20; ++i) {
    const int b[3] = {i % 5, (i / 5 + i) % 5, (3 * i + 1) % 5};
    context::ReferenceContext ctx;
    for (int k = 0; k < 3; ++k) {
      ctx.colors[static_cast<std::size_t>(k)] = color::ColorHSV(72.0 * b[k] + 20.0 + 5.0 * k, 70.0, color::kStimulusValue);
    }
    ctx.target_index = i % 3;
    out.push_back(ctx);
  }
  return out;
}

/// All utterances over the tabular vocabulary with one or two tokens.
inline std::vector<std::vector<std::string>> enumerated_utterances() {
  std::vector<std::vector<std::string>> out;
  for (int a = 0; a < kTabularTokens; ++a) {
    out.push_back({tabular_token(a)});
    for (int b = 0; b < kTabularTokens; ++b) out.push_back({tabular_token(a), tabular_token(b)});
  }
  return out;
}

/// Brute force: score every candidate target, keep the first maximum.
inline int brute_force_listener(const speaker::Speaker& s, const std::vector<std::string>& u,
                                context::ReferenceContext ctx) {
  int best = 0;
  double best_score = 0.0;
  for (int t = 0; t < 3; ++t) {
    ctx.target_index = t;
    const double score = s.utterance_log_prob(u, ctx, corpus::Language::kEnglish);
    if (t == 0 || score > best_score) {
      best = t;
      best_score = score;
    }
  }
  return best;
}

}  // namespace colorref::testing
