#pragma once

// Hand-built speakers with closed-form utterance probabilities, shared by the
// unit and acceptance tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "colorref/speaker/speaker.hpp"

namespace colorref::testing {

inline constexpr int kTabularTokens = 5;
inline constexpr double kContinue = 0.7;  // probability of emitting another token

inline std::string tabular_token(int k) { return "w" + std::to_string(k); }

/// Hue bucket of a color: five 72-degree sectors.
inline int hue_bucket(const color::ColorHSV& c) { return std::min(4, static_cast<int>(c.h() / 72.0)); }

/// S(u | c_t, C) = prod_i [0.7 * softmax(row)[u_i]] * 0.3 where row depends on
/// the target's hue bucket, penalised at the distractors' buckets.
class TabularSpeaker : public speaker::Speaker {
 public:
  explicit TabularSpeaker(double sharpness = 1.0, double distractor_penalty = 0.5)
      : sharpness_(sharpness), penalty_(distractor_penalty) {}

  std::array<double, kTabularTokens> token_log_probs(const context::ReferenceContext& ctx) const {
    static constexpr double kTable[kTabularTokens][kTabularTokens] = {
        {2.0, 0.5, 0.1, 0.0, 0.3},
        {0.4, 2.0, 0.6, 0.1, 0.0},
        {0.0, 0.7, 2.0, 0.5, 0.2},
        {0.2, 0.0, 0.4, 2.0, 0.9},
        {0.8, 0.1, 0.0, 0.6, 2.0},
    };
    const int b = hue_bucket(ctx.colors[static_cast<std::size_t>(ctx.target_index)]);
    std::array<double, kTabularTokens> row{};
    for (int k = 0; k < kTabularTokens; ++k) row[static_cast<std::size_t>(k)] = sharpness_ * kTable[b][k];
    for (int d = 0; d < 3; ++d) {
      if (d != ctx.target_index) row[static_cast<std::size_t>(hue_bucket(ctx.colors[static_cast<std::size_t>(d)]))] -= penalty_;
    }
    double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double r : row) z += std::exp(r - mx);
    for (double& r : row) r = r - mx - std::log(z);
    return row;
  }

  double utterance_log_prob(const std::vector<std::string>& tokens, const context::ReferenceContext& ctx,
                            corpus::Language) const override {
    const auto row = token_log_probs(ctx);
    double lp = std::log(1.0 - kContinue);
    for (const auto& t : tokens) {
      int k = -1;
      for (int j = 0; j < kTabularTokens; ++j) {
        if (t == tabular_token(j)) k = j;
      }
      lp += std::log(kContinue) + (k < 0 ? std::log(1e-9) : row[static_cast<std::size_t>(k)]);
    }
    return lp;
  }

  corpus::Utterance describe(const context::ReferenceContext& ctx, corpus::Language lang,
                             const speaker::DecodeOptions& = {}) const override {
    const auto row = token_log_probs(ctx);
    const int k = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    corpus::Utterance u;
    u.tokens = {tabular_token(k)};
    u.language = lang;
    u.raw_text = u.tokens.front();
    return u;
  }

 private:
  double sharpness_;
  double penalty_;
};

/// Every utterance has the same probability in every context.
class UniformSpeaker : public speaker::Speaker {
 public:
  double utterance_log_prob(const std::vector<std::string>& tokens, const context::ReferenceContext&,
                            corpus::Language) const override {
    return -static_cast<double>(tokens.size() + 1) * std::log(6.0);
  }
  corpus::Utterance describe(const context::ReferenceContext&, corpus::Language lang,
                             const speaker::DecodeOptions& = {}) const override {
    return {{tabular_token(0)}, lang, tabular_token(0)};
  }
};

}  // namespace colorref::testing
