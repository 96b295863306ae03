#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "colorref/contextgen.hpp"
#include "colorref/corpus/records.hpp"

namespace colorref::speaker {

struct DecodeOptions {
  enum class Mode { kGreedy, kSample };
  Mode mode = Mode::kGreedy;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  std::size_t max_len = 20;
};

/// One utterance-scoring request. The context's target_index designates the
/// color being described.
struct ScoringQuery {
  const context::ReferenceContext* context = nullptr;
  const std::vector<std::string>* tokens = nullptr;
  corpus::Language language = corpus::Language::kEnglish;
};

/// A conditional speaker S(u | language, target, context). Implementations
/// must be safe for concurrent const use.
class Speaker {
 public:
  virtual ~Speaker() = default;

  /// log S(u | ...), including the sequence-end token.
  virtual double utterance_log_prob(const std::vector<std::string>& tokens, const context::ReferenceContext& ctx,
                                    corpus::Language lang) const = 0;

  /// Batched scoring; the default calls utterance_log_prob per query.
  virtual std::vector<double> utterance_log_probs(std::span<const ScoringQuery> queries) const;

  /// Produces a description of the context's target.
  virtual corpus::Utterance describe(const context::ReferenceContext& ctx, corpus::Language lang,
                                     const DecodeOptions& opts = {}) const = 0;
};

}  // namespace colorref::speaker
