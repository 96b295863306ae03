#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "colorref/corpus/records.hpp"
#include "colorref/rng.hpp"
#include "colorref/speaker/model.hpp"
#include "colorref/speaker/speaker.hpp"

namespace colorref::eval {

inline constexpr double kTieTolerance = 1e-12;

struct ListenerInference {
  std::array<double, 3> scores{};  // log S(u | c_t, C) for t = 0, 1, 2
  int t_star = 0;
  bool tie = false;
};

/// Argmax with ties (gap below kTieTolerance) resolved toward the lowest index.
ListenerInference infer_from_scores(const std::array<double, 3>& scores);

/// Noisy-channel listener with a uniform prior over targets: scores the
/// utterance with each color in turn as the target. The colors keep their
/// display order; only the target designation changes.
ListenerInference pragmatic_listener(const speaker::Speaker& s, const std::vector<std::string>& tokens,
                                     const std::array<color::ColorHSV, 3>& colors, corpus::Language lang);

/// Listener decisions for many examples, scored through the speaker's
/// batched interface.
std::vector<ListenerInference> pragmatic_listener_batch(const speaker::Speaker& s,
                                                        std::span<const corpus::Example> examples);

struct ConditionAccuracy {
  std::size_t n = 0;
  std::size_t correct = 0;
  double accuracy() const { return n ? static_cast<double>(correct) / static_cast<double>(n) : 0.0; }
};

class VocabPolicy {
 public:
  enum class Kind { kFixedUnion, kMinCount };

  static VocabPolicy fixed_union() { return VocabPolicy(Kind::kFixedUnion, 1); }
  static VocabPolicy min_count(int n);
  /// "fixed-union" or "min-count:N".
  static VocabPolicy parse(const std::string& text);

  Kind kind() const noexcept { return kind_; }
  int n() const noexcept { return n_; }
  std::string name() const;

  /// FIXED_UNION: every token of `union_corpora` (both languages).
  /// MIN_COUNT(n): tokens seen at least n times in `train`.
  std::set<std::string> vocabulary(const std::vector<corpus::Example>& train,
                                   const std::vector<corpus::Example>& union_corpora) const;

 private:
  VocabPolicy(Kind k, int n) : kind_(k), n_(n) {}
  Kind kind_;
  int n_;
};

struct PerplexityReport {
  std::string policy;
  double perplexity = 0.0;
  double oov_rate = 0.0;  // fraction of (non-end) tokens mapped to unknown by the policy
  std::size_t tokens = 0;  // scored tokens including end tokens
};

/// exp(mean per-token NLL, end tokens included) after mapping tokens outside
/// `policy_vocab` to the unknown token.
PerplexityReport perplexity(const speaker::Speaker& s, const std::vector<corpus::Example>& dataset,
                            const std::set<std::string>& policy_vocab, const std::string& policy_name);

struct EvalReport {
  std::string dataset_id;
  std::size_t n = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  std::map<context::Condition, ConditionAccuracy> per_condition;
  std::vector<bool> outcomes;  // per example, in input order
  std::optional<PerplexityReport> perplexity;
  nlohmann::json significance = nlohmann::json::object();
};

/// Fraction of examples whose listener decision equals the true target.
EvalReport pragmatic_informativeness(const speaker::Speaker& s, const std::vector<corpus::Example>& dataset,
                                     const std::string& dataset_id = {});

nlohmann::json to_json(const EvalReport& r);

/// Two-sided paired approximate permutation test on the accuracy difference.
/// Each sample swaps every pair with probability 1/2; returns
/// (#{|d_sim| >= |d_obs|} + 1) / (n_samples + 1).
double permutation_test(const std::vector<bool>& a, const std::vector<bool>& b, std::size_t n_samples, Rng& rng);

/// Exact two-sided p value over all swap patterns (only discordant pairs
/// matter). Practical for up to ~25 discordant pairs.
double exact_permutation_p(const std::vector<bool>& a, const std::vector<bool>& b);

struct CurvePoint {
  double en_fraction = 0.0;
  double zh_fraction = 0.0;
  std::size_t en_size = 0;
  std::size_t zh_size = 0;
  std::optional<double> dev_accuracy;
  std::string error;
};

/// One trained model per (en_fraction, zh_fraction) point. Each language's
/// training examples are shuffled once with `seed` and every point takes a
/// prefix, so larger fractions contain smaller ones. A failing point records
/// its error and the remaining points still run.
std::vector<CurvePoint> learning_curve(const std::vector<corpus::Example>& en_train,
                                       const std::vector<corpus::Example>& zh_train,
                                       const std::vector<std::pair<double, double>>& points,
                                       const speaker::TrainingConfig& cfg, const std::vector<corpus::Example>& dev,
                                       std::uint64_t seed);

std::string learning_curve_csv(const std::vector<CurvePoint>& points);

}  // namespace colorref::eval
