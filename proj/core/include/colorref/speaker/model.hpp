#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "colorref/corpus/records.hpp"
#include "colorref/corpus/vocabulary.hpp"
#include "colorref/numerics/lstm.hpp"
#include "colorref/numerics/optim.hpp"
#include "colorref/speaker/features.hpp"
#include "colorref/speaker/speaker.hpp"

namespace colorref::speaker {

enum class Activation { kTanh, kSigmoid };

std::string to_string(Activation a);
Activation parse_activation(const std::string& text);

/// Hyperparameters of one training run. JSON config files use these field
/// names; absent fields keep their defaults.
struct TrainingConfig {
  nn::OptimizerKind optimizer = nn::OptimizerKind::kAdam;
  double learning_rate = 0.004;
  double dropout = 0.1;
  std::optional<double> clip_norm;
  std::size_t cell_size = 100;
  std::size_t embedding_size = 100;
  std::size_t projection_size = 100;
  double forget_bias = 0.0;
  Activation nonlinearity = Activation::kTanh;
  int epochs = 100;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;
  int min_count = 2;
  double init_range = 0.08;
  // Optimizer constants.
  double beta1 = 0.9;
  double beta2 = 0.999;
  double rms_decay = 0.9;
  double epsilon = 1e-8;

  nn::OptimizerConfig optimizer_config() const;
  /// Throws ContractError on non-positive sizes or rates.
  void validate() const;

  friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

/// Monolingual preset: Adam, no clipping, cell 100, forget bias 0, tanh.
TrainingConfig monolingual_preset();
/// Bilingual preset: RMSProp, clip 1, cell 50, forget bias 5, sigmoid.
TrainingConfig bilingual_preset();

nlohmann::json to_json(const TrainingConfig& cfg);
/// Overlays `j` onto `base`; unknown keys throw DataError.
TrainingConfig training_config_from_json(const nlohmann::json& j, TrainingConfig base = {});

/// A batch of sequences to run through the decoder. Token ids exclude the
/// start and end symbols.
struct SequenceBatch {
  std::vector<const context::ReferenceContext*> contexts;
  std::vector<std::vector<int>> ids;
  std::vector<double> flags;
};

/// Encoder-decoder speaker.
///
/// The encoder LSTM reads the three colors target first, then the two
/// distractors in display order; each input is the activated color
/// projection with the language flag appended. The decoder LSTM reads
/// [token embedding | final encoder state | flag] at every step, and its
/// output goes through W_out (cell x vocab) and a softmax over the whole
/// shared vocabulary. Dropout (training only) is applied to the decoder input
/// and the decoder output.
class SpeakerModel : public Speaker {
 public:
  SpeakerModel(corpus::Vocabulary vocab, TrainingConfig cfg);

  const corpus::Vocabulary& vocabulary() const noexcept { return vocab_; }
  const TrainingConfig& config() const noexcept { return cfg_; }

  /// Every trainable tensor, in a fixed order.
  std::vector<nn::Parameter*> parameters();
  std::vector<const nn::Parameter*> parameters() const;

  /// Fills weights with uniform(-init_range, init_range) draws and forget
  /// biases with the configured value.
  void initialize(Rng& rng);
  /// Zeros the weight rows that read the language flag.
  void zero_language_flag_weights();

  /// Rows are output-layer word vectors (vocab x cell); the transpose of W_out.
  nn::Tensor word_vectors() const;

  /// Builds the per-step log-softmax nodes for a batch. With a dropout RNG
  /// the graph is in training mode. Returns the per-step log-prob nodes; row
  /// b of step t predicts token t of sequence b (the end token at t == len).
  std::vector<nn::Var> build_decoder(nn::Graph& g, const SequenceBatch& batch, Rng* dropout_rng) const;
  std::vector<nn::Var> build_decoder(nn::Graph& g, const SequenceBatch& batch, Rng* dropout_rng);

  /// Sum of token negative log likelihoods over the batch (training mode if
  /// `dropout_rng` is given); also returns the token count including ends.
  nn::Var build_loss(nn::Graph& g, const SequenceBatch& batch, Rng* dropout_rng, std::size_t& token_count);

  /// Final encoder hidden state, 1 x cell.
  nn::Tensor encode_context(const context::ReferenceContext& ctx, corpus::Language lang) const;

  /// Next-token distribution after `prefix` (ids; sequence start implied).
  std::vector<double> token_distribution(std::span<const int> prefix, const context::ReferenceContext& ctx,
                                         corpus::Language lang) const;

  /// log s(u_i | u_<i, ...) for each token followed by the end token.
  std::vector<double> token_log_probs(const std::vector<std::string>& tokens, const context::ReferenceContext& ctx,
                                      corpus::Language lang) const;

  /// Batched per-sequence log probabilities including the end token.
  std::vector<double> sequence_log_probs(const SequenceBatch& batch) const;

  double utterance_log_prob(const std::vector<std::string>& tokens, const context::ReferenceContext& ctx,
                            corpus::Language lang) const override;
  std::vector<double> utterance_log_probs(std::span<const ScoringQuery> queries) const override;
  corpus::Utterance describe(const context::ReferenceContext& ctx, corpus::Language lang,
                             const DecodeOptions& opts = {}) const override;

  /// Token ids of the decoded utterance (without the end token).
  std::vector<int> decode_ids(const context::ReferenceContext& ctx, corpus::Language lang,
                              const DecodeOptions& opts = {}) const;

  // Trainable tensors (public for checkpointing and tests).
  nn::Parameter proj_w;  // kFeatureDim x projection
  nn::Parameter proj_b;  // 1 x projection
  nn::LstmWeights encoder;
  nn::Parameter embedding;  // vocab x embedding
  nn::LstmWeights decoder;
  nn::Parameter out_w;  // cell x vocab
  nn::Parameter out_b;  // 1 x vocab

 private:
  corpus::Vocabulary vocab_;
  TrainingConfig cfg_;
};

/// Target-first color order used by the encoder.
std::array<color::ColorHSV, 3> target_first(const context::ReferenceContext& ctx);

}  // namespace colorref::speaker
