#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "colorref/corpus/records.hpp"
#include "colorref/speaker/model.hpp"

namespace colorref::speaker {

struct EpochStats {
  int epoch = 0;              // 1-based
  double train_loss = 0.0;    // mean per-token NLL over the epoch (training mode)
  std::optional<double> heldout_perplexity;
};

using EpochHook = std::function<void(const EpochStats&)>;

struct TrainResult {
  SpeakerModel model;
  int best_epoch = 0;  // 0: the initialization was kept
  std::vector<EpochStats> history;
};

/// Encodes examples [begin, end) of `order` into a decoder batch.
SequenceBatch make_batch(const std::vector<corpus::Example>& examples, std::span<const std::size_t> order,
                         const corpus::Vocabulary& vocab);

/// Mini-batch training on the mean per-token NLL (end tokens included).
/// Examples of both languages are shuffled together each epoch. The
/// returned parameters are those of the epoch with the lowest held-out
/// perplexity, or the lowest training loss when no held-out set is given.
/// A non-finite loss or gradient aborts with NumericError naming the epoch
/// and batch.
TrainResult train_speaker(const std::vector<corpus::Example>& train, const corpus::Vocabulary& vocab,
                          const TrainingConfig& cfg, const std::vector<corpus::Example>* heldout = nullptr,
                          const EpochHook& hook = {});

/// exp(mean per-token NLL), evaluation mode, out-of-vocabulary tokens scored
/// as the unknown token.
double corpus_perplexity(const SpeakerModel& model, const std::vector<corpus::Example>& examples);

}  // namespace colorref::speaker
