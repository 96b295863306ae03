#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colorref/numerics/graph.hpp"
#include "colorref/rng.hpp"

namespace colorref::nn {

enum class OptimizerKind { kAdam, kRmsProp };

std::string to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(const std::string& text);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 0.004;
  double beta1 = 0.9;    // Adam
  double beta2 = 0.999;  // Adam
  double decay = 0.9;    // RMSProp mean-square decay
  double epsilon = 1e-8;
  std::optional<double> clip_norm;
};

/// Per-parameter accumulators. `first` holds Adam's first moment; `second`
/// holds Adam's second moment or RMSProp's running mean square.
struct OptimizerState {
  OptimizerConfig config;
  std::uint64_t step = 0;
  std::vector<Tensor> first;
  std::vector<Tensor> second;

  explicit OptimizerState(OptimizerConfig cfg = {}) : config(cfg) {}
};

/// Bias-corrected Adam update of `params` in place.
/// Throws ShapeError on shape mismatch and NumericError on non-finite gradients.
void adam_step(std::span<Tensor* const> params, std::span<const Tensor* const> grads, OptimizerState& state);

/// RMSProp update: ms = decay*ms + (1-decay)*g^2; p -= lr * g / (sqrt(ms) + eps).
void rmsprop_step(std::span<Tensor* const> params, std::span<const Tensor* const> grads, OptimizerState& state);

/// Global-L2-norm clipping. Returns the norm before clipping.
double clip_gradients(std::span<Tensor* const> grads, double max_norm);

/// Inverted-dropout mask: kept entries are 1/(1-rate), dropped entries 0.
/// With `training == false` the mask is all ones.
Tensor dropout_mask(const Shape& shape, double rate, Rng& rng, bool training = true);

/// Applies clipping (when configured) and one optimizer update to Parameter
/// objects, using their accumulated `grad`.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config) : state_(config) {}

  void step(std::span<Parameter* const> params);

  const OptimizerState& state() const noexcept { return state_; }
  OptimizerState& state() noexcept { return state_; }

 private:
  OptimizerState state_;
};

}  // namespace colorref::nn
