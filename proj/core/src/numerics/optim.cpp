#include "colorref/numerics/optim.hpp"

#include <cmath>

#include "colorref/error.hpp"

namespace colorref::nn {

namespace {

void check_inputs(std::span<Tensor* const> params, std::span<const Tensor* const> grads, OptimizerState& state,
                  OptimizerKind expected, const char* who) {
  if (state.config.kind != expected) throw ContractError(std::string(who) + ": optimizer state has the wrong kind");
  if (params.size() != grads.size()) throw ContractError(std::string(who) + ": params/grads count mismatch");
  if (state.config.learning_rate <= 0.0) throw ContractError(std::string(who) + ": learning rate must be positive");
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k]->shape() != grads[k]->shape()) {
      throw ShapeError(std::string(who) + "[" + std::to_string(k) + "]",
                       to_string(params[k]->shape()) + " vs grad " + to_string(grads[k]->shape()));
    }
    if (!grads[k]->all_finite()) throw NumericError(std::string(who) + ": non-finite gradient for parameter " + std::to_string(k));
  }
  auto init = [&](std::vector<Tensor>& acc) {
    if (acc.empty()) {
      for (auto* p : params) acc.emplace_back(p->shape());
    }
    if (acc.size() != params.size()) throw ContractError(std::string(who) + ": state was built for another parameter set");
    for (std::size_t k = 0; k < params.size(); ++k) {
      if (acc[k].shape() != params[k]->shape()) {
        throw ShapeError(std::string(who) + "[" + std::to_string(k) + "]", "accumulator shape mismatch");
      }
    }
  };
  init(state.second);
  if (expected == OptimizerKind::kAdam) init(state.first);
}

}  // namespace

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::kAdam ? "adam" : "rmsprop"; }

OptimizerKind parse_optimizer_kind(const std::string& text) {
  if (text == "adam" || text == "ADAM") return OptimizerKind::kAdam;
  if (text == "rmsprop" || text == "RMSProp" || text == "RMSPROP") return OptimizerKind::kRmsProp;
  throw DataError("unknown optimizer '" + text + "'");
}

void adam_step(std::span<Tensor* const> params, std::span<const Tensor* const> grads, OptimizerState& state) {
  check_inputs(params, grads, state, OptimizerKind::kAdam, "adam_step");
  const auto& cfg = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = *params[k];
    const auto& g = *grads[k];
    auto& m = state.first[k];
    auto& v = state.second[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

void rmsprop_step(std::span<Tensor* const> params, std::span<const Tensor* const> grads, OptimizerState& state) {
  check_inputs(params, grads, state, OptimizerKind::kRmsProp, "rmsprop_step");
  const auto& cfg = state.config;
  state.step += 1;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = *params[k];
    const auto& g = *grads[k];
    auto& ms = state.second[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      ms[i] = cfg.decay * ms[i] + (1.0 - cfg.decay) * g[i] * g[i];
      p[i] -= cfg.learning_rate * g[i] / (std::sqrt(ms[i]) + cfg.epsilon);
    }
  }
}

double clip_gradients(std::span<Tensor* const> grads, double max_norm) {
  if (!(max_norm > 0.0)) throw ContractError("clip_gradients: max_norm must be positive");
  double sq = 0.0;
  for (const auto* g : grads) sq += dot(g->data(), g->data());
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double factor = max_norm / norm;
    for (auto* g : grads) {
      for (auto& v : g->vec()) v *= factor;
    }
  }
  return norm;
}

Tensor dropout_mask(const Shape& shape, double rate, Rng& rng, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ContractError("dropout rate must be in [0, 1)");
  Tensor mask(shape, 1.0);
  if (!training || rate == 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (auto& v : mask.vec()) v = rng.uniform() < rate ? 0.0 : keep_scale;
  return mask;
}

void Optimizer::step(std::span<Parameter* const> params) {
  std::vector<Tensor*> values;
  std::vector<Tensor*> grads;
  values.reserve(params.size());
  grads.reserve(params.size());
  for (auto* p : params) {
    if (p->grad.shape() != p->value.shape()) p->zero_grad();
    values.push_back(&p->value);
    grads.push_back(&p->grad);
  }
  if (state_.config.clip_norm) clip_gradients(grads, *state_.config.clip_norm);
  std::vector<const Tensor*> cgrads(grads.begin(), grads.end());
  if (state_.config.kind == OptimizerKind::kAdam) {
    adam_step(values, cgrads, state_);
  } else {
    rmsprop_step(values, cgrads, state_);
  }
}

}  // namespace colorref::nn
