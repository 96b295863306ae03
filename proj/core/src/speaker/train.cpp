#include "colorref/speaker/train.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "colorref/error.hpp"

namespace colorref::speaker {

namespace {

template <typename T>
T get_field(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

nn::OptimizerConfig TrainingConfig::optimizer_config() const {
  nn::OptimizerConfig c;
  c.kind = optimizer;
  c.learning_rate = learning_rate;
  c.beta1 = beta1;
  c.beta2 = beta2;
  c.decay = rms_decay;
  c.epsilon = epsilon;
  c.clip_norm = clip_norm;
  return c;
}

void TrainingConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ContractError("learning_rate must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ContractError("dropout must be in [0, 1)");
  if (clip_norm && !(*clip_norm > 0.0)) throw ContractError("clip_norm must be positive");
  if (cell_size == 0 || embedding_size == 0 || projection_size == 0) throw ContractError("layer sizes must be positive");
  if (epochs < 0) throw ContractError("epochs must be non-negative");
  if (batch_size == 0) throw ContractError("batch_size must be positive");
  if (min_count < 1) throw ContractError("min_count must be at least 1");
  if (!(init_range > 0.0)) throw ContractError("init_range must be positive");
}

TrainingConfig monolingual_preset() {
  TrainingConfig c;
  c.optimizer = nn::OptimizerKind::kAdam;
  c.learning_rate = 0.004;
  c.dropout = 0.1;
  c.clip_norm.reset();
  c.cell_size = 100;
  c.embedding_size = 100;
  c.forget_bias = 0.0;
  c.nonlinearity = Activation::kTanh;
  return c;
}

TrainingConfig bilingual_preset() {
  TrainingConfig c;
  c.optimizer = nn::OptimizerKind::kRmsProp;
  c.learning_rate = 0.004;
  c.dropout = 0.1;
  c.clip_norm = 1.0;
  c.cell_size = 50;
  c.embedding_size = 100;
  c.forget_bias = 5.0;
  c.nonlinearity = Activation::kSigmoid;
  return c;
}

nlohmann::json to_json(const TrainingConfig& c) {
  return {{"optimizer", nn::to_string(c.optimizer)},
          {"learning_rate", c.learning_rate},
          {"dropout", c.dropout},
          {"clip_norm", c.clip_norm ? nlohmann::json(*c.clip_norm) : nlohmann::json(nullptr)},
          {"cell_size", c.cell_size},
          {"embedding_size", c.embedding_size},
          {"projection_size", c.projection_size},
          {"forget_bias", c.forget_bias},
          {"nonlinearity", to_string(c.nonlinearity)},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"min_count", c.min_count},
          {"init_range", c.init_range},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"rms_decay", c.rms_decay},
          {"epsilon", c.epsilon}};
}

TrainingConfig training_config_from_json(const nlohmann::json& j, TrainingConfig c) {
  if (!j.is_object()) throw DataError("training config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "description") continue;
    if (key == "optimizer") {
      c.optimizer = nn::parse_optimizer_kind(get_field<std::string>(j, "optimizer"));
    } else if (key == "learning_rate") {
      c.learning_rate = get_field<double>(j, "learning_rate");
    } else if (key == "dropout") {
      c.dropout = get_field<double>(j, "dropout");
    } else if (key == "clip_norm") {
      if (value.is_null()) {
        c.clip_norm.reset();
      } else {
        c.clip_norm = get_field<double>(j, "clip_norm");
      }
    } else if (key == "cell_size") {
      c.cell_size = get_field<std::size_t>(j, "cell_size");
    } else if (key == "embedding_size") {
      c.embedding_size = get_field<std::size_t>(j, "embedding_size");
    } else if (key == "projection_size") {
      c.projection_size = get_field<std::size_t>(j, "projection_size");
    } else if (key == "forget_bias") {
      c.forget_bias = get_field<double>(j, "forget_bias");
    } else if (key == "nonlinearity") {
      c.nonlinearity = parse_activation(get_field<std::string>(j, "nonlinearity"));
    } else if (key == "epochs") {
      c.epochs = get_field<int>(j, "epochs");
    } else if (key == "batch_size") {
      c.batch_size = get_field<std::size_t>(j, "batch_size");
    } else if (key == "seed") {
      c.seed = get_field<std::uint64_t>(j, "seed");
    } else if (key == "min_count") {
      c.min_count = get_field<int>(j, "min_count");
    } else if (key == "init_range") {
      c.init_range = get_field<double>(j, "init_range");
    } else if (key == "beta1") {
      c.beta1 = get_field<double>(j, "beta1");
    } else if (key == "beta2") {
      c.beta2 = get_field<double>(j, "beta2");
    } else if (key == "rms_decay") {
      c.rms_decay = get_field<double>(j, "rms_decay");
    } else if (key == "epsilon") {
      c.epsilon = get_field<double>(j, "epsilon");
    } else {
      throw DataError("unknown config field '" + key + "'");
    }
  }
  try {
    c.validate();
  } catch (const ContractError& e) {
    throw DataError(std::string("invalid training config: ") + e.what());
  }
  return c;
}

SequenceBatch make_batch(const std::vector<corpus::Example>& examples, std::span<const std::size_t> order,
                         const corpus::Vocabulary& vocab) {
  SequenceBatch batch;
  batch.contexts.reserve(order.size());
  batch.ids.reserve(order.size());
  batch.flags.reserve(order.size());
  for (std::size_t k : order) {
    const auto& ex = examples.at(k);
    batch.contexts.push_back(&ex.context);
    batch.ids.push_back(vocab.encode(ex.tokens));
    batch.flags.push_back(corpus::language_flag(ex.language));
  }
  return batch;
}

double corpus_perplexity(const SpeakerModel& model, const std::vector<corpus::Example>& examples) {
  if (examples.empty()) throw ContractError("perplexity of an empty dataset");
  constexpr std::size_t kChunk = 256;
  double nll = 0.0;
  std::size_t tokens = 0;
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t start = 0; start < order.size(); start += kChunk) {
    const auto idx = std::span(order).subspan(start, std::min(kChunk, order.size() - start));
    const auto batch = make_batch(examples, idx, model.vocabulary());
    const auto lp = model.sequence_log_probs(batch);
    for (std::size_t i = 0; i < lp.size(); ++i) {
      nll -= lp[i];
      tokens += batch.ids[i].size() + 1;
    }
  }
  return std::exp(nll / static_cast<double>(tokens));
}

TrainResult train_speaker(const std::vector<corpus::Example>& train, const corpus::Vocabulary& vocab,
                          const TrainingConfig& cfg, const std::vector<corpus::Example>* heldout,
                          const EpochHook& hook) {
  cfg.validate();
  if (train.empty()) throw ContractError("train_speaker: training data is empty");
  if (heldout && heldout->empty()) heldout = nullptr;

  TrainResult result{SpeakerModel(vocab, cfg), 0, {}};
  auto& model = result.model;
  Rng init_rng = Rng::derive({cfg.seed, 1});
  Rng order_rng = Rng::derive({cfg.seed, 2});
  Rng dropout_rng = Rng::derive({cfg.seed, 3});
  model.initialize(init_rng);

  auto params = model.parameters();
  auto snapshot = [&] {
    std::vector<nn::Tensor> values;
    for (const auto* p : params) values.push_back(p->value);
    return values;
  };
  auto best = snapshot();
  double best_score = heldout ? corpus_perplexity(model, *heldout) : std::numeric_limits<double>::infinity();

  nn::Optimizer optimizer(cfg.optimizer_config());
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle(order, order_rng);
    double epoch_nll = 0.0;
    std::size_t epoch_tokens = 0;
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_no) {
      const auto idx = std::span(order).subspan(start, std::min(cfg.batch_size, order.size() - start));
      const auto batch = make_batch(train, idx, vocab);
      try {
        nn::Graph g;
        std::size_t count = 0;
        const auto total = model.build_loss(g, batch, &dropout_rng, count);
        const auto loss = g.scale(total, 1.0 / static_cast<double>(count));
        for (auto* p : params) p->zero_grad();
        g.backward(loss);
        optimizer.step(params);
        epoch_nll += g.value(total)[0];
        epoch_tokens += count;
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_no) + ": " + e.what());
      }
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_nll / static_cast<double>(epoch_tokens);
    double score = stats.train_loss;
    if (heldout) {
      stats.heldout_perplexity = corpus_perplexity(model, *heldout);
      score = *stats.heldout_perplexity;
    }
    result.history.push_back(stats);
    if (hook) hook(stats);
    if (score < best_score) {
      best_score = score;
      best = snapshot();
      result.best_epoch = epoch;
    }
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    params[k]->value = best[k];
    params[k]->zero_grad();
  }
  return result;
}

}  // namespace colorref::speaker
