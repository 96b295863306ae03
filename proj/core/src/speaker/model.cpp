#include "colorref/speaker/model.hpp"

#include <algorithm>
#include <cmath>

#include "colorref/error.hpp"

namespace colorref::speaker {

using nn::Graph;
using nn::Tensor;
using nn::Var;

namespace {

constexpr std::size_t kScoringChunk = 256;

struct Encoded {
  Var context;
  Var flags;
};

template <typename Self>
Encoded encode_impl(Self& self, Graph& g, std::span<const context::ReferenceContext* const> contexts,
                    std::span<const double> flags) {
  const std::size_t b = contexts.size();
  const std::size_t hidden = self.config().cell_size;
  Tensor flag_col({b, 1});
  for (std::size_t i = 0; i < b; ++i) flag_col[i] = flags[i];
  const Var flag = g.constant(std::move(flag_col), "flag");
  nn::LstmState state{g.constant(Tensor::zeros(b, hidden), "enc.h0"), g.constant(Tensor::zeros(b, hidden), "enc.c0")};
  std::vector<std::array<color::ColorHSV, 3>> ordered;
  ordered.reserve(b);
  for (const auto* ctx : contexts) ordered.push_back(target_first(*ctx));
  for (std::size_t k = 0; k < 3; ++k) {
    Tensor feats({b, kFeatureDim});
    for (std::size_t i = 0; i < b; ++i) {
      const auto f = color_features(ordered[i][k]);
      std::copy(f.begin(), f.end(), feats.row_span(i).begin());
    }
    Var x = g.add(g.matmul(g.constant(std::move(feats), "color" + std::to_string(k)), g.param(self.proj_w)),
                  g.param(self.proj_b));
    x = self.config().nonlinearity == Activation::kTanh ? g.tanh(x) : g.sigmoid(x);
    state = nn::lstm_cell(g, g.concat({x, flag}), state, self.encoder);
  }
  return {state.h, flag};
}

template <typename Self>
Var step_impl(Self& self, Graph& g, const std::vector<int>& inputs, const Encoded& enc, nn::LstmState& state,
              Rng* dropout_rng) {
  const auto& cfg = self.config();
  Var x = g.concat({g.gather(g.param(self.embedding), inputs), enc.context, enc.flags});
  if (dropout_rng && cfg.dropout > 0.0) x = g.dropout(x, nn::dropout_mask(g.value(x).shape(), cfg.dropout, *dropout_rng));
  state = nn::lstm_cell(g, x, state, self.decoder);
  Var h = state.h;
  if (dropout_rng && cfg.dropout > 0.0) h = g.dropout(h, nn::dropout_mask(g.value(h).shape(), cfg.dropout, *dropout_rng));
  return g.log_softmax(g.add(g.matmul(h, g.param(self.out_w)), g.param(self.out_b)));
}

template <typename Self>
std::vector<Var> build_impl(Self& self, Graph& g, const SequenceBatch& batch, Rng* dropout_rng) {
  const std::size_t b = batch.ids.size();
  if (b == 0 || batch.contexts.size() != b || batch.flags.size() != b) {
    throw ContractError("SequenceBatch: contexts, ids and flags must be non-empty and equally long");
  }
  const std::size_t vocab = self.vocabulary().size();
  std::size_t max_len = 0;
  for (const auto& seq : batch.ids) {
    for (int id : seq) {
      if (id < 0 || static_cast<std::size_t>(id) >= vocab) throw ContractError("token id outside the vocabulary");
    }
    max_len = std::max(max_len, seq.size());
  }
  const auto enc = encode_impl(self, g, batch.contexts, batch.flags);
  const std::size_t hidden = self.config().cell_size;
  nn::LstmState state{g.constant(Tensor::zeros(b, hidden), "dec.h0"), g.constant(Tensor::zeros(b, hidden), "dec.c0")};
  std::vector<Var> steps;
  steps.reserve(max_len + 1);
  std::vector<int> inputs(b);
  for (std::size_t t = 0; t <= max_len; ++t) {
    for (std::size_t i = 0; i < b; ++i) {
      const auto& seq = batch.ids[i];
      inputs[i] = t == 0 ? corpus::Vocabulary::kStart : (t - 1 < seq.size() ? seq[t - 1] : corpus::Vocabulary::kEnd);
    }
    steps.push_back(step_impl(self, g, inputs, enc, state, dropout_rng));
  }
  return steps;
}

int step_target(const std::vector<int>& seq, std::size_t t) {
  if (t < seq.size()) return seq[t];
  if (t == seq.size()) return corpus::Vocabulary::kEnd;
  return -1;
}

}  // namespace

std::vector<double> Speaker::utterance_log_probs(std::span<const ScoringQuery> queries) const {
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(utterance_log_prob(*q.tokens, *q.context, q.language));
  return out;
}

std::string to_string(Activation a) { return a == Activation::kTanh ? "tanh" : "sigmoid"; }

Activation parse_activation(const std::string& text) {
  if (text == "tanh") return Activation::kTanh;
  if (text == "sigmoid") return Activation::kSigmoid;
  throw DataError("unknown nonlinearity '" + text + "'");
}

std::array<color::ColorHSV, 3> target_first(const context::ReferenceContext& ctx) {
  if (ctx.target_index < 0 || ctx.target_index > 2) throw ContractError("target_index must be 0, 1 or 2");
  std::array<color::ColorHSV, 3> out;
  std::size_t k = 0;
  out[k++] = ctx.colors[static_cast<std::size_t>(ctx.target_index)];
  for (std::size_t i = 0; i < 3; ++i) {
    if (static_cast<int>(i) != ctx.target_index) out[k++] = ctx.colors[i];
  }
  return out;
}

SpeakerModel::SpeakerModel(corpus::Vocabulary vocab, TrainingConfig cfg) : vocab_(std::move(vocab)), cfg_(cfg) {
  cfg_.validate();
  const std::size_t v = vocab_.size();
  const std::size_t h = cfg_.cell_size;
  const std::size_t p = cfg_.projection_size;
  const std::size_t e = cfg_.embedding_size;
  proj_w = nn::Parameter("proj.w", Tensor({kFeatureDim, p}));
  proj_b = nn::Parameter("proj.b", Tensor({1, p}));
  encoder.wx = nn::Parameter("encoder.wx", Tensor({p + 1, 4 * h}));
  encoder.wh = nn::Parameter("encoder.wh", Tensor({h, 4 * h}));
  encoder.b = nn::Parameter("encoder.b", Tensor({1, 4 * h}));
  embedding = nn::Parameter("embedding", Tensor({v, e}));
  decoder.wx = nn::Parameter("decoder.wx", Tensor({e + h + 1, 4 * h}));
  decoder.wh = nn::Parameter("decoder.wh", Tensor({h, 4 * h}));
  decoder.b = nn::Parameter("decoder.b", Tensor({1, 4 * h}));
  out_w = nn::Parameter("out.w", Tensor({h, v}));
  out_b = nn::Parameter("out.b", Tensor({1, v}));
}

std::vector<nn::Parameter*> SpeakerModel::parameters() {
  return {&proj_w, &proj_b, &encoder.wx, &encoder.wh, &encoder.b, &embedding,
          &decoder.wx, &decoder.wh, &decoder.b, &out_w, &out_b};
}

std::vector<const nn::Parameter*> SpeakerModel::parameters() const {
  return {&proj_w, &proj_b, &encoder.wx, &encoder.wh, &encoder.b, &embedding,
          &decoder.wx, &decoder.wh, &decoder.b, &out_w, &out_b};
}

void SpeakerModel::initialize(Rng& rng) {
  const double r = cfg_.init_range;
  for (auto* p : parameters()) {
    for (auto& x : p->value.vec()) x = rng.uniform(-r, r);
    p->zero_grad();
  }
  const std::size_t h = cfg_.cell_size;
  for (auto* b : {&encoder.b, &decoder.b}) {
    for (std::size_t k = 0; k < 4 * h; ++k) b->value[k] = (k >= h && k < 2 * h) ? cfg_.forget_bias : 0.0;
  }
}

void SpeakerModel::zero_language_flag_weights() {
  for (auto* w : {&encoder.wx, &decoder.wx}) {
    auto row = w->value.row_span(w->value.rows() - 1);
    std::fill(row.begin(), row.end(), 0.0);
  }
}

Tensor SpeakerModel::word_vectors() const {
  const auto& w = out_w.value;
  Tensor t({w.cols(), w.rows()});
  for (std::size_t r = 0; r < w.rows(); ++r) {
    for (std::size_t c = 0; c < w.cols(); ++c) t(c, r) = w(r, c);
  }
  return t;
}

std::vector<Var> SpeakerModel::build_decoder(Graph& g, const SequenceBatch& batch, Rng* dropout_rng) const {
  return build_impl(*this, g, batch, dropout_rng);
}

std::vector<Var> SpeakerModel::build_decoder(Graph& g, const SequenceBatch& batch, Rng* dropout_rng) {
  return build_impl(*this, g, batch, dropout_rng);
}

Var SpeakerModel::build_loss(Graph& g, const SequenceBatch& batch, Rng* dropout_rng, std::size_t& token_count) {
  const auto steps = build_decoder(g, batch, dropout_rng);
  token_count = 0;
  Var total{};
  for (std::size_t t = 0; t < steps.size(); ++t) {
    std::vector<int> targets(batch.ids.size());
    for (std::size_t i = 0; i < batch.ids.size(); ++i) {
      targets[i] = step_target(batch.ids[i], t);
      if (targets[i] >= 0) ++token_count;
    }
    const Var nll = g.nll(steps[t], std::move(targets));
    total = t == 0 ? nll : g.add(total, nll);
  }
  return total;
}

Tensor SpeakerModel::encode_context(const context::ReferenceContext& ctx, corpus::Language lang) const {
  Graph g;
  const context::ReferenceContext* p = &ctx;
  const double flag = corpus::language_flag(lang);
  return g.value(encode_impl(*this, g, std::span(&p, 1), std::span(&flag, 1)).context);
}

std::vector<double> SpeakerModel::token_distribution(std::span<const int> prefix, const context::ReferenceContext& ctx,
                                                     corpus::Language lang) const {
  Graph g;
  const context::ReferenceContext* p = &ctx;
  const double flag = corpus::language_flag(lang);
  const auto enc = encode_impl(*this, g, std::span(&p, 1), std::span(&flag, 1));
  const std::size_t h = cfg_.cell_size;
  nn::LstmState state{g.constant(Tensor::zeros(1, h)), g.constant(Tensor::zeros(1, h))};
  Var lp = step_impl(*this, g, {corpus::Vocabulary::kStart}, enc, state, nullptr);
  for (int id : prefix) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_.size()) throw ContractError("prefix id outside the vocabulary");
    lp = step_impl(*this, g, {id}, enc, state, nullptr);
  }
  std::vector<double> probs;
  probs.reserve(vocab_.size());
  for (double x : g.value(lp).data()) probs.push_back(std::exp(x));
  return probs;
}

std::vector<double> SpeakerModel::token_log_probs(const std::vector<std::string>& tokens,
                                                  const context::ReferenceContext& ctx, corpus::Language lang) const {
  SequenceBatch batch{{&ctx}, {vocab_.encode(tokens)}, {corpus::language_flag(lang)}};
  Graph g;
  const auto steps = build_decoder(g, batch, nullptr);
  std::vector<double> out;
  out.reserve(steps.size());
  for (std::size_t t = 0; t < steps.size(); ++t) {
    out.push_back(g.value(steps[t])(0, static_cast<std::size_t>(step_target(batch.ids[0], t))));
  }
  return out;
}

std::vector<double> SpeakerModel::sequence_log_probs(const SequenceBatch& batch) const {
  Graph g;
  const auto steps = build_decoder(g, batch, nullptr);
  std::vector<double> out(batch.ids.size(), 0.0);
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const auto& lp = g.value(steps[t]);
    for (std::size_t i = 0; i < batch.ids.size(); ++i) {
      const int target = step_target(batch.ids[i], t);
      if (target >= 0) out[i] += lp(i, static_cast<std::size_t>(target));
    }
  }
  return out;
}

double SpeakerModel::utterance_log_prob(const std::vector<std::string>& tokens, const context::ReferenceContext& ctx,
                                        corpus::Language lang) const {
  SequenceBatch batch{{&ctx}, {vocab_.encode(tokens)}, {corpus::language_flag(lang)}};
  return sequence_log_probs(batch).front();
}

std::vector<double> SpeakerModel::utterance_log_probs(std::span<const ScoringQuery> queries) const {
  std::vector<double> out;
  out.reserve(queries.size());
  for (std::size_t start = 0; start < queries.size(); start += kScoringChunk) {
    const auto chunk = queries.subspan(start, std::min(kScoringChunk, queries.size() - start));
    SequenceBatch batch;
    for (const auto& q : chunk) {
      batch.contexts.push_back(q.context);
      batch.ids.push_back(vocab_.encode(*q.tokens));
      batch.flags.push_back(corpus::language_flag(q.language));
    }
    const auto lp = sequence_log_probs(batch);
    out.insert(out.end(), lp.begin(), lp.end());
  }
  return out;
}

std::vector<int> SpeakerModel::decode_ids(const context::ReferenceContext& ctx, corpus::Language lang,
                                          const DecodeOptions& opts) const {
  const bool greedy = opts.mode == DecodeOptions::Mode::kGreedy || !(opts.temperature > 0.0);
  Rng rng(opts.seed);
  Graph g;
  const context::ReferenceContext* p = &ctx;
  const double flag = corpus::language_flag(lang);
  const auto enc = encode_impl(*this, g, std::span(&p, 1), std::span(&flag, 1));
  const std::size_t h = cfg_.cell_size;
  nn::LstmState state{g.constant(Tensor::zeros(1, h)), g.constant(Tensor::zeros(1, h))};
  std::vector<int> out;
  int input = corpus::Vocabulary::kStart;
  while (out.size() < opts.max_len) {
    const auto lp = g.value(step_impl(*this, g, {input}, enc, state, nullptr)).vec();
    int next = 0;
    if (greedy) {
      next = static_cast<int>(std::max_element(lp.begin(), lp.end()) - lp.begin());
    } else {
      const double top = *std::max_element(lp.begin(), lp.end());
      std::vector<double> w(lp.size());
      double z = 0.0;
      for (std::size_t k = 0; k < lp.size(); ++k) z += w[k] = std::exp((lp[k] - top) / opts.temperature);
      double u = rng.uniform() * z;
      next = static_cast<int>(lp.size()) - 1;
      for (std::size_t k = 0; k < w.size(); ++k) {
        if (u < w[k]) {
          next = static_cast<int>(k);
          break;
        }
        u -= w[k];
      }
    }
    if (next == corpus::Vocabulary::kEnd) break;
    out.push_back(next);
    input = next;
  }
  return out;
}

corpus::Utterance SpeakerModel::describe(const context::ReferenceContext& ctx, corpus::Language lang,
                                         const DecodeOptions& opts) const {
  corpus::Utterance u;
  u.tokens = vocab_.decode(decode_ids(ctx, lang, opts));
  u.language = lang;
  u.raw_text = corpus::join_tokens(u.tokens);
  return u;
}

}  // namespace colorref::speaker
