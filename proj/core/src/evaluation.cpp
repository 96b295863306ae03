#include "colorref/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "colorref/corpus/vocabulary.hpp"
#include "colorref/error.hpp"
#include "colorref/speaker/train.hpp"

namespace colorref::eval {

ListenerInference infer_from_scores(const std::array<double, 3>& scores) {
  ListenerInference out;
  out.scores = scores;
  int best = 0;
  for (int t = 1; t < 3; ++t) {
    if (scores[static_cast<std::size_t>(t)] > scores[static_cast<std::size_t>(best)] + kTieTolerance) best = t;
  }
  out.t_star = best;
  for (int t = 0; t < 3; ++t) {
    if (t != best &&
        std::fabs(scores[static_cast<std::size_t>(t)] - scores[static_cast<std::size_t>(best)]) < kTieTolerance) {
      out.tie = true;
    }
  }
  return out;
}

ListenerInference pragmatic_listener(const speaker::Speaker& s, const std::vector<std::string>& tokens,
                                     const std::array<color::ColorHSV, 3>& colors, corpus::Language lang) {
  corpus::Example ex;
  ex.context.colors = colors;
  ex.tokens = tokens;
  ex.language = lang;
  return pragmatic_listener_batch(s, std::span(&ex, 1)).front();
}

std::vector<ListenerInference> pragmatic_listener_batch(const speaker::Speaker& s,
                                                        std::span<const corpus::Example> examples) {
  std::vector<context::ReferenceContext> candidates;
  candidates.reserve(3 * examples.size());
  for (const auto& ex : examples) {
    for (int t = 0; t < 3; ++t) {
      auto ctx = ex.context;
      ctx.target_index = t;
      candidates.push_back(ctx);
    }
  }
  std::vector<speaker::ScoringQuery> queries;
  queries.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& ex = examples[i / 3];
    queries.push_back({&candidates[i], &ex.tokens, ex.language});
  }
  const auto scores = s.utterance_log_probs(queries);
  if (scores.size() != queries.size()) throw ContractError("speaker returned the wrong number of scores");
  std::vector<ListenerInference> out;
  out.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    out.push_back(infer_from_scores({scores[3 * i], scores[3 * i + 1], scores[3 * i + 2]}));
  }
  return out;
}

VocabPolicy VocabPolicy::min_count(int n) {
  if (n < 1) throw ContractError("min-count policy needs n >= 1");
  return VocabPolicy(Kind::kMinCount, n);
}

VocabPolicy VocabPolicy::parse(const std::string& text) {
  if (text == "fixed-union") return fixed_union();
  const std::string prefix = "min-count:";
  if (text.starts_with(prefix)) {
    try {
      std::size_t used = 0;
      const int n = std::stoi(text.substr(prefix.size()), &used);
      if (used == text.size() - prefix.size() && n >= 1) return min_count(n);
    } catch (const std::exception&) {
    }
  }
  throw DataError("unknown vocabulary policy '" + text + "' (expected fixed-union or min-count:N)");
}

std::string VocabPolicy::name() const {
  return kind_ == Kind::kFixedUnion ? "fixed-union" : "min-count:" + std::to_string(n_);
}

std::set<std::string> VocabPolicy::vocabulary(const std::vector<corpus::Example>& train,
                                              const std::vector<corpus::Example>& union_corpora) const {
  std::set<std::string> out;
  if (kind_ == Kind::kFixedUnion) {
    for (const auto& ex : union_corpora) out.insert(ex.tokens.begin(), ex.tokens.end());
    return out;
  }
  std::vector<std::vector<std::string>> seqs;
  seqs.reserve(train.size());
  for (const auto& ex : train) seqs.push_back(ex.tokens);
  const auto v = corpus::build_vocabulary(seqs, n_);
  for (std::size_t i = corpus::Vocabulary::kNumSpecial; i < v.size(); ++i) out.insert(v.tokens()[i]);
  return out;
}

PerplexityReport perplexity(const speaker::Speaker& s, const std::vector<corpus::Example>& dataset,
                            const std::set<std::string>& policy_vocab, const std::string& policy_name) {
  if (dataset.empty()) throw ContractError("perplexity of an empty dataset");
  std::vector<std::vector<std::string>> mapped;
  mapped.reserve(dataset.size());
  std::size_t words = 0;
  std::size_t oov = 0;
  for (const auto& ex : dataset) {
    auto& m = mapped.emplace_back();
    for (const auto& t : ex.tokens) {
      ++words;
      if (policy_vocab.contains(t)) {
        m.push_back(t);
      } else {
        ++oov;
        m.emplace_back(corpus::Vocabulary::kUnkToken);
      }
    }
  }
  std::vector<speaker::ScoringQuery> queries;
  queries.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) queries.push_back({&dataset[i].context, &mapped[i], dataset[i].language});
  const auto lp = s.utterance_log_probs(queries);
  double nll = 0.0;
  for (double x : lp) nll -= x;
  PerplexityReport r;
  r.policy = policy_name;
  r.tokens = words + dataset.size();
  r.perplexity = std::exp(nll / static_cast<double>(r.tokens));
  r.oov_rate = words ? static_cast<double>(oov) / static_cast<double>(words) : 0.0;
  return r;
}

EvalReport pragmatic_informativeness(const speaker::Speaker& s, const std::vector<corpus::Example>& dataset,
                                     const std::string& dataset_id) {
  if (dataset.empty()) throw ContractError("pragmatic informativeness of an empty dataset");
  const auto decisions = pragmatic_listener_batch(s, dataset);
  EvalReport r;
  r.dataset_id = dataset_id;
  r.n = dataset.size();
  for (auto c : context::kAllConditions) r.per_condition[c] = {};
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const bool ok = decisions[i].t_star == dataset[i].context.target_index;
    r.outcomes.push_back(ok);
    auto& pc = r.per_condition[dataset[i].context.condition];
    ++pc.n;
    if (ok) {
      ++r.correct;
      ++pc.correct;
    }
  }
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.n);
  return r;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [cond, acc] : r.per_condition) {
    if (acc.n == 0) continue;
    per[context::to_string(cond)] = {{"n", acc.n}, {"correct", acc.correct}, {"accuracy", acc.accuracy()}};
  }
  nlohmann::json j = {{"dataset", r.dataset_id},
                      {"n", r.n},
                      {"correct", r.correct},
                      {"accuracy", r.accuracy},
                      {"per_condition", per},
                      {"significance", r.significance}};
  if (r.perplexity) {
    j["perplexity"] = {{"policy", r.perplexity->policy},
                       {"value", r.perplexity->perplexity},
                       {"oov_rate", r.perplexity->oov_rate},
                       {"tokens", r.perplexity->tokens}};
  }
  return j;
}

namespace {

void check_paired(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) {
    throw ContractError("permutation test needs equal-length paired outcomes (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
  }
}

long long observed_difference(const std::vector<bool>& a, const std::vector<bool>& b) {
  long long d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += static_cast<int>(a[i]) - static_cast<int>(b[i]);
  return d;
}

}  // namespace

double permutation_test(const std::vector<bool>& a, const std::vector<bool>& b, std::size_t n_samples, Rng& rng) {
  check_paired(a, b);
  if (n_samples == 0) throw ContractError("permutation test needs at least one sample");
  const long long observed = std::llabs(observed_difference(a, b));
  std::size_t hits = 0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    long long d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const int diff = static_cast<int>(a[i]) - static_cast<int>(b[i]);
      d += rng.bernoulli(0.5) ? -diff : diff;
    }
    if (std::llabs(d) >= observed) ++hits;
  }
  return static_cast<double>(hits + 1) / static_cast<double>(n_samples + 1);
}

double exact_permutation_p(const std::vector<bool>& a, const std::vector<bool>& b) {
  check_paired(a, b);
  int k = 0;
  for (std::size_t i = 0; i < a.size(); ++i) k += a[i] != b[i];
  const long long observed = std::llabs(observed_difference(a, b));
  // With j of the k discordant pairs swapped, |d| = |k - 2j| relative to the
  // all-unswapped orientation; the observed orientation is one of them.
  double total = 0.0;
  double coeff = 1.0;  // C(k, j)
  for (int j = 0; j <= k; ++j) {
    if (std::llabs(k - 2LL * j) >= observed) total += coeff;
    coeff = coeff * (k - j) / (j + 1);
  }
  return total / std::ldexp(1.0, k);
}

std::vector<CurvePoint> learning_curve(const std::vector<corpus::Example>& en_train,
                                       const std::vector<corpus::Example>& zh_train,
                                       const std::vector<std::pair<double, double>>& points,
                                       const speaker::TrainingConfig& cfg, const std::vector<corpus::Example>& dev,
                                       std::uint64_t seed) {
  if (dev.empty()) throw ContractError("learning curve needs a non-empty dev set");
  auto en = en_train;
  auto zh = zh_train;
  Rng en_rng = Rng::derive({seed, 0});
  Rng zh_rng = Rng::derive({seed, 1});
  shuffle(en, en_rng);
  shuffle(zh, zh_rng);

  std::vector<CurvePoint> out;
  for (const auto& [fe, fz] : points) {
    CurvePoint p;
    p.en_fraction = fe;
    p.zh_fraction = fz;
    try {
      if (fe < 0.0 || fe > 1.0 || fz < 0.0 || fz > 1.0) throw ContractError("fractions must be in [0, 1]");
      p.en_size = static_cast<std::size_t>(std::llround(fe * static_cast<double>(en.size())));
      p.zh_size = static_cast<std::size_t>(std::llround(fz * static_cast<double>(zh.size())));
      std::vector<corpus::Example> train(zh.begin(), zh.begin() + static_cast<std::ptrdiff_t>(p.zh_size));
      train.insert(train.end(), en.begin(), en.begin() + static_cast<std::ptrdiff_t>(p.en_size));
      if (train.empty()) throw ContractError("training subset is empty");
      std::vector<std::vector<std::string>> seqs;
      for (const auto& ex : train) seqs.push_back(ex.tokens);
      const auto vocab = corpus::build_vocabulary(seqs, cfg.min_count);
      const auto trained = speaker::train_speaker(train, vocab, cfg, &dev);
      p.dev_accuracy = pragmatic_informativeness(trained.model, dev).accuracy;
    } catch (const Error& e) {
      p.error = e.what();
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string learning_curve_csv(const std::vector<CurvePoint>& points) {
  std::ostringstream out;
  out << "en_size,zh_size,dev_accuracy\n";
  for (const auto& p : points) {
    out << p.en_size << ',' << p.zh_size << ',';
    if (p.dev_accuracy) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", *p.dev_accuracy);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace colorref::eval
