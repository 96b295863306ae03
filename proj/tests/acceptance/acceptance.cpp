// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Corpus-scale
// criteria need COLORREF_CORPUS_DIR with en.train.jsonl, zh.train.jsonl and
// zh.dev.jsonl in the native corpus format.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>

#include "colorref/colorspace.hpp"
#include "colorref/contextgen.hpp"
#include "colorref/corpus/io.hpp"
#include "colorref/error.hpp"
#include "colorref/evaluation.hpp"
#include "colorref/lexicon.hpp"
#include "colorref/speaker/train.hpp"
#include "colorref/wcs.hpp"
#include "support/ciede2000_pairs.hpp"
#include "support/listener_cases.hpp"
#include "support/random_net.hpp"
#include "support/synthetic_lexicon.hpp"
#include "support/tabular_speaker.hpp"
#include "support/toy_corpus.hpp"

using namespace colorref;

namespace {

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

Outcome pass_if(bool ok, std::string detail) { return {ok ? Verdict::kPass : Verdict::kFail, std::move(detail)}; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void run(const std::string& name, const std::function<Outcome()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {Verdict::kFail, std::string("threw: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const char* tag = o.verdict == Verdict::kPass ? "PASS" : o.verdict == Verdict::kFail ? "FAIL" : "SKIP";
  if (o.verdict == Verdict::kFail) ++failures;
  std::printf("%s  %-28s %s [%.1fs]\n", tag, name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

Outcome ciede2000_pairs() {
  int ok = 0;
  double worst = 0.0;
  for (const auto& p : testing::kCiede2000Pairs) {
    const double err = std::fabs(color::ciede2000(p.a, p.b) - p.expected);
    worst = std::max(worst, err);
    ok += err < 1e-4;
  }
  return pass_if(ok == 34, fmt("%d/34 pairs within 1e-4, max error %.2e", ok, worst));
}

Outcome autodiff() {
  double worst = 0.0;
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto net = testing::make_random_net(seed);
    const double e = testing::max_gradient_error(net);
    worst = std::max(worst, e);
    ok += e < 1e-4;
  }
  return pass_if(ok == 50, fmt("%d/50 networks within relative error 1e-4, worst %.2e", ok, worst));
}

Outcome listener_oracle() {
  const testing::TabularSpeaker tab;
  std::size_t cases = 0, agree = 0;
  for (const auto& ctx : testing::enumerated_contexts()) {
    for (const auto& u : testing::enumerated_utterances()) {
      ++cases;
      agree += eval::pragmatic_listener(tab, u, ctx.colors, corpus::Language::kEnglish).t_star ==
               testing::brute_force_listener(tab, u, ctx);
    }
  }

  const testing::TabularSpeaker oracle(10.0);
  std::vector<corpus::Example> described;
  for (const auto& ctx : testing::enumerated_contexts()) {
    const int tb = testing::hue_bucket(ctx.colors[static_cast<std::size_t>(ctx.target_index)]);
    bool unique = true;
    for (int d = 0; d < 3; ++d) {
      if (d != ctx.target_index && testing::hue_bucket(ctx.colors[static_cast<std::size_t>(d)]) == tb) unique = false;
    }
    if (unique) described.push_back({ctx, oracle.describe(ctx, corpus::Language::kEnglish).tokens, corpus::Language::kEnglish});
  }
  const double info = eval::pragmatic_informativeness(oracle, described).accuracy;

  const testing::UniformSpeaker uniform;
  std::size_t zeros = 0, rounds = 0;
  for (const auto& ctx : testing::enumerated_contexts()) {
    for (const auto& u : testing::enumerated_utterances()) {
      ++rounds;
      zeros += eval::pragmatic_listener(uniform, u, ctx.colors, corpus::Language::kEnglish).t_star == 0;
    }
  }
  return pass_if(agree == cases && info == 1.0 && zeros == rounds,
                 fmt("brute force %zu/%zu, oracle informativeness %.3f on %zu, uniform index 0 on %zu/%zu", agree,
                     cases, info, described.size(), zeros, rounds));
}

std::optional<speaker::SpeakerModel> overfit_model;

Outcome overfit() {
  const auto records = testing::toy_records(32, 2024);
  const auto examples = corpus::make_examples(records);
  auto cfg = speaker::monolingual_preset();
  cfg.epochs = 500;
  const auto vocab = corpus::build_vocabulary(records, cfg.min_count);
  auto result = speaker::train_speaker(examples, vocab, cfg);
  const double ppl = speaker::corpus_perplexity(result.model, examples);
  const double acc = eval::pragmatic_informativeness(result.model, examples).accuracy;
  overfit_model.emplace(std::move(result.model));
  return pass_if(ppl < 1.3 && acc == 1.0,
                 fmt("per-token perplexity %.4f (< 1.3), informativeness %.3f on 32, best epoch %d", ppl, acc,
                     result.best_epoch));
}

Outcome condition_sampler() {
  const auto conds = context::stratified_conditions(10000);
  Rng rng(10000);
  std::size_t violations = 0, mismatches = 0;
  std::map<context::Condition, std::size_t> counts;
  for (auto c : conds) {
    const auto ctx = context::sample_context(c, rng);
    ++counts[c];
    std::array<color::ColorLab, 3> lab;
    for (std::size_t i = 0; i < 3; ++i) lab[i] = color::hsv_to_lab(ctx.colors[i]);
    const auto t = static_cast<std::size_t>(ctx.target_index);
    const double td1 = color::ciede2000(lab[t], lab[(t + 1) % 3]);
    const double td2 = color::ciede2000(lab[t], lab[(t + 2) % 3]);
    const double dd = color::ciede2000(lab[(t + 1) % 3], lab[(t + 2) % 3]);
    const double th = context::kDefaultTheta;
    bool ok = std::min({td1, td2, dd}) >= context::kDefaultMinDistance;
    for (const auto& col : ctx.colors) ok = ok && color::in_stimulus_gamut(col);
    // Condition definitions restated over the three distances.
    switch (c) {
      case context::Condition::kFar: ok = ok && td1 >= th && td2 >= th && dd >= th; break;
      case context::Condition::kClose: ok = ok && td1 < th && td2 < th && dd < th; break;
      case context::Condition::kSplit:
        ok = ok && dd >= th && ((td1 < th) != (td2 < th));
        break;
    }
    violations += !ok;
    mismatches += context::classify_condition(ctx.colors, ctx.target_index, th) != c || ctx.condition != c;
  }
  const bool balanced = counts.size() == 3 && counts[context::Condition::kFar] >= 3333 &&
                        counts[context::Condition::kSplit] >= 3333 && counts[context::Condition::kClose] >= 3333;
  return pass_if(violations == 0 && mismatches == 0 && balanced,
                 fmt("10000 contexts, %zu constraint violations, %zu classify mismatches", violations, mismatches));
}

Outcome permutation() {
  const std::vector<bool> a = {1, 1, 1, 0, 1, 1, 0, 1, 1, 1, 0, 1};
  const std::vector<bool> b = {0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0};
  const double exact = eval::exact_permutation_p(a, b);
  Rng rng(12);
  const double sampled = eval::permutation_test(a, b, 200000, rng);
  Rng rng2(13);
  const double same = eval::permutation_test(a, a, 10000, rng2);
  return pass_if(std::fabs(exact - sampled) <= 0.005 && same == 1.0,
                 fmt("exact %.5f vs sampled %.5f (|diff| %.5f), identical vectors p=%.3f", exact, sampled,
                     std::fabs(exact - sampled), same));
}

Outcome synthetic_lexicon() {
  auto score = [](const testing::SyntheticLexicon& s) {
    const std::vector<lexicon::PivotPair> pivots = {{s.zh[0], s.en[0]}, {s.zh[1], s.en[1]}};
    std::vector<std::string> src(s.zh.begin() + 2, s.zh.end());
    const auto l = lexicon::induce_lexicon(src, lexicon::Direction::kZhToEn, s.vectors, s.vocab, pivots);
    int n = 0;
    for (std::size_t i = 0; i < l.size(); ++i) n += l[i].target == s.en[i + 2];
    return n;
  };
  const int exact = score(testing::make_synthetic_lexicon(0.0, 1));
  int worst = 10;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) worst = std::min(worst, score(testing::make_synthetic_lexicon(0.1, seed)));
  return pass_if(exact == 10 && worst >= 8,
                 fmt("exact offset %d/10, 10%% noise worst over 20 draws %d/10", exact, worst));
}

Outcome wcs_determinism() {
  if (!overfit_model) return {Verdict::kFail, "no trained checkpoint from the overfit check"};
  const auto& m = *overfit_model;
  const auto a = lexicon::to_json(lexicon::elicit_wcs_terms(m, corpus::Language::kEnglish, 10, 7)).dump();
  const auto map = lexicon::elicit_wcs_terms(m, corpus::Language::kEnglish, 10, 7);
  const auto b = lexicon::to_json(map).dump();
  // Exhaustive star scan: rescore every elected term on every chip.
  const auto& chips = color::wcs_palette();
  std::vector<std::vector<context::ReferenceContext>> ctxs;
  for (const auto& chip : chips) ctxs.push_back(lexicon::wcs_chip_contexts(chip, 10, 7));
  int star_ok = 0;
  for (const auto& [term, star] : map.star_chip) {
    const auto tokens = corpus::tokenize(term, corpus::Language::kEnglish);
    int arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < chips.size(); ++i) {
      double p = 0.0;
      for (const auto& c : ctxs[i]) p += std::exp(m.utterance_log_prob(tokens, c, corpus::Language::kEnglish));
      p /= static_cast<double>(ctxs[i].size());
      if (p > best * (1.0 + 1e-12)) {
        best = p;
        arg = chips[i].chip_index;
      }
    }
    star_ok += arg == star;
  }
  const auto terms = map.star_chip.size();
  return pass_if(a == b && star_ok == static_cast<int>(terms),
                 fmt("json identical: %s (%zu bytes), star chips maximal %d/%zu", a == b ? "yes" : "no", a.size(),
                     star_ok, terms));
}

struct Corpora {
  std::vector<corpus::Example> en_train, zh_train, zh_dev;
};

std::optional<Corpora> load_corpora() {
  const char* dir = std::getenv("COLORREF_CORPUS_DIR");
  if (!dir || !*dir) return std::nullopt;
  const std::filesystem::path d(dir);
  Corpora c;
  c.en_train = corpus::make_examples(corpus::load_corpora_strict({(d / "en.train.jsonl").string()}));
  c.zh_train = corpus::make_examples(corpus::load_corpora_strict({(d / "zh.train.jsonl").string()}));
  c.zh_dev = corpus::make_examples(corpus::load_corpora_strict({(d / "zh.dev.jsonl").string()}));
  return c;
}

speaker::SpeakerModel train_on(const std::vector<corpus::Example>& train, const speaker::TrainingConfig& cfg,
                               const std::vector<corpus::Example>& dev) {
  std::vector<std::vector<std::string>> seqs;
  for (const auto& ex : train) seqs.push_back(ex.tokens);
  const auto vocab = corpus::build_vocabulary(seqs, cfg.min_count);
  return speaker::train_speaker(train, vocab, cfg, &dev, [](const speaker::EpochStats& s) {
           std::fprintf(stderr, "  epoch %d loss %.4f dev ppl %.3f\n", s.epoch, s.train_loss,
                        s.heldout_perplexity.value_or(NAN));
         }).model;
}

std::optional<Corpora> corpora;
bool full_scale_ran = false;

Outcome full_scale() {
  if (!corpora) return {Verdict::kSkip, "COLORREF_CORPUS_DIR not set"};
  full_scale_ran = true;
  const auto mono = train_on(corpora->zh_train, speaker::monolingual_preset(), corpora->zh_dev);
  const auto mono_r = eval::pragmatic_informativeness(mono, corpora->zh_dev);
  auto joint = corpora->zh_train;
  joint.insert(joint.end(), corpora->en_train.begin(), corpora->en_train.end());
  const auto bi = train_on(joint, speaker::bilingual_preset(), corpora->zh_dev);
  const auto bi_r = eval::pragmatic_informativeness(bi, corpora->zh_dev);
  Rng rng(2018);
  const double p = eval::permutation_test(bi_r.outcomes, mono_r.outcomes, 10000, rng);
  const double mono_pct = 100.0 * mono_r.accuracy, bi_pct = 100.0 * bi_r.accuracy;
  return pass_if(std::fabs(mono_pct - 67.16) <= 4.0 && bi_pct - mono_pct >= 2.0 && p < 0.05,
                 fmt("zh mono %.2f%% (67.16 +/- 4), bilingual %.2f%% (gain %.2f >= 2), p=%.4f", mono_pct, bi_pct,
                     bi_pct - mono_pct, p));
}

Outcome learning_curve_shape() {
  if (!corpora) return {Verdict::kSkip, "COLORREF_CORPUS_DIR not set"};
  if (!full_scale_ran) return {Verdict::kSkip, "full-scale training did not run"};
  const double small = std::min(1.0, static_cast<double>(corpora->zh_train.size()) /
                                         static_cast<double>(std::max<std::size_t>(1, corpora->en_train.size())));
  const auto pts = eval::learning_curve(corpora->en_train, corpora->zh_train, {{0.0, 1.0}, {small, 1.0}, {1.0, 1.0}},
                                        speaker::bilingual_preset(), corpora->zh_dev, 5);
  for (const auto& p : pts) {
    if (!p.dev_accuracy) return {Verdict::kFail, "curve point failed: " + p.error};
  }
  const double zh_only = *pts[0].dev_accuracy, low = *pts[1].dev_accuracy, all = *pts[2].dev_accuracy;
  return pass_if(all > zh_only && low < zh_only,
                 fmt("zh-only %.4f, +%zu en %.4f (below), +all en %.4f (above)", zh_only, pts[1].en_size, low, all));
}

}  // namespace

int main() {
  try {
    corpora = load_corpora();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cannot load corpora: %s\n", e.what());
    return 2;
  }
  run("ciede2000", ciede2000_pairs);
  run("autodiff", autodiff);
  run("listener-oracle", listener_oracle);
  run("overfit", overfit);
  run("condition-sampler", condition_sampler);
  run("permutation-test", permutation);
  run("synthetic-lexicon", synthetic_lexicon);
  run("full-scale", full_scale);
  run("wcs-determinism", wcs_determinism);
  run("learning-curve", learning_curve_shape);
  std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
