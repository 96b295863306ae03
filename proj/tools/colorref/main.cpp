#include <iostream>

#include <CLI11.hpp>

#include "colorref/error.hpp"
#include "colorref/game/session.hpp"
#include "commands.hpp"

namespace {

using colorref::cli::Common;

enum Flags : unsigned {
  kSeed = 1u << 0,
  kConfig = 1u << 1,
  kCorpus = 1u << 2,
  kCkpt = 1u << 3,
  kOut = 1u << 4,
  kLang = 1u << 5,
  kPolicy = 1u << 6,
  kTheta = 1u << 7,
};

CLI::Option* add_common(CLI::App* app, Common& c, unsigned flags) {
  CLI::Option* seed = nullptr;
  if (flags & kSeed) seed = app->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  if (flags & kConfig) app->add_option("--config", c.config, "JSON config file");
  if (flags & kCorpus) app->add_option("--corpus", c.corpora, "Corpus in native JSONL (repeatable)");
  if (flags & kCkpt) app->add_option("--ckpt", c.ckpt, "Speaker checkpoint");
  if (flags & kOut) app->add_option("--out", c.out, "Output path");
  if (flags & kLang) app->add_option("--lang", c.lang, "Language")->check(CLI::IsMember({"en", "zh"}))->capture_default_str();
  if (flags & kPolicy) app->add_option("--policy", c.policy, "Vocabulary policy: fixed-union or min-count:N");
  if (flags & kTheta) app->add_option("--theta", c.theta, "Condition threshold")->capture_default_str();
  return seed;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace colorref::cli;
  CLI::App app{"Color reference games: corpora, speaker models, evaluation and analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", COLORREF_VERSION);

  GenContextsArgs gen;
  auto* s = app.add_subcommand("gen-contexts", "Sample reference contexts as JSON Lines");
  add_common(s, gen.c, kSeed | kOut | kTheta);
  s->add_option("-n,--count", gen.n, "Number of contexts")->capture_default_str();
  s->add_option("--min-distance", gen.min_distance, "Minimum pairwise distance")->capture_default_str();
  s->add_option("--condition", gen.condition, "far, split or close (default: stratified)");
  s->callback([&] { run_gen_contexts(gen); });

  ImportArgs imp;
  s = app.add_subcommand("import", "Import a CSV corpus through a column mapping");
  add_common(s, imp.c, kOut | kLang | kTheta);
  s->add_option("--csv", imp.csv, "CSV file")->required();
  s->add_option("--mapping", imp.mapping, "JSON {column: field} mapping")->required();
  s->callback([&] { run_import(imp); });

  Common filter;
  s = app.add_subcommand("filter", "Apply the length and spam filters");
  add_common(s, filter, kConfig | kCorpus | kOut);
  s->callback([&] { run_filter(filter); });

  SplitArgs split;
  s = app.add_subcommand("split", "Split games into train/dev/test");
  add_common(s, split.c, kSeed | kCorpus | kOut);
  s->add_option("--ratios", split.ratios, "train dev test fractions")->expected(3)->capture_default_str();
  s->callback([&] { run_split(split); });

  TrainArgs train;
  s = app.add_subcommand("train", "Train a speaker model");
  auto* train_seed = add_common(s, train.c, kSeed | kConfig | kCorpus | kOut);
  s->add_option("--heldout", train.heldout, "Held-out corpus for model selection (repeatable)");
  s->add_option("--epochs", train.epochs, "Override the configured epoch count");
  s->add_option("--batch-size", train.batch_size, "Override the configured batch size");
  s->callback([&] {
    train.seed_given = train_seed->count() > 0;
    run_train(train);
  });

  EvalArgs ev;
  s = app.add_subcommand("eval", "Pragmatic informativeness of a checkpoint");
  add_common(s, ev.c, kCorpus | kCkpt | kOut | kPolicy);
  s->callback([&] { run_eval(ev); });

  PerplexityArgs ppl;
  s = app.add_subcommand("perplexity", "Perplexity under an explicit vocabulary policy");
  add_common(s, ppl.c, kCorpus | kCkpt | kOut | kPolicy);
  s->add_option("--train", ppl.train_corpora, "Training corpora for min-count policies (repeatable)")
      ;
  s->add_option("--union", ppl.union_corpora, "Corpora whose token union forms the fixed-union vocabulary")
      ;
  s->callback([&] { run_perplexity(ppl); });

  PermtestArgs perm;
  s = app.add_subcommand("permtest", "Paired permutation test between two eval reports");
  add_common(s, perm.c, kSeed | kOut);
  s->add_option("--report", perm.reports, "Eval report JSON (give twice)");
  s->add_option("--samples", perm.samples, "Random permutations")->capture_default_str();
  s->callback([&] { run_permtest(perm); });

  CurveArgs curve;
  s = app.add_subcommand("learning-curve", "Dev accuracy as English data is added to Chinese training data");
  add_common(s, curve.c, kSeed | kConfig | kOut);
  s->add_option("--en", curve.en, "English training corpus (repeatable)");
  s->add_option("--zh", curve.zh, "Chinese training corpus (repeatable)");
  s->add_option("--dev", curve.dev, "Dev corpus (repeatable)");
  s->add_option("--point", curve.points, "EN_FRACTION:ZH_FRACTION (repeatable)");
  s->add_option("--epochs", curve.epochs, "Override the configured epoch count");
  s->callback([&] { run_learning_curve(curve); });

  LexiconArgs lex;
  s = app.add_subcommand("lexicon", "Induce translations from output-layer word vectors");
  add_common(s, lex.c, kCkpt | kOut);
  s->add_option("--tokens", lex.tokens, "Source tokens, one per line");
  s->add_option("--direction", lex.direction, "zh-en or en-zh")->capture_default_str();
  s->add_option("--pivot", lex.pivots, "Known pair SOURCE=TARGET (repeatable)");
  s->callback([&] { run_lexicon(lex); });

  WcsArgs wcs;
  s = app.add_subcommand("wcs", "Elicit color terms over the WCS chip grid");
  add_common(s, wcs.c, kSeed | kCkpt | kOut | kLang);
  s->add_option("--contexts", wcs.contexts, "Random contexts per chip")->capture_default_str();
  s->callback([&] { run_wcs(wcs); });

  AnalyzeArgs an;
  s = app.add_subcommand("analyze", "Per-condition corpus statistics and charts");
  add_common(s, an.c, kSeed | kCorpus | kOut);
  s->callback([&] { run_analyze(an); });

  CompareArgs cmp;
  s = app.add_subcommand("compare", "Compare a statistic between human and model utterances");
  add_common(s, cmp.c, kSeed | kCorpus | kCkpt | kOut);
  s->add_option("--statistic", cmp.statistic, "length, specificity, comparative, superlative, negation, nominal")
      ->capture_default_str();
  s->callback([&] { run_compare(cmp); });

  ServeArgs serve;
  s = app.add_subcommand("serve", "Run the game HTTP service");
  add_common(s, serve.c, kCkpt);
  s->add_option("--host", serve.host)->capture_default_str();
  s->add_option("--port", serve.port)->capture_default_str();
  s->add_option("--static", serve.static_dir, "Directory served under /")->capture_default_str();
  s->add_option("--transcripts", serve.transcripts, "Append resolved rounds to this JSONL file");
  s->add_option("--rounds", serve.rounds, "Rounds per session")->capture_default_str();
  s->callback([&] { run_serve(serve); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const colorref::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const colorref::ContractError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const colorref::game::GameError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const colorref::Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
