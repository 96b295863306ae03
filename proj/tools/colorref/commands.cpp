#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "colorref/analytics.hpp"
#include "colorref/contextgen.hpp"
#include "colorref/corpus/filter.hpp"
#include "colorref/corpus/io.hpp"
#include "colorref/corpus/vocabulary.hpp"
#include "colorref/error.hpp"
#include "colorref/evaluation.hpp"
#include "colorref/game/server.hpp"
#include "colorref/lexicon.hpp"
#include "colorref/resources.hpp"
#include "colorref/rng.hpp"
#include "colorref/speaker/checkpoint.hpp"
#include "colorref/speaker/train.hpp"
#include "colorref/svg.hpp"
#include "colorref/wcs.hpp"
#include "manifest.hpp"

namespace colorref::cli {

namespace {

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw DataError("write to '" + path + "' failed");
}

// Writes to `path`, or to stdout when no path was given.
void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
  } else {
    write_text(path, content);
  }
}

// "out/map.json" -> "out/map" + suffix.
std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? path.substr(0, dot) : path) + suffix;
}

nlohmann::json read_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractError(what);
}

void add_inputs(RunManifest& m, const std::vector<std::string>& paths) {
  for (const auto& p : paths) m.add_input(p);
}

std::vector<corpus::Example> load_examples(const std::vector<std::string>& paths) {
  return corpus::make_examples(corpus::load_corpora_strict(paths));
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::vector<std::string> category_names() {
  std::vector<std::string> names;
  for (auto c : context::kAllConditions) names.push_back(context::to_string(c));
  return names;
}

svg::BarSeries series_of(const analytics::ConditionStats& s, std::string name, std::string fill) {
  svg::BarSeries b{std::move(name), std::move(fill), {}, {}};
  for (auto c : context::kAllConditions) {
    auto it = s.by_condition.find(c);
    if (it == s.by_condition.end()) {
      b.values.emplace_back();
      b.intervals.emplace_back();
    } else {
      b.values.emplace_back(it->second.mean);
      b.intervals.emplace_back(std::make_pair(it->second.ci_low, it->second.ci_high));
    }
  }
  return b;
}

}  // namespace

void run_gen_contexts(const GenContextsArgs& a) {
  RunManifest m("gen-contexts");
  m.add_seed("seed", a.c.seed);
  m.set_config({{"n", a.n}, {"theta", a.c.theta}, {"min_distance", a.min_distance}, {"condition", a.condition}});
  std::vector<context::Condition> conds;
  if (a.condition.empty()) {
    conds = context::stratified_conditions(a.n);
  } else {
    conds.assign(a.n, context::parse_condition(a.condition));
  }
  Rng rng(a.c.seed);
  std::string out;
  for (auto cond : conds) {
    out += context::context_to_json(context::sample_context(cond, rng, a.c.theta, a.min_distance)).dump() + "\n";
  }
  emit(a.c.out, out);
  if (!a.c.out.empty()) {
    m.add_output(a.c.out);
    m.write(a.c.out);
  }
}

void run_import(const ImportArgs& a) {
  require(!a.c.out.empty(), "import needs --out");
  RunManifest m("import");
  m.add_input(a.csv);
  m.add_input(a.mapping);
  corpus::ImportOptions opts;
  opts.default_language = corpus::parse_language(a.c.lang);
  opts.theta = a.c.theta;
  m.set_config({{"default_language", a.c.lang}, {"theta", a.c.theta}});
  const auto result = corpus::import_csv_file(a.csv, a.mapping, opts);
  corpus::save_corpus(a.c.out, result.records);
  const std::string err_path = a.c.out + ".errors.json";
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& e : result.errors) errors.push_back({{"row", e.line}, {"message", e.message}});
  write_text(err_path, errors.dump(2) + "\n");
  if (!result.errors.empty()) {
    std::cerr << result.errors.size() << " malformed row(s); see " << err_path << "\n";
  }
  m.add_output(a.c.out);
  m.add_output(err_path);
  m.set_extra("records", result.records.size());
  m.set_extra("errors", result.errors.size());
  m.write(a.c.out);
}

void run_filter(const Common& a) {
  require(!a.corpora.empty(), "filter needs at least one --corpus");
  require(!a.out.empty(), "filter needs --out");
  RunManifest m("filter");
  add_inputs(m, a.corpora);
  corpus::FilterConfig cfg;
  if (!a.config.empty()) {
    m.add_input(a.config);
    const auto j = read_json_file(a.config);
    for (const auto& [key, value] : j.items()) {
      if (key == "length_sigma") {
        cfg.length_sigma = value.get<double>();
      } else if (key == "spam_duplicate_threshold") {
        cfg.spam_duplicate_threshold = value.get<int>();
      } else if (key != "description") {
        throw DataError("unknown filter config field '" + key + "'");
      }
    }
  }
  m.set_config({{"length_sigma", cfg.length_sigma}, {"spam_duplicate_threshold", cfg.spam_duplicate_threshold}});
  const auto result = corpus::filter_corpus(corpus::load_corpora_strict(a.corpora), cfg);
  corpus::save_corpus(a.out, result.records);
  const std::string report = a.out + ".report.json";
  write_text(report, corpus::to_json(result.report).dump(2) + "\n");
  m.add_output(a.out);
  m.add_output(report);
  m.write(a.out);
}

void run_split(const SplitArgs& a) {
  require(!a.c.corpora.empty(), "split needs at least one --corpus");
  require(!a.c.out.empty(), "split needs --out (a path prefix)");
  require(a.ratios.size() == 3, "--ratios takes three values");
  RunManifest m("split");
  add_inputs(m, a.c.corpora);
  m.add_seed("seed", a.c.seed);
  m.set_config({{"ratios", a.ratios}});
  const auto split =
      corpus::split_dataset(corpus::load_corpora_strict(a.c.corpora), {a.ratios[0], a.ratios[1], a.ratios[2]}, a.c.seed);
  const std::pair<const char*, const std::vector<corpus::GameRecord>*> parts[] = {
      {".train.jsonl", &split.train}, {".dev.jsonl", &split.dev}, {".test.jsonl", &split.test}};
  for (const auto& [suffix, records] : parts) {
    corpus::save_corpus(a.c.out + suffix, *records);
    m.add_output(a.c.out + suffix);
  }
  m.write(a.c.out);
}

void run_train(const TrainArgs& a) {
  require(!a.c.corpora.empty(), "train needs at least one --corpus");
  require(!a.c.out.empty(), "train needs --out");
  RunManifest m("train");
  add_inputs(m, a.c.corpora);
  add_inputs(m, a.heldout);
  speaker::TrainingConfig cfg = speaker::monolingual_preset();
  if (!a.c.config.empty()) {
    m.add_input(a.c.config);
    cfg = speaker::training_config_from_json(read_json_file(a.c.config), cfg);
  }
  if (a.seed_given) cfg.seed = a.c.seed;
  if (a.epochs) cfg.epochs = *a.epochs;
  if (a.batch_size) cfg.batch_size = *a.batch_size;
  cfg.validate();
  m.set_config(speaker::to_json(cfg));
  m.add_seed("seed", cfg.seed);

  const auto records = corpus::load_corpora_strict(a.c.corpora);
  const auto train = corpus::make_examples(records);
  const auto vocab = corpus::build_vocabulary(records, cfg.min_count);
  std::vector<corpus::Example> heldout;
  if (!a.heldout.empty()) heldout = load_examples(a.heldout);
  std::cerr << "training on " << train.size() << " examples, vocabulary " << vocab.size() << "\n";
  auto hook = [](const speaker::EpochStats& s) {
    std::cerr << "epoch " << s.epoch << " loss " << s.train_loss;
    if (s.heldout_perplexity) std::cerr << " heldout ppl " << *s.heldout_perplexity;
    std::cerr << "\n";
  };
  const auto result = speaker::train_speaker(train, vocab, cfg, heldout.empty() ? nullptr : &heldout, hook);
  speaker::save_checkpoint(result.model, a.c.out);

  nlohmann::json history = nlohmann::json::array();
  for (const auto& s : result.history) {
    history.push_back({{"epoch", s.epoch},
                       {"train_loss", s.train_loss},
                       {"heldout_perplexity", s.heldout_perplexity ? nlohmann::json(*s.heldout_perplexity) : nlohmann::json(nullptr)}});
  }
  m.set_extra("best_epoch", result.best_epoch);
  m.set_extra("history", history);
  m.set_extra("vocabulary_size", vocab.size());
  m.add_output(a.c.out);
  m.write(a.c.out);
}

namespace {

std::set<std::string> policy_vocabulary(const eval::VocabPolicy& policy, const speaker::SpeakerModel& model,
                                        const std::vector<corpus::Example>& eval_set,
                                        const std::vector<std::string>& train_paths,
                                        const std::vector<std::string>& union_paths) {
  const auto train = train_paths.empty() ? std::vector<corpus::Example>{} : load_examples(train_paths);
  if (policy.kind() == eval::VocabPolicy::Kind::kFixedUnion) {
    auto pool = union_paths.empty() ? eval_set : load_examples(union_paths);
    pool.insert(pool.end(), train.begin(), train.end());
    return policy.vocabulary(train, pool);
  }
  if (!train.empty()) return policy.vocabulary(train, {});
  const auto& v = model.vocabulary();
  if (policy.n() < v.min_count()) {
    throw ContractError("policy " + policy.name() + " is below the checkpoint's min_count " +
                        std::to_string(v.min_count()) + "; pass the training corpora with --train");
  }
  std::set<std::string> out;
  for (std::size_t i = corpus::Vocabulary::kNumSpecial; i < v.size(); ++i) {
    if (v.counts()[i] >= static_cast<std::uint64_t>(policy.n())) out.insert(v.tokens()[i]);
  }
  return out;
}

}  // namespace

void run_eval(const EvalArgs& a) {
  require(!a.c.ckpt.empty(), "eval needs --ckpt");
  require(!a.c.corpora.empty(), "eval needs at least one --corpus");
  RunManifest m("eval");
  m.add_input(a.c.ckpt);
  add_inputs(m, a.c.corpora);
  m.set_config({{"policy", a.c.policy}});
  const auto model = speaker::load_checkpoint(a.c.ckpt);
  const auto examples = load_examples(a.c.corpora);
  auto report = eval::pragmatic_informativeness(model, examples, join(a.c.corpora, ","));
  if (!a.c.policy.empty()) {
    const auto policy = eval::VocabPolicy::parse(a.c.policy);
    report.perplexity = eval::perplexity(model, examples, policy_vocabulary(policy, model, examples, {}, {}), policy.name());
  }
  auto j = eval::to_json(report);
  nlohmann::json outcomes = nlohmann::json::array();
  for (bool b : report.outcomes) outcomes.push_back(b ? 1 : 0);
  j["outcomes"] = outcomes;
  emit(a.c.out, j.dump(2) + "\n");
  if (!a.c.out.empty()) {
    m.add_output(a.c.out);
    m.write(a.c.out);
  }
}

void run_perplexity(const PerplexityArgs& a) {
  require(!a.c.ckpt.empty(), "perplexity needs --ckpt");
  require(!a.c.corpora.empty(), "perplexity needs at least one --corpus");
  RunManifest m("perplexity");
  m.add_input(a.c.ckpt);
  add_inputs(m, a.c.corpora);
  add_inputs(m, a.train_corpora);
  add_inputs(m, a.union_corpora);
  const auto policy = eval::VocabPolicy::parse(a.c.policy.empty() ? "fixed-union" : a.c.policy);
  m.set_config({{"policy", policy.name()}});
  const auto model = speaker::load_checkpoint(a.c.ckpt);
  const auto examples = load_examples(a.c.corpora);
  const auto r = eval::perplexity(model, examples,
                                  policy_vocabulary(policy, model, examples, a.train_corpora, a.union_corpora),
                                  policy.name());
  const nlohmann::json j = {
      {"policy", r.policy}, {"perplexity", r.perplexity}, {"oov_rate", r.oov_rate}, {"tokens", r.tokens}};
  emit(a.c.out, j.dump(2) + "\n");
  if (!a.c.out.empty()) {
    m.add_output(a.c.out);
    m.write(a.c.out);
  }
}

void run_permtest(const PermtestArgs& a) {
  require(a.reports.size() == 2, "permtest needs exactly two --report files");
  RunManifest m("permtest");
  add_inputs(m, a.reports);
  m.add_seed("seed", a.c.seed);
  m.set_config({{"samples", a.samples}});
  std::vector<bool> outcomes[2];
  double accuracy[2] = {0.0, 0.0};
  for (int i = 0; i < 2; ++i) {
    const auto j = read_json_file(a.reports[static_cast<std::size_t>(i)]);
    if (!j.contains("outcomes") || !j.at("outcomes").is_array()) {
      throw DataError("'" + a.reports[static_cast<std::size_t>(i)] + "' has no outcomes array (write it with eval)");
    }
    for (const auto& v : j.at("outcomes")) outcomes[i].push_back(v.get<int>() != 0);
    accuracy[i] = j.value("accuracy", 0.0);
  }
  if (outcomes[0].size() != outcomes[1].size()) throw DataError("reports cover different numbers of examples");
  Rng rng(a.c.seed);
  nlohmann::json j = {{"n", outcomes[0].size()},
                      {"accuracy_a", accuracy[0]},
                      {"accuracy_b", accuracy[1]},
                      {"samples", a.samples},
                      {"p_value", eval::permutation_test(outcomes[0], outcomes[1], a.samples, rng)}};
  std::size_t discordant = 0;
  for (std::size_t i = 0; i < outcomes[0].size(); ++i) discordant += outcomes[0][i] != outcomes[1][i];
  j["discordant"] = discordant;
  if (discordant <= 1000) j["exact_p_value"] = eval::exact_permutation_p(outcomes[0], outcomes[1]);
  emit(a.c.out, j.dump(2) + "\n");
  if (!a.c.out.empty()) {
    m.add_output(a.c.out);
    m.write(a.c.out);
  }
}

void run_learning_curve(const CurveArgs& a) {
  require(!a.zh.empty() || !a.en.empty(), "learning-curve needs --en and/or --zh corpora");
  require(!a.dev.empty(), "learning-curve needs --dev");
  RunManifest m("learning-curve");
  add_inputs(m, a.en);
  add_inputs(m, a.zh);
  add_inputs(m, a.dev);
  speaker::TrainingConfig cfg = speaker::bilingual_preset();
  if (!a.c.config.empty()) {
    m.add_input(a.c.config);
    cfg = speaker::training_config_from_json(read_json_file(a.c.config), cfg);
  }
  if (a.epochs) cfg.epochs = *a.epochs;
  cfg.validate();
  std::vector<std::pair<double, double>> points;
  const std::vector<std::string> defaults = {"0:1", "0.125:1", "0.25:1", "0.5:1", "1:1"};
  for (const auto& p : a.points.empty() ? defaults : a.points) {
    const auto colon = p.find(':');
    if (colon == std::string::npos) throw ContractError("point '" + p + "' is not EN_FRACTION:ZH_FRACTION");
    try {
      points.emplace_back(std::stod(p.substr(0, colon)), std::stod(p.substr(colon + 1)));
    } catch (const std::exception&) {
      throw ContractError("point '" + p + "' is not EN_FRACTION:ZH_FRACTION");
    }
  }
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& [e, z] : points) pts.push_back({e, z});
  m.set_config({{"training", speaker::to_json(cfg)}, {"points", pts}});
  m.add_seed("seed", a.c.seed);
  const auto en = a.en.empty() ? std::vector<corpus::Example>{} : load_examples(a.en);
  const auto zh = a.zh.empty() ? std::vector<corpus::Example>{} : load_examples(a.zh);
  const auto curve = eval::learning_curve(en, zh, points, cfg, load_examples(a.dev), a.c.seed);
  for (const auto& p : curve) {
    if (!p.error.empty()) std::cerr << "point " << p.en_fraction << ":" << p.zh_fraction << " failed: " << p.error << "\n";
  }
  emit(a.c.out, eval::learning_curve_csv(curve));
  if (!a.c.out.empty()) {
    m.add_output(a.c.out);
    m.write(a.c.out);
  }
}

void run_lexicon(const LexiconArgs& a) {
  require(!a.c.ckpt.empty(), "lexicon needs --ckpt");
  require(!a.tokens.empty(), "lexicon needs --tokens");
  RunManifest m("lexicon");
  m.add_input(a.c.ckpt);
  m.add_input(a.tokens);
  std::vector<lexicon::PivotPair> pivots;
  const std::vector<std::string> defaults = {"蓝色=blue", "red=红"};
  for (const auto& p : a.pivots.empty() ? defaults : a.pivots) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == p.size()) {
      throw ContractError("pivot '" + p + "' is not SOURCE=TARGET");
    }
    pivots.push_back({p.substr(0, eq), p.substr(eq + 1)});
  }
  std::vector<std::string> sources;
  std::istringstream in(read_file(a.tokens));
  for (std::string line; std::getline(in, line);) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty() && line.front() != '#') sources.push_back(line);
  }
  const auto direction = lexicon::parse_direction(a.direction);
  nlohmann::json pv = nlohmann::json::array();
  for (const auto& p : pivots) pv.push_back({p.source, p.target});
  m.set_config({{"direction", lexicon::to_string(direction)}, {"pivots", pv}});
  const auto model = speaker::load_checkpoint(a.c.ckpt);
  const auto entries = lexicon::induce_lexicon(sources, direction, model.word_vectors(), model.vocabulary(), pivots);
  emit(a.c.out, lexicon::lexicon_tsv(entries));
  if (!a.c.out.empty()) {
    m.add_output(a.c.out);
    m.write(a.c.out);
  }
}

void run_wcs(const WcsArgs& a) {
  require(!a.c.ckpt.empty(), "wcs needs --ckpt");
  RunManifest m("wcs");
  m.add_input(a.c.ckpt);
  m.add_seed("seed", a.c.seed);
  m.set_config({{"language", a.c.lang}, {"contexts", a.contexts}});
  const auto model = speaker::load_checkpoint(a.c.ckpt);
  const auto map = lexicon::elicit_wcs_terms(model, corpus::parse_language(a.c.lang), a.contexts, a.c.seed);
  emit(a.c.out, lexicon::to_json(map).dump(2) + "\n");
  if (!a.c.out.empty()) {
    const auto svg_path = with_suffix(a.c.out, ".svg");
    write_text(svg_path, lexicon::wcs_svg(map));
    m.add_output(a.c.out);
    m.add_output(svg_path);
    m.write(a.c.out);
  }
}

void run_analyze(const AnalyzeArgs& a) {
  require(!a.c.corpora.empty(), "analyze needs at least one --corpus");
  RunManifest m("analyze");
  add_inputs(m, a.c.corpora);
  m.add_seed("seed", a.c.seed);
  const auto& lex = analytics::MarkerLexicon::bundled();
  m.set_config({{"lexicon_version", lex.version}, {"bootstrap_resamples", analytics::kBootstrapResamples}});
  const auto records = corpus::load_corpora_strict(a.c.corpora);
  std::map<corpus::Language, std::vector<corpus::GameRecord>> by_lang;
  for (const auto& r : records) {
    if (r.has_speaker_message()) by_lang[r.language()].push_back(r);
  }
  nlohmann::json stats = nlohmann::json::object();
  std::vector<std::pair<std::string, std::string>> charts;
  for (const auto& name : analytics::statistic_names()) {
    const auto stat = analytics::named_statistic(name, lex);
    nlohmann::json per_lang = nlohmann::json::object();
    std::vector<svg::BarSeries> series;
    for (const auto& [lang, recs] : by_lang) {
      const auto s = analytics::condition_stats(recs, stat, a.c.seed);
      per_lang[corpus::to_string(lang)] = analytics::to_json(s);
      series.push_back(series_of(s, corpus::to_string(lang), lang == corpus::Language::kEnglish ? "#4c72b0" : "#dd8452"));
    }
    stats[name] = per_lang;
    charts.emplace_back(name, svg::bar_chart(name + " by condition", name == "length" ? "tokens per message" : "rate",
                                             category_names(), series));
  }
  const nlohmann::json j = {{"lexicon_version", lex.version},
                            {"messages", corpus::count_speaker_messages(records)},
                            {"statistics", stats},
                            {"coverage", analytics::to_json(analytics::coverage(records, lex))}};
  emit(a.c.out, j.dump(2) + "\n");
  if (!a.c.out.empty()) {
    m.add_output(a.c.out);
    for (const auto& [name, svg_text] : charts) {
      const auto path = with_suffix(a.c.out, "." + name + ".svg");
      write_text(path, svg_text);
      m.add_output(path);
    }
    m.write(a.c.out);
  }
}

void run_compare(const CompareArgs& a) {
  require(!a.c.ckpt.empty(), "compare needs --ckpt");
  require(!a.c.corpora.empty(), "compare needs at least one --corpus");
  RunManifest m("compare");
  m.add_input(a.c.ckpt);
  add_inputs(m, a.c.corpora);
  m.add_seed("seed", a.c.seed);
  m.set_config({{"statistic", a.statistic}});
  const auto& lex = analytics::MarkerLexicon::bundled();
  const auto stat = analytics::named_statistic(a.statistic, lex);
  const auto model = speaker::load_checkpoint(a.c.ckpt);
  const auto paired = analytics::compare_model_human(model, corpus::load_corpora_strict(a.c.corpora), stat, a.c.seed);
  const nlohmann::json j = {
      {"statistic", a.statistic}, {"human", analytics::to_json(paired.human)}, {"model", analytics::to_json(paired.model)}};
  emit(a.c.out, j.dump(2) + "\n");
  if (!a.c.out.empty()) {
    const auto path = with_suffix(a.c.out, ".svg");
    write_text(path, svg::bar_chart("human vs model: " + a.statistic, a.statistic, category_names(),
                                    {series_of(paired.human, "human", "#4c72b0"),
                                     series_of(paired.model, "model", "#55a868")}));
    m.add_output(a.c.out);
    m.add_output(path);
    m.write(a.c.out);
  }
}

void run_serve(const ServeArgs& a) {
  std::shared_ptr<const speaker::Speaker> model;
  if (!a.c.ckpt.empty()) {
    model = std::make_shared<const speaker::SpeakerModel>(speaker::load_checkpoint(a.c.ckpt));
  } else {
    std::cerr << "no --ckpt given; session creation will fail with no_checkpoint\n";
  }
  std::optional<std::string> transcripts;
  if (!a.transcripts.empty()) transcripts = a.transcripts;
  game::SessionManager manager(model, transcripts, a.rounds);
  std::string static_dir = a.static_dir;
  if (!static_dir.empty() && !std::filesystem::is_directory(static_dir)) {
    std::cerr << "static directory '" << static_dir << "' not found; serving the API only\n";
    static_dir.clear();
  }
  std::cerr << "listening on http://" << a.host << ":" << a.port << "\n";
  game::run_server(manager, {a.host, a.port, static_dir});
}

}  // namespace colorref::cli
