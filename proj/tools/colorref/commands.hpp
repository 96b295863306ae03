#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace colorref::cli {

/// Flags shared by most subcommands; each subcommand registers the subset
/// it uses.
struct Common {
  std::uint64_t seed = 0;
  std::string config;
  std::vector<std::string> corpora;
  std::string ckpt;
  std::string out;
  std::string lang = "en";
  std::string policy;
  double theta = 20.0;
};

struct GenContextsArgs {
  Common c;
  std::size_t n = 300;
  double min_distance = 5.0;
  std::string condition;
};

struct ImportArgs {
  Common c;
  std::string csv;
  std::string mapping;
};

struct SplitArgs {
  Common c;
  std::vector<double> ratios{0.8, 0.1, 0.1};
};

struct TrainArgs {
  Common c;
  std::vector<std::string> heldout;
  std::optional<int> epochs;
  std::optional<std::size_t> batch_size;
  bool seed_given = false;
};

struct EvalArgs {
  Common c;
};

struct PerplexityArgs {
  Common c;
  std::vector<std::string> train_corpora;
  std::vector<std::string> union_corpora;
};

struct PermtestArgs {
  Common c;
  std::vector<std::string> reports;
  std::size_t samples = 10000;
};

struct CurveArgs {
  Common c;
  std::vector<std::string> en;
  std::vector<std::string> zh;
  std::vector<std::string> dev;
  std::vector<std::string> points;
  std::optional<int> epochs;
};

struct LexiconArgs {
  Common c;
  std::string tokens;
  std::string direction = "zh-en";
  std::vector<std::string> pivots;
};

struct WcsArgs {
  Common c;
  int contexts = 10;
};

struct AnalyzeArgs {
  Common c;
};

struct CompareArgs {
  Common c;
  std::string statistic = "length";
};

struct ServeArgs {
  Common c;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir = "web";
  std::string transcripts;
  int rounds = 50;
};

void run_gen_contexts(const GenContextsArgs& a);
void run_import(const ImportArgs& a);
void run_filter(const Common& a);
void run_split(const SplitArgs& a);
void run_train(const TrainArgs& a);
void run_eval(const EvalArgs& a);
void run_perplexity(const PerplexityArgs& a);
void run_permtest(const PermtestArgs& a);
void run_learning_curve(const CurveArgs& a);
void run_lexicon(const LexiconArgs& a);
void run_wcs(const WcsArgs& a);
void run_analyze(const AnalyzeArgs& a);
void run_compare(const CompareArgs& a);
void run_serve(const ServeArgs& a);

}  // namespace colorref::cli
