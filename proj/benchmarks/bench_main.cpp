#include <benchmark/benchmark.h>

#include "colorref/colorspace.hpp"
#include "colorref/contextgen.hpp"
#include "colorref/evaluation.hpp"
#include "colorref/speaker/train.hpp"
#include "support/toy_corpus.hpp"

using namespace colorref;

namespace {

void BM_Ciede2000(benchmark::State& state) {
  Rng rng(1);
  std::vector<color::ColorLab> labs;
  for (int i = 0; i < 256; ++i) labs.push_back({rng.uniform(0, 100), rng.uniform(-80, 80), rng.uniform(-80, 80)});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(color::ciede2000(labs[i & 255], labs[(i * 7 + 3) & 255]));
    ++i;
  }
}
BENCHMARK(BM_Ciede2000);

void BM_SampleContext(benchmark::State& state) {
  const auto cond = context::kAllConditions[static_cast<std::size_t>(state.range(0))];
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(context::sample_context(cond, rng));
}
BENCHMARK(BM_SampleContext)->DenseRange(0, 2)->ArgName("condition");

speaker::SpeakerModel preset_model(const std::vector<corpus::GameRecord>& recs) {
  auto vocab = corpus::build_vocabulary(recs, 1);
  speaker::SpeakerModel m(std::move(vocab), speaker::monolingual_preset());
  Rng rng(3);
  m.initialize(rng);
  return m;
}

// One forward/backward pass of the preset-size model over a batch.
void BM_TrainStep(benchmark::State& state) {
  const auto recs = testing::toy_records(static_cast<std::size_t>(state.range(0)), 4);
  const auto examples = corpus::make_examples(recs);
  auto m = preset_model(recs);
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto batch = speaker::make_batch(examples, order, m.vocabulary());
  Rng dropout(5);
  for (auto _ : state) {
    nn::Graph g;
    std::size_t tokens = 0;
    const auto loss = m.build_loss(g, batch, &dropout, tokens);
    g.backward(loss);
    benchmark::DoNotOptimize(g.value(loss)[0]);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainStep)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

// Listener decisions: three scored candidates per example.
void BM_ListenerBatch(benchmark::State& state) {
  const auto recs = testing::toy_records(static_cast<std::size_t>(state.range(0)), 6);
  const auto examples = corpus::make_examples(recs);
  const auto m = preset_model(recs);
  for (auto _ : state) benchmark::DoNotOptimize(eval::pragmatic_listener_batch(m, examples));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ListenerBatch)->Arg(1)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_GreedyDecode(benchmark::State& state) {
  const auto recs = testing::toy_records(8, 7);
  const auto m = preset_model(recs);
  for (auto _ : state) benchmark::DoNotOptimize(m.describe(recs[0].context, corpus::Language::kEnglish));
}
BENCHMARK(BM_GreedyDecode)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
