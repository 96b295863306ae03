#include <doctest.h>

#include <algorithm>

#include "colorref/analytics.hpp"
#include "colorref/error.hpp"
#include "support/tabular_speaker.hpp"
#include "support/toy_corpus.hpp"

using namespace colorref;
using namespace colorref::analytics;
using corpus::Language;
using Tokens = std::vector<std::string>;

namespace {

const MarkerLexicon& lex() { return MarkerLexicon::bundled(); }

corpus::GameRecord with_message(corpus::GameRecord r, const std::string& text, Language lang) {
  r.messages = {{corpus::Role::kSpeaker, corpus::make_utterance(text, lang)}};
  return r;
}

}  // namespace

TEST_SUITE("analytics") {
  TEST_CASE("bundled lexicon contents") {
    const auto& l = lex();
    CHECK(l.version == "1");
    CHECK(l.negation.at(Language::kEnglish) == std::set<std::string>{"not", "n't"});
    CHECK(l.negation.at(Language::kChinese) == std::set<std::string>{"不", "没"});
    CHECK(l.comparative.at(Language::kChinese) == std::set<std::string>{"更", "比"});
    CHECK(l.superlative.at(Language::kChinese) == std::set<std::string>{"最"});
    CHECK(l.adjectives_en.contains("dark"));
    CHECK_FALSE(l.adjectives_en.contains("cool"));
    CHECK(l.specificity.at("maroon") == Specificity::kSpecific);
    CHECK(l.specificity.at("红") == Specificity::kBasic);
  }

  TEST_CASE("negation") {
    CHECK(detect_negation({"is", "n't", "bright"}, Language::kEnglish, lex()));
    CHECK(detect_negation({"不", "亮", "的", "橙色"}, Language::kChinese, lex()));
    CHECK_FALSE(detect_negation({"bright", "red"}, Language::kEnglish, lex()));
    CHECK_FALSE(detect_negation({"not"}, Language::kChinese, lex()));
  }

  TEST_CASE("comparatives") {
    CHECK(detect_comparative({"the", "darker", "one"}, Language::kEnglish, lex()));
    CHECK(detect_comparative({"更", "亮"}, Language::kChinese, lex()));
    CHECK_FALSE(detect_comparative({"water", "cooler"}, Language::kEnglish, lex()));
    CHECK(detect_comparative({"more", "blue"}, Language::kEnglish, lex()));
    CHECK_FALSE(detect_comparative({"blue", "more"}, Language::kEnglish, lex()));
    CHECK(detect_comparative({"paler"}, Language::kEnglish, lex()));
    CHECK(detect_comparative({"redder"}, Language::kEnglish, lex()));
    CHECK(detect_comparative({"better"}, Language::kEnglish, lex()));
    CHECK_FALSE(detect_comparative({"er"}, Language::kEnglish, lex()));
    CHECK_FALSE(detect_comparative({"under"}, Language::kEnglish, lex()));
  }

  TEST_CASE("superlatives") {
    CHECK(detect_superlative({"the", "brightest"}, Language::kEnglish, lex()));
    CHECK(detect_superlative({"最", "亮"}, Language::kChinese, lex()));
    CHECK_FALSE(detect_superlative({"bright"}, Language::kEnglish, lex()));
    CHECK(detect_superlative({"most", "green"}, Language::kEnglish, lex()));
    CHECK(detect_superlative({"palest"}, Language::kEnglish, lex()));
    CHECK_FALSE(detect_superlative({"darker"}, Language::kEnglish, lex()));
  }

  TEST_CASE("detectors ignore token order except more/most") {
    std::vector<std::pair<Tokens, Language>> cases = {{{"a", "darker", "not", "blue"}, Language::kEnglish},
                                                      {{"最", "不", "亮", "比"}, Language::kChinese},
                                                      {{"the", "lightest", "teal", "sky"}, Language::kEnglish}};
    for (auto [t, lang] : cases) {
      const bool n = detect_negation(t, lang, lex());
      const bool c = detect_comparative(t, lang, lex());
      const bool s = detect_superlative(t, lang, lex());
      const bool sp = is_specific(t, lex());
      std::sort(t.begin(), t.end());
      do {
        CHECK(detect_negation(t, lang, lex()) == n);
        CHECK(detect_comparative(t, lang, lex()) == c);
        CHECK(detect_superlative(t, lang, lex()) == s);
        CHECK(is_specific(t, lex()) == sp);
      } while (std::next_permutation(t.begin(), t.end()));
    }
  }

  TEST_CASE("specificity") {
    CHECK(is_specific({"maroon"}, lex()));
    CHECK_FALSE(is_specific({"红"}, lex()));
    CHECK(has_nominal_modifier({"sky", "blue"}, lex()));
    CHECK_FALSE(has_nominal_modifier({"blue"}, lex()));
  }

  TEST_CASE("lexicon parsing errors") {
    CHECK_THROWS_AS(MarkerLexicon::parse("en\tnegation\n", "", ""), DataError);
    CHECK_THROWS_AS(MarkerLexicon::parse("fr\tnegation\tpas\n", "", ""), DataError);
    CHECK_THROWS_AS(MarkerLexicon::parse("", "", "teal\tweird\n"), DataError);
    const auto l = MarkerLexicon::parse("# version: 7\nen\tnegation\tnope\n", "big\n", "teal\tspecific\n");
    CHECK(l.version == "7");
    CHECK(detect_negation({"nope"}, Language::kEnglish, l));
    CHECK(detect_comparative({"bigger"}, Language::kEnglish, l));
  }

  TEST_CASE("condition statistics") {
    auto base = testing::toy_records(3, 2);
    base[0].context.condition = context::Condition::kFar;
    const std::vector<corpus::GameRecord> one = {with_message(base[0], "a b c d", Language::kEnglish)};
    const auto length = named_statistic("length", lex());
    const auto s = condition_stats(one, length, 1);
    REQUIRE(s.by_condition.size() == 1);
    CHECK(s.by_condition.at(context::Condition::kFar).mean == 4.0);
    CHECK(s.by_condition.at(context::Condition::kFar).ci_low == 4.0);
    CHECK_FALSE(s.by_condition.contains(context::Condition::kClose));
    CHECK(s.total_count() == 1);
    CHECK(to_json(s).contains("far"));
    CHECK_FALSE(to_json(s).contains("close"));
  }

  TEST_CASE("bootstrap is seeded and brackets the mean") {
    std::vector<double> v;
    for (int i = 0; i < 50; ++i) v.push_back(i % 7);
    const auto a = summarize(v, 3);
    const auto b = summarize(v, 3);
    CHECK(a.ci_low == b.ci_low);
    CHECK(a.ci_high == b.ci_high);
    CHECK(a.ci_low <= a.mean);
    CHECK(a.mean <= a.ci_high);
    CHECK(a.count == 50);
    CHECK(a.mean == doctest::Approx(147.0 / 50.0));
  }

  TEST_CASE("specificity rates are fractions of messages") {
    auto recs = testing::toy_records(6, 3);
    recs[0] = with_message(recs[0], "maroon", Language::kEnglish);
    recs[1] = with_message(recs[1], "红", Language::kChinese);
    const auto r = specificity_rate(recs, lex());
    std::size_t n = 0;
    for (const auto& [c, sum] : r.by_condition) {
      CHECK(sum.mean >= 0.0);
      CHECK(sum.mean <= 1.0);
      n += sum.count;
    }
    CHECK(n == recs.size());
    const auto stat = named_statistic("specificity", lex());
    CHECK(stat(corpus::make_utterance("maroon", Language::kEnglish)) == 1.0);
    CHECK(stat(corpus::make_utterance("红", Language::kChinese)) == 0.0);
    CHECK_THROWS(named_statistic("verbosity", lex()));
  }

  TEST_CASE("coverage report") {
    auto recs = testing::toy_records(2, 4);
    recs[0] = with_message(recs[0], "the cooler zorblax", Language::kEnglish);
    const auto c = coverage(recs, lex());
    CHECK(c.tokens == 4);
    CHECK(c.unlabeled.contains("zorblax"));
    CHECK(c.suffix_misses.contains("cooler"));
    CHECK(c.covered + [&] {
      std::size_t u = 0;
      for (const auto& [t, k] : c.unlabeled) u += k;
      return u;
    }() == c.tokens);
  }

  TEST_CASE("model and human comparison") {
    const auto recs = testing::toy_records(12, 5);
    const testing::TabularSpeaker s;
    const MessageStatistic one = [](const corpus::Utterance&) { return 1.0; };
    const auto p = compare_model_human(s, recs, one, 2);
    REQUIRE(p.human.by_condition.size() == p.model.by_condition.size());
    for (const auto& [c, h] : p.human.by_condition) {
      const auto& m = p.model.by_condition.at(c);
      CHECK(h.mean == m.mean);
      CHECK(h.count == m.count);
      CHECK(h.ci_low == m.ci_low);
      CHECK(h.ci_high == m.ci_high);
    }
    const auto length = named_statistic("length", lex());
    const auto a = compare_model_human(s, recs, length, 2);
    const auto b = compare_model_human(s, recs, length, 2);
    CHECK(to_json(a.model) == to_json(b.model));
  }
}
