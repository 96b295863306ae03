#include <doctest.h>

#include <filesystem>
#include <set>

#include "colorref/corpus/filter.hpp"
#include "colorref/corpus/io.hpp"
#include "colorref/corpus/records.hpp"
#include "colorref/corpus/tokenize.hpp"
#include "colorref/corpus/vocabulary.hpp"
#include "colorref/resources.hpp"

using namespace colorref;
using namespace colorref::corpus;
using Tokens = std::vector<std::string>;

namespace {

GameRecord make_record(const std::string& game, int round, const std::vector<std::string>& texts,
                       Language lang = Language::kEnglish, std::uint64_t seed = 0) {
  GameRecord r;
  r.game_id = game;
  r.round_index = round;
  Rng rng = Rng::derive({seed, static_cast<std::uint64_t>(round), std::hash<std::string>{}(game)});
  r.context = context::sample_context(context::kAllConditions[static_cast<std::size_t>(round % 3)], rng);
  for (const auto& t : texts) r.messages.push_back({Role::kSpeaker, make_utterance(t, lang)});
  r.clicked_index = round % 3;
  return r;
}

std::string repeat_words(int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += "w" + std::to_string(i % 7) + " ";
  return s;
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("english tokenizer") {
    CHECK(tokenize_english("The darker blue") == Tokens{"the", "darker", "blue"});
    CHECK(tokenize_english("isn't bright") == Tokens{"is", "n't", "bright"});
    CHECK(tokenize_english("It's the blue-green one!") == Tokens{"it", "'s", "the", "blue-green", "one", "!"});
    CHECK(tokenize_english("  dark,  not  light. ") == Tokens{"dark", ",", "not", "light", "."});
    CHECK(tokenize_english("don't") == Tokens{"do", "n't"});
    CHECK(tokenize_english("").empty());
  }

  TEST_CASE("chinese tokenizer") {
    CHECK(tokenize_chinese("不亮的橙色") == Tokens{"不", "亮", "的", "橙色"});
    CHECK(tokenize_chinese("更亮") == Tokens{"更", "亮"});
    CHECK(tokenize_chinese("天蓝色") == Tokens{"天蓝色"});
    CHECK(tokenize_chinese("最亮的blue") == Tokens{"最", "亮", "的", "blue"});
    CHECK(tokenize_chinese("深蓝 ok") == Tokens{"深蓝", "ok"});
    const auto words = bundled_resource("zh_words.txt");
    CHECK(words.find("橙色") != std::string_view::npos);
    CHECK(words.find("不亮") == std::string_view::npos);
    CHECK(words.find("亮的") == std::string_view::npos);
  }

  TEST_CASE("tokenization is idempotent on joined tokens") {
    const std::vector<std::pair<std::string, Language>> samples = {
        {"The DARKER blue, isn't it?", Language::kEnglish},
        {"it's a dull-ish grey ... not the pink one", Language::kEnglish},
        {"不亮的橙色", Language::kChinese},
        {"偏蓝一点的绿色 teal", Language::kChinese},
        {"最暗的那个，不是紫色", Language::kChinese},
    };
    for (const auto& [text, lang] : samples) {
      const auto t = tokenize(text, lang);
      CHECK(tokenize(join_tokens(t), lang) == t);
    }
  }

  TEST_CASE("utf8 helpers") {
    CHECK(contains_cjk("蓝"));
    CHECK_FALSE(contains_cjk("blue"));
    const std::string s = "a蓝b";
    CHECK(encode_utf8(decode_utf8(s)) == s);
    CHECK(decode_utf8("\xff").front() == U'�');
    CHECK(parse_language("zh") == Language::kChinese);
    CHECK_THROWS_AS(parse_language("fr"), DataError);
  }

  TEST_CASE("empty speaker message is an error") {
    CHECK_THROWS_AS(make_utterance("   ", Language::kEnglish), DataError);
  }

  TEST_CASE("length filter removes the outlier") {
    std::vector<GameRecord> recs;
    for (int i = 0; i < 100; ++i) recs.push_back(make_record("g" + std::to_string(i), i, {repeat_words(i % 2 ? 3 : 13)}));
    recs.push_back(make_record("long", 1, {repeat_words(200), "short one"}));
    const auto res = filter_corpus(recs);
    CHECK(res.report.removed_length == 1);
    CHECK(res.report.removed_spam == 0);
    CHECK(res.report.reconciles());
    CHECK(res.report.messages_out == 101);
    const auto& stats = res.report.length_stats.at(Language::kEnglish);
    CHECK(stats.count == 102);
  }

  TEST_CASE("spam games are removed whole") {
    std::vector<GameRecord> recs;
    for (int i = 0; i < 25; ++i) recs.push_back(make_record("spam", i, {"same text"}));
    recs.push_back(make_record("spam", 99, {"different"}));
    for (int i = 0; i < 24; ++i) recs.push_back(make_record("ok", i, {"same text"}));
    const auto res = filter_corpus(recs);
    CHECK(res.report.games_removed_spam == 1);
    CHECK(res.report.removed_spam == 26);
    CHECK(res.report.games_out == 1);
    CHECK(res.report.reconciles());
    for (const auto& r : res.records) CHECK(r.game_id == "ok");
    CHECK(duplicate_message_count({&recs[0], &recs[1]}) == 2);
  }

  TEST_CASE("clean corpus passes unchanged") {
    std::vector<GameRecord> recs;
    for (int i = 0; i < 30; ++i) recs.push_back(make_record("g" + std::to_string(i / 5), i, {repeat_words(2 + i % 4)}));
    const auto res = filter_corpus(recs);
    CHECK(res.records == recs);
    CHECK(res.report.removed_length == 0);
    CHECK(res.report.removed_spam == 0);
    CHECK(res.report.removed_orphaned == 0);
    CHECK(res.report.rounds_removed_no_speaker == 0);
  }

  TEST_CASE("filter drops rounds left without a speaker message") {
    std::vector<GameRecord> recs;
    for (int i = 0; i < 60; ++i) recs.push_back(make_record("g", i, {"word " + std::to_string(i)}));
    auto r = make_record("h", 0, {repeat_words(300)});
    r.messages.push_back({Role::kListener, make_utterance("which one", Language::kEnglish)});
    recs.push_back(r);
    const auto res = filter_corpus(recs);
    CHECK(res.report.rounds_removed_no_speaker == 1);
    CHECK(res.report.removed_orphaned == 1);
    CHECK(res.report.removed_length == 1);
    CHECK(res.report.reconciles());
    CHECK(res.records.size() == 60);
  }

  TEST_CASE("split keeps games whole and is deterministic") {
    std::vector<GameRecord> recs;
    for (int g = 0; g < 40; ++g) {
      for (int i = 0; i < 3; ++i) recs.push_back(make_record("game" + std::to_string(g), i, {"x y"}));
    }
    const auto s = split_dataset(recs, {}, 5);
    CHECK(s.train.size() + s.dev.size() + s.test.size() == recs.size());
    std::set<std::string> tr, dv, te;
    for (const auto& r : s.train) tr.insert(r.game_id);
    for (const auto& r : s.dev) dv.insert(r.game_id);
    for (const auto& r : s.test) te.insert(r.game_id);
    for (const auto& g : tr) {
      CHECK_FALSE(dv.contains(g));
      CHECK_FALSE(te.contains(g));
    }
    for (const auto& g : dv) CHECK_FALSE(te.contains(g));
    CHECK(tr.size() == 32);
    CHECK(dv.size() == 4);
    const auto again = split_dataset(recs, {}, 5);
    CHECK(again.train == s.train);
    CHECK(again.test == s.test);
    const auto all = split_dataset(recs, {1.0, 0.0, 0.0}, 5);
    CHECK(all.train.size() == recs.size());
    CHECK_THROWS(split_dataset(recs, {0.5, 0.2, 0.2}, 1));
  }

  TEST_CASE("vocabulary") {
    const auto v = build_vocabulary(std::vector<Tokens>{{"a", "a", "b"}});
    CHECK(v.contains("a"));
    CHECK_FALSE(v.contains("b"));
    CHECK(v.id("b") == Vocabulary::kUnk);
    CHECK(v.size() == Vocabulary::kNumSpecial + 1);
    const auto empty = build_vocabulary(std::vector<Tokens>{});
    CHECK(empty.size() == Vocabulary::kNumSpecial);
    const Tokens seq = {"a", "a"};
    CHECK(v.decode(v.encode(seq)) == seq);
    // Every kept token meets min_count.
    const auto big = build_vocabulary(std::vector<Tokens>{{"x", "y", "x", "z", "z", "z"}}, 2);
    for (std::size_t i = Vocabulary::kNumSpecial; i < big.size(); ++i) CHECK(big.counts()[i] >= 2);
    CHECK(big.token(static_cast<int>(Vocabulary::kNumSpecial)) == "z");
  }

  TEST_CASE("joint vocabulary exceeds the union of per-language builds") {
    // "ok" and "lol" occur once in each language.
    std::vector<GameRecord> en, zh;
    en.push_back(make_record("e", 0, {"blue blue ok lol"}));
    zh.push_back(make_record("z", 0, {"蓝色 蓝色 ok lol"}, Language::kChinese));
    const auto ve = build_vocabulary(en, 2);
    const auto vz = build_vocabulary(zh, 2);
    auto joint_recs = en;
    joint_recs.insert(joint_recs.end(), zh.begin(), zh.end());
    const auto vj = build_vocabulary(joint_recs, 2);
    std::set<std::string> uni;
    for (const auto* v : {&ve, &vz}) {
      for (std::size_t i = Vocabulary::kNumSpecial; i < v->size(); ++i) uni.insert(v->tokens()[i]);
    }
    CHECK(vj.size() - Vocabulary::kNumSpecial > uni.size());
    CHECK(vj.contains("ok"));
  }

  TEST_CASE("native jsonl round trip") {
    std::vector<GameRecord> recs;
    recs.push_back(make_record("a", 0, {"the darker one", "no, lighter"}));
    recs.push_back(make_record("b", 1, {"不亮的橙色"}, Language::kChinese));
    recs.back().clicked_index.reset();
    recs.back().messages.push_back({Role::kListener, make_utterance("哪个?", Language::kChinese)});
    const auto text = to_jsonl(recs);
    const auto loaded = parse_corpus(text);
    CHECK(loaded.errors.empty());
    CHECK(loaded.records == recs);
    CHECK(to_jsonl(loaded.records) == text);

    const auto path = (std::filesystem::temp_directory_path() / "colorref_roundtrip.jsonl").string();
    save_corpus(path, recs);
    CHECK(read_file(path) == text);
    CHECK(load_corpus(path).records == recs);
    std::filesystem::remove(path);
  }

  TEST_CASE("malformed rows are reported") {
    std::vector<GameRecord> recs = {make_record("a", 0, {"red"})};
    auto good = to_jsonl(recs);
    auto j = nlohmann::json::parse(good);
    j.erase("target_index");
    const std::string text = good + j.dump() + "\n{not json}\n";
    const auto res = parse_corpus(text);
    CHECK(res.records.size() == 1);
    REQUIRE(res.errors.size() == 2);
    CHECK(res.errors[0].line == 2);
    CHECK(res.errors[0].message.find("target_index") != std::string::npos);
    CHECK(res.errors[1].line == 3);
  }

  TEST_CASE("csv import through a column mapping") {
    const std::string csv =
        "gameid,roundNum,contents,clickStatus,c0H,c0S,c0L,c1H,c1S,c1L,c2H,c2S,c2L,tgt\n"
        "g1,1,\"the red, bright one\",target,0,100,50,120,100,50,240,100,50,0\n"
        "g1,1,yes,,0,100,50,120,100,50,240,100,50,0\n"
        "g1,2,dark blue,target,10,100,50,200,100,50,230,100,50,2\n"
        "g2,1,,target,0,100,50,120,100,50,240,100,50,7\n";
    const nlohmann::json mapping = {{"gameid", "game_id"},   {"roundNum", "round_index"}, {"contents", "text"},
                                    {"tgt", "target_index"}, {"c0H", "color0_h"},         {"c0S", "color0_s"},
                                    {"c0L", "color0_l"},     {"c1H", "color1_h"},         {"c1S", "color1_s"},
                                    {"c1L", "color1_l"},     {"c2H", "color2_h"},         {"c2S", "color2_s"},
                                    {"c2L", "color2_l"}};
    const auto res = import_csv(csv, mapping);
    REQUIRE(res.records.size() == 2);
    CHECK(res.records[0].speaker_messages().size() == 2);
    CHECK(res.records[0].context.colors[0].v() == doctest::Approx(100));
    CHECK(res.records[0].context.condition == context::Condition::kFar);
    CHECK(res.errors.size() == 1);
    CHECK(parse_csv("a,\"b\"\"c\"\n1,2\n") == std::vector<std::vector<std::string>>{{"a", "b\"c"}, {"1", "2"}});
  }
}
