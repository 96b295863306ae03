#include <doctest.h>

#include <filesystem>
#include <thread>

#include <httplib.h>

#include "colorref/corpus/io.hpp"
#include "colorref/evaluation.hpp"
#include "colorref/game/server.hpp"
#include "colorref/game/session.hpp"
#include "colorref/resources.hpp"
#include "support/json_schema.hpp"
#include "support/tabular_speaker.hpp"

using namespace colorref;
using namespace colorref::game;

namespace {

std::shared_ptr<const speaker::Speaker> tabular(double sharp = 10.0) {
  return std::make_shared<testing::TabularSpeaker>(sharp);
}

const testing::SchemaValidator& schema() {
  static const testing::SchemaValidator v(nlohmann::json::parse(read_file(COLORREF_WEB_DIR "/session-view.schema.json")));
  return v;
}

void check_view(const nlohmann::json& view) {
  const auto errors = schema().validate(view);
  for (const auto& e : errors) FAIL_CHECK(e);
  CHECK(errors.empty());
}

SessionConfig cfg_of(Mode mode, std::uint64_t seed, int rounds = 50) {
  SessionConfig c;
  c.mode = mode;
  c.seed = seed;
  c.rounds = rounds;
  return c;
}

bool target_bucket_unique(const context::ReferenceContext& ctx) {
  const int tb = testing::hue_bucket(ctx.colors[static_cast<std::size_t>(ctx.target_index)]);
  for (int d = 0; d < 3; ++d) {
    if (d != ctx.target_index && testing::hue_bucket(ctx.colors[static_cast<std::size_t>(d)]) == tb) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("game") {
  TEST_CASE("names parse case-insensitively") {
    CHECK(parse_mode("human_listener") == Mode::kHumanListener);
    CHECK(parse_condition_policy("Random") == ConditionPolicy::kRandom);
    CHECK(to_string(State::kAwaitingClick) == "AWAITING_CLICK");
    try {
      parse_mode("spectator");
      FAIL("expected an error");
    } catch (const GameError& e) {
      CHECK(e.code() == "validation_error");
    }
  }

  TEST_CASE("round contexts are deterministic and cycle conditions") {
    const auto c = cfg_of(Mode::kHumanSpeaker, 5);
    for (int r = 1; r <= 6; ++r) {
      const auto ctx = round_context(c, r);
      CHECK(ctx == round_context(c, r));
      CHECK(ctx.condition == context::kAllConditions[static_cast<std::size_t>((r - 1) % 3)]);
      CHECK(context::classify_condition(ctx.colors, ctx.target_index, ctx.theta) == ctx.condition);
    }
    Session a("a", c, tabular());
    Session b("b", c, tabular());
    CHECK(a.current_context() == b.current_context());
    auto rc = c;
    rc.policy = ConditionPolicy::kRandom;
    CHECK(round_context(rc, 3) == round_context(rc, 3));
  }

  TEST_CASE("human speaker flow") {
    Session s("s1", cfg_of(Mode::kHumanSpeaker, 3), tabular());
    CHECK(s.state() == State::kAwaitingMessage);
    CHECK(s.round() == 1);
    auto v = s.view();
    check_view(v);
    CHECK(v["context"].contains("target_index"));
    CHECK(v["last_round"].is_null());

    for (int r = 1; r <= 9; ++r) {
      const auto ctx = s.current_context();
      const auto msg = testing::TabularSpeaker(10.0).describe(ctx, corpus::Language::kEnglish).raw_text;
      s.post_message(msg);
      CHECK(s.round() == r + 1);
      CHECK(s.total() == r);
      CHECK(s.state() == State::kAwaitingMessage);
      const auto& last = s.history().back();
      const auto expect =
          eval::pragmatic_listener(*tabular(), corpus::tokenize(msg, corpus::Language::kEnglish), ctx.colors,
                                   corpus::Language::kEnglish);
      CHECK(last.clicked_index == expect.t_star);
      CHECK(last.correct == (expect.t_star == ctx.target_index));
      if (target_bucket_unique(ctx)) CHECK(last.correct);
      v = s.view();
      check_view(v);
      CHECK(v["last_round"]["target_index"] == ctx.target_index);
    }
    const auto& t = s.transcript();
    REQUIRE(t.size() == 18);
    CHECK_FALSE(t[0].from_model);
    CHECK(t[0].text.has_value());
    CHECK(t[1].from_model);
    CHECK(t[1].role == corpus::Role::kListener);
    CHECK(t[1].click.has_value());
  }

  TEST_CASE("speaker mode errors") {
    Session s("s", cfg_of(Mode::kHumanSpeaker, 1), tabular());
    try {
      s.post_message("   ");
      FAIL("expected an error");
    } catch (const GameError& e) {
      CHECK(e.code() == "validation_error");
    }
    try {
      s.click_target(0);
      FAIL("expected an error");
    } catch (const GameError& e) {
      CHECK(e.code() == "state_error");
    }
    CHECK(s.round() == 1);
    CHECK(s.transcript().empty());
  }

  TEST_CASE("human listener flow hides the target") {
    Session s("l", cfg_of(Mode::kHumanListener, 8, 4), tabular());
    CHECK(s.state() == State::kAwaitingClick);
    REQUIRE(s.transcript().size() == 1);
    CHECK(s.transcript()[0].from_model);
    CHECK(s.transcript()[0].role == corpus::Role::kSpeaker);
    auto v = s.view();
    check_view(v);
    CHECK_FALSE(v["context"].contains("target_index"));
    CHECK(v.dump().find("target_index") == std::string::npos);

    int correct = 0;
    for (int r = 1; r <= 4; ++r) {
      const auto ctx = s.current_context();
      const int pick = r % 2 ? ctx.target_index : (ctx.target_index + 1) % 3;
      correct += pick == ctx.target_index;
      s.click_target(pick);
      CHECK(s.correct() == correct);
      CHECK(s.total() == r);
      v = s.view();
      check_view(v);
      CHECK(v["last_round"]["target_index"] == ctx.target_index);
      if (r < 4) {
        CHECK(s.current_context() != ctx);
        CHECK_FALSE(v["context"].contains("target_index"));
      }
    }
    CHECK(s.finished());
    CHECK(s.state() == State::kRoundDone);
    CHECK(v["context"].contains("target_index"));
    try {
      s.click_target(0);
      FAIL("expected an error");
    } catch (const GameError& e) {
      CHECK(e.code() == "state_error");
    }
  }

  TEST_CASE("second click in a one-round game is a state error") {
    Session s("l", cfg_of(Mode::kHumanListener, 2, 1), tabular());
    s.click_target(1);
    CHECK_THROWS_AS(s.click_target(1), GameError);
    Session t("m", cfg_of(Mode::kHumanListener, 2, 1), tabular());
    try {
      t.click_target(3);
      FAIL("expected an error");
    } catch (const GameError& e) {
      CHECK(e.code() == "validation_error");
    }
    try {
      t.post_message("hi");
      FAIL("expected an error");
    } catch (const GameError& e) {
      CHECK(e.code() == "state_error");
    }
  }

  TEST_CASE("replay reproduces the session") {
    for (auto mode : {Mode::kHumanSpeaker, Mode::kHumanListener}) {
      auto c = cfg_of(mode, 77, 6);
      c.policy = ConditionPolicy::kRandom;
      Session s("r", c, tabular(1.0));
      for (int r = 0; r < 5; ++r) {
        if (mode == Mode::kHumanSpeaker) {
          s.post_message(r % 2 ? "w1 w3" : "w4");
        } else {
          s.click_target(r % 3);
        }
      }
      const auto again = Session::replay("r", c, tabular(1.0), s.transcript());
      CHECK(again.view() == s.view());
      CHECK(again.transcript() == s.transcript());
    }
  }

  TEST_CASE("manager errors and persistence") {
    const auto path = (std::filesystem::temp_directory_path() / "colorref_game_transcripts.jsonl").string();
    std::filesystem::remove(path);
    SessionManager m(tabular(), path, 3);
    const auto v = m.create(nlohmann::json{{"mode", "HUMAN_SPEAKER"}, {"language", "en"}, {"seed", 4}});
    check_view(v);
    CHECK(v["rounds"] == 3);
    const std::string id = v["session_id"];
    CHECK(id.size() == 16);
    m.post_message(id, "w0");
    m.post_message(id, "w2 w2");
    const auto loaded = corpus::load_corpus(path);
    CHECK(loaded.errors.empty());
    REQUIRE(loaded.records.size() == 2);
    CHECK(loaded.records[0].game_id == id);
    CHECK(loaded.records[1].round_index == 2);
    CHECK(loaded.records[1].speaker_messages().front()->tokens == std::vector<std::string>{"w2", "w2"});

    auto code_of = [](auto&& f) {
      try {
        f();
      } catch (const GameError& e) {
        return e.code();
      }
      return std::string("none");
    };
    CHECK(code_of([&] { m.get("nope"); }) == "not_found");
    CHECK(code_of([&] { m.create(nlohmann::json{{"language", "en"}}); }) == "validation_error");
    CHECK(code_of([&] { m.create(nlohmann::json{{"mode", "HUMAN_SPEAKER"}, {"rounds", 0}}); }) == "validation_error");
    CHECK(code_of([&] { m.create(nlohmann::json{{"mode", "HUMAN_SPEAKER"}, {"language", "fr"}}); }) ==
          "validation_error");
    CHECK(code_of([&] { m.create(nlohmann::json::array()); }) == "bad_request");
    SessionManager empty(nullptr);
    CHECK(code_of([&] { empty.create(SessionConfig{}); }) == "no_checkpoint");

    const auto a = m.create(nlohmann::json{{"mode", "HUMAN_SPEAKER"}});
    const auto b = m.create(nlohmann::json{{"mode", "HUMAN_SPEAKER"}});
    CHECK(a["session_id"] != b["session_id"]);
    CHECK(a["seed"] != b["seed"]);
    CHECK(m.size() == 3);
    std::filesystem::remove(path);
  }

  TEST_CASE("concurrent sessions are independent") {
    SessionManager m(tabular());
    std::vector<std::string> ids;
    for (int i = 0; i < 4; ++i) {
      ids.push_back(m.create(cfg_of(Mode::kHumanSpeaker, 9))["session_id"]);
    }
    std::vector<std::thread> threads;
    for (const auto& id : ids) {
      threads.emplace_back([&m, id] {
        for (int r = 0; r < 20; ++r) m.post_message(id, "w3");
      });
    }
    for (auto& t : threads) t.join();
    const auto first = m.get(ids[0]);
    for (const auto& id : ids) {
      auto v = m.get(id);
      CHECK(v["score"] == first["score"]);
      CHECK(v["round"] == 21);
      v.erase("session_id");
      auto f = first;
      f.erase("session_id");
      CHECK(v == f);
    }
  }

  TEST_CASE("api dispatch") {
    SessionManager m(tabular(), std::nullopt, 2);
    auto r = dispatch(m, "POST", "/api/session", R"({"mode": "HUMAN_LISTENER", "language": "zh", "seed": 1})");
    CHECK(r.status == 200);
    CHECK(r.body["ok"] == true);
    check_view(r.body["session"]);
    const std::string id = r.body["session"]["session_id"];

    r = dispatch(m, "GET", "/api/session/" + id, "");
    CHECK(r.status == 200);
    CHECK_FALSE(r.body["session"]["context"].contains("target_index"));

    r = dispatch(m, "POST", "/api/session/" + id + "/message", R"({"text": "hello"})");
    CHECK(r.status == 409);
    CHECK(r.body["ok"] == false);
    CHECK(r.body["error"]["code"] == "state_error");

    r = dispatch(m, "POST", "/api/session/" + id + "/click", R"({"index": 5})");
    CHECK(r.status == 400);
    CHECK(r.body["error"]["code"] == "validation_error");
    r = dispatch(m, "POST", "/api/session/" + id + "/click", R"({"index": "1"})");
    CHECK(r.body["error"]["code"] == "validation_error");
    r = dispatch(m, "POST", "/api/session/" + id + "/click", "{bad");
    CHECK(r.status == 400);
    CHECK(r.body["error"]["code"] == "bad_request");
    r = dispatch(m, "POST", "/api/session/" + id + "/click", R"({"index": 1})");
    CHECK(r.status == 200);
    check_view(r.body["session"]);
    CHECK(r.body["session"]["score"]["total"] == 1);

    CHECK(dispatch(m, "GET", "/api/session/unknown", "").status == 404);
    CHECK(dispatch(m, "GET", "/api/other", "").status == 404);
    CHECK(dispatch(m, "GET", "/api/session", "").status == 400);
    CHECK(dispatch(m, "GET", "/api/session/" + id + "/click", "").status == 400);
    SessionManager none(nullptr);
    CHECK(dispatch(none, "POST", "/api/session", R"({"mode": "HUMAN_SPEAKER"})").status == 503);
  }

  TEST_CASE("http round trip and static files") {
    SessionManager m(tabular(), std::nullopt, 5);
    ServerOptions opts;
    opts.port = 0;
    opts.static_dir = COLORREF_TEST_DATA_DIR "/web";
    GameServer server(m, opts);
    const int port = server.bind();
    std::thread t([&] { server.listen(); });
    server.wait_until_ready();

    httplib::Client cli("127.0.0.1", port);
    auto res = cli.Post("/api/session", R"({"mode": "HUMAN_SPEAKER", "seed": 3})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto body = nlohmann::json::parse(res->body);
    check_view(body["session"]);
    const std::string id = body["session"]["session_id"];
    res = cli.Post("/api/session/" + id + "/message", R"({"text": "w2"})", "application/json");
    REQUIRE(res);
    CHECK(nlohmann::json::parse(res->body)["session"]["round"] == 2);
    res = cli.Get("/api/session/zzz");
    REQUIRE(res);
    CHECK(res->status == 404);
    res = cli.Get("/index.html");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body.find("colorref test") != std::string::npos);

    server.stop();
    t.join();
  }

  TEST_CASE("schema rejects a leaked target") {
    Session s("l", cfg_of(Mode::kHumanListener, 8, 4), tabular());
    auto v = s.view();
    v["context"]["target_index"] = 0;
    CHECK_FALSE(schema().validate(v).empty());
    Session sp("s", cfg_of(Mode::kHumanSpeaker, 8, 4), tabular());
    auto w = sp.view();
    w["context"].erase("target_index");
    CHECK_FALSE(schema().validate(w).empty());
  }
}
