#include "colorref/game/session.hpp"

#include <cctype>
#include <fstream>
#include <random>

#include "colorref/colorspace.hpp"
#include "colorref/corpus/io.hpp"
#include "colorref/evaluation.hpp"
#include "colorref/rng.hpp"

namespace colorref::game {

namespace {

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

nlohmann::json colors_json(const context::ReferenceContext& ctx) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : ctx.colors) arr.push_back(context::color_to_json(c, true));
  return arr;
}

}  // namespace

std::string to_string(Mode m) { return m == Mode::kHumanSpeaker ? "HUMAN_SPEAKER" : "HUMAN_LISTENER"; }

std::string to_string(State s) {
  switch (s) {
    case State::kAwaitingMessage: return "AWAITING_MESSAGE";
    case State::kAwaitingClick: return "AWAITING_CLICK";
    case State::kRoundDone: return "ROUND_DONE";
  }
  return "ROUND_DONE";
}

std::string to_string(ConditionPolicy p) { return p == ConditionPolicy::kCycle ? "cycle" : "random"; }

Mode parse_mode(const std::string& text) {
  const auto u = upper(text);
  if (u == "HUMAN_SPEAKER") return Mode::kHumanSpeaker;
  if (u == "HUMAN_LISTENER") return Mode::kHumanListener;
  throw GameError("validation_error", "unknown mode '" + text + "' (expected HUMAN_SPEAKER or HUMAN_LISTENER)");
}

ConditionPolicy parse_condition_policy(const std::string& text) {
  const auto u = upper(text);
  if (u == "CYCLE") return ConditionPolicy::kCycle;
  if (u == "RANDOM") return ConditionPolicy::kRandom;
  throw GameError("validation_error", "unknown condition policy '" + text + "' (expected cycle or random)");
}

context::ReferenceContext round_context(const SessionConfig& cfg, int round) {
  const auto r = static_cast<std::uint64_t>(round);
  context::Condition cond;
  if (cfg.policy == ConditionPolicy::kCycle) {
    cond = context::kAllConditions[static_cast<std::size_t>((round - 1) % 3)];
  } else {
    Rng pick = Rng::derive({cfg.seed, r, 1});
    cond = context::kAllConditions[pick.uniform_int(3)];
  }
  Rng rng = Rng::derive({cfg.seed, r, 0});
  return context::sample_context(cond, rng, cfg.theta);
}

Session::Session(std::string id, SessionConfig cfg, std::shared_ptr<const speaker::Speaker> speaker)
    : id_(std::move(id)), cfg_(cfg), speaker_(std::move(speaker)) {
  if (!speaker_) throw GameError("no_checkpoint", "no speaker checkpoint is loaded");
  if (cfg_.rounds < 1) throw GameError("validation_error", "rounds must be at least 1");
  start_round();
}

void Session::start_round() {
  ++round_;
  ctx_ = round_context(cfg_, round_);
  pending_utterance_.clear();
  if (cfg_.mode == Mode::kHumanListener) {
    const auto u = speaker_->describe(ctx_, cfg_.language);
    pending_utterance_ = u.raw_text;
    transcript_.push_back({round_, corpus::Role::kSpeaker, true, u.raw_text, std::nullopt});
    state_ = State::kAwaitingClick;
  } else {
    state_ = State::kAwaitingMessage;
  }
}

void Session::post_message(const std::string& text) {
  if (cfg_.mode != Mode::kHumanSpeaker) throw GameError("state_error", "messages are only accepted in HUMAN_SPEAKER mode");
  if (finished_) throw GameError("state_error", "the game is over");
  if (state_ != State::kAwaitingMessage) throw GameError("state_error", "not awaiting a message");
  corpus::Utterance u;
  try {
    u = corpus::make_utterance(text, cfg_.language);
  } catch (const DataError& e) {
    throw GameError("validation_error", "empty message");
  }
  transcript_.push_back({round_, corpus::Role::kSpeaker, false, text, std::nullopt});
  state_ = State::kAwaitingClick;
  const int t = eval::pragmatic_listener(*speaker_, u.tokens, ctx_.colors, cfg_.language).t_star;
  transcript_.push_back({round_, corpus::Role::kListener, true, std::nullopt, t});
  resolve(t, text);
}

void Session::click_target(int index) {
  if (cfg_.mode != Mode::kHumanListener) throw GameError("state_error", "clicks are only accepted in HUMAN_LISTENER mode");
  if (finished_) throw GameError("state_error", "the game is over");
  if (state_ != State::kAwaitingClick) throw GameError("state_error", "not awaiting a click");
  if (index < 0 || index > 2) throw GameError("validation_error", "click index must be 0, 1 or 2");
  transcript_.push_back({round_, corpus::Role::kListener, false, std::nullopt, index});
  resolve(index, pending_utterance_);
}

void Session::resolve(int clicked, std::string utterance) {
  state_ = State::kRoundDone;
  const bool ok = clicked == ctx_.target_index;
  ++total_;
  if (ok) ++correct_;
  history_.push_back({round_, ctx_, std::move(utterance), clicked, ok});
  if (round_ >= cfg_.rounds) {
    finished_ = true;
  } else {
    start_round();
  }
}

nlohmann::json to_json(const TranscriptEntry& e) {
  nlohmann::json j = {{"round", e.round},
                      {"role", corpus::to_string(e.role)},
                      {"actor", e.from_model ? "model" : "human"}};
  if (e.text) j["text"] = *e.text;
  if (e.click) j["click"] = *e.click;
  return j;
}

nlohmann::json Session::view() const {
  nlohmann::json ctx = {{"colors", colors_json(ctx_)}, {"condition", context::to_string(ctx_.condition)}};
  const bool reveal = cfg_.mode == Mode::kHumanSpeaker || state_ == State::kRoundDone;
  if (reveal) ctx["target_index"] = ctx_.target_index;

  nlohmann::json transcript = nlohmann::json::array();
  for (const auto& e : transcript_) transcript.push_back(to_json(e));

  nlohmann::json last = nullptr;
  if (!history_.empty()) {
    const auto& r = history_.back();
    last = {{"round", r.round},
            {"colors", colors_json(r.context)},
            {"condition", context::to_string(r.context.condition)},
            {"target_index", r.context.target_index},
            {"clicked_index", r.clicked_index},
            {"correct", r.correct},
            {"utterance", r.utterance}};
  }
  return {{"session_id", id_},
          {"mode", to_string(cfg_.mode)},
          {"language", corpus::to_string(cfg_.language)},
          {"policy", to_string(cfg_.policy)},
          {"seed", cfg_.seed},
          {"rounds", cfg_.rounds},
          {"round", round_},
          {"state", to_string(state_)},
          {"finished", finished_},
          {"score", {{"correct", correct_}, {"total", total_}}},
          {"context", ctx},
          {"transcript", transcript},
          {"last_round", last}};
}

corpus::GameRecord Session::record_of(const ResolvedRound& r) const {
  corpus::GameRecord rec;
  rec.game_id = id_;
  rec.round_index = r.round;
  rec.context = r.context;
  corpus::Utterance u;
  u.language = cfg_.language;
  u.raw_text = r.utterance;
  u.tokens = corpus::tokenize(r.utterance, cfg_.language);
  if (!u.tokens.empty()) rec.messages.push_back({corpus::Role::kSpeaker, std::move(u)});
  rec.clicked_index = r.clicked_index;
  return rec;
}

Session Session::replay(std::string id, SessionConfig cfg, std::shared_ptr<const speaker::Speaker> speaker,
                        const std::vector<TranscriptEntry>& transcript) {
  Session s(std::move(id), cfg, std::move(speaker));
  for (const auto& e : transcript) {
    if (e.from_model) continue;
    if (e.text) s.post_message(*e.text);
    if (e.click) s.click_target(*e.click);
  }
  return s;
}

SessionManager::SessionManager(std::shared_ptr<const speaker::Speaker> speaker,
                               std::optional<std::string> transcript_path, int default_rounds)
    : speaker_(std::move(speaker)),
      transcript_path_(std::move(transcript_path)),
      default_rounds_(default_rounds),
      id_salt_((static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}()) {}

nlohmann::json SessionManager::create(const SessionConfig& cfg) {
  if (!speaker_) throw GameError("no_checkpoint", "no speaker checkpoint is loaded");
  std::string id;
  {
    std::unique_lock lock(map_mutex_);
    Rng mix = Rng::derive({id_salt_, next_id_++});
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(mix.next()));
    id = buf;
  }
  auto entry = std::make_shared<Entry>(Session(id, cfg, speaker_));
  auto v = entry->session.view();
  std::unique_lock lock(map_mutex_);
  sessions_.emplace(id, std::move(entry));
  return v;
}

nlohmann::json SessionManager::create(const nlohmann::json& request) {
  if (!request.is_object()) throw GameError("bad_request", "request body must be a JSON object");
  SessionConfig cfg;
  cfg.rounds = default_rounds_;
  try {
    if (!request.contains("mode")) throw GameError("validation_error", "missing field 'mode'");
    cfg.mode = parse_mode(request.at("mode").get<std::string>());
    if (request.contains("language")) cfg.language = corpus::parse_language(request.at("language").get<std::string>());
    if (request.contains("seed") && !request.at("seed").is_null()) {
      cfg.seed = request.at("seed").get<std::uint64_t>();
    } else {
      std::unique_lock lock(map_mutex_);
      cfg.seed = Rng::derive({id_salt_, 0x5eedULL, next_id_}).next();
    }
    if (request.contains("policy")) cfg.policy = parse_condition_policy(request.at("policy").get<std::string>());
    if (request.contains("rounds")) cfg.rounds = request.at("rounds").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw GameError("validation_error", std::string("bad field type: ") + e.what());
  } catch (const DataError& e) {
    throw GameError("validation_error", e.what());
  }
  return create(cfg);
}

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(map_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw GameError("not_found", "unknown session '" + id + "'");
  return it->second;
}

nlohmann::json SessionManager::get(const std::string& id) const {
  auto e = find(id);
  std::lock_guard lock(e->mutex);
  return e->session.view();
}

nlohmann::json SessionManager::post_message(const std::string& id, const std::string& text) {
  auto e = find(id);
  std::lock_guard lock(e->mutex);
  e->session.post_message(text);
  persist(*e);
  return e->session.view();
}

nlohmann::json SessionManager::click(const std::string& id, int index) {
  auto e = find(id);
  std::lock_guard lock(e->mutex);
  e->session.click_target(index);
  persist(*e);
  return e->session.view();
}

std::size_t SessionManager::size() const {
  std::shared_lock lock(map_mutex_);
  return sessions_.size();
}

void SessionManager::persist(Entry& e) {
  const auto& hist = e.session.history();
  if (!transcript_path_ || e.persisted >= hist.size()) return;
  std::lock_guard lock(file_mutex_);
  std::ofstream out(*transcript_path_, std::ios::app | std::ios::binary);
  if (!out) throw DataError("cannot append to transcript file '" + *transcript_path_ + "'");
  for (; e.persisted < hist.size(); ++e.persisted) {
    out << corpus::record_to_json(e.session.record_of(hist[e.persisted])).dump() << '\n';
  }
}

}  // namespace colorref::game
