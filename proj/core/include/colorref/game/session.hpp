#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "colorref/contextgen.hpp"
#include "colorref/corpus/records.hpp"
#include "colorref/error.hpp"
#include "colorref/speaker/speaker.hpp"

namespace colorref::game {

enum class Mode { kHumanSpeaker, kHumanListener };
enum class State { kAwaitingMessage, kAwaitingClick, kRoundDone };
enum class ConditionPolicy { kCycle, kRandom };

std::string to_string(Mode m);
std::string to_string(State s);
std::string to_string(ConditionPolicy p);
Mode parse_mode(const std::string& text);
ConditionPolicy parse_condition_policy(const std::string& text);

/// Error carrying an API error code: "not_found", "state_error",
/// "validation_error", "no_checkpoint" or "bad_request".
class GameError : public Error {
 public:
  GameError(std::string code, const std::string& detail) : Error(detail), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

struct SessionConfig {
  Mode mode = Mode::kHumanSpeaker;
  corpus::Language language = corpus::Language::kEnglish;
  ConditionPolicy policy = ConditionPolicy::kCycle;
  std::uint64_t seed = 0;
  int rounds = 50;
  double theta = context::kDefaultTheta;
};

struct TranscriptEntry {
  int round = 0;  // 1-based
  corpus::Role role = corpus::Role::kSpeaker;
  bool from_model = false;
  std::optional<std::string> text;
  std::optional<int> click;

  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

struct ResolvedRound {
  int round = 0;
  context::ReferenceContext context;
  std::string utterance;
  int clicked_index = 0;
  bool correct = false;
};

/// Context of round `round` (1-based) for a session configuration. Depends
/// only on (seed, policy, theta, round).
context::ReferenceContext round_context(const SessionConfig& cfg, int round);

/// One game. Not thread-safe by itself; SessionManager serializes access.
class Session {
 public:
  Session(std::string id, SessionConfig cfg, std::shared_ptr<const speaker::Speaker> speaker);

  const std::string& id() const noexcept { return id_; }
  const SessionConfig& config() const noexcept { return cfg_; }
  State state() const noexcept { return state_; }
  int round() const noexcept { return round_; }
  int correct() const noexcept { return correct_; }
  int total() const noexcept { return total_; }
  bool finished() const noexcept { return finished_; }
  const context::ReferenceContext& current_context() const noexcept { return ctx_; }
  const std::vector<TranscriptEntry>& transcript() const noexcept { return transcript_; }
  const std::vector<ResolvedRound>& history() const noexcept { return history_; }

  /// HUMAN_SPEAKER: the model listener clicks and the round resolves.
  void post_message(const std::string& text);
  /// HUMAN_LISTENER: resolves the round against the true target.
  void click_target(int index);

  /// Client view. The target index is omitted while a HUMAN_LISTENER round
  /// is unresolved.
  nlohmann::json view() const;

  /// Native-format record of a resolved round.
  corpus::GameRecord record_of(const ResolvedRound& r) const;

  /// Rebuilds a session by re-applying the human actions of `transcript`.
  static Session replay(std::string id, SessionConfig cfg, std::shared_ptr<const speaker::Speaker> speaker,
                        const std::vector<TranscriptEntry>& transcript);

 private:
  void start_round();
  void resolve(int clicked, std::string utterance);

  std::string id_;
  SessionConfig cfg_;
  std::shared_ptr<const speaker::Speaker> speaker_;
  State state_ = State::kAwaitingMessage;
  int round_ = 0;
  int correct_ = 0;
  int total_ = 0;
  bool finished_ = false;
  context::ReferenceContext ctx_;
  std::string pending_utterance_;
  std::vector<TranscriptEntry> transcript_;
  std::vector<ResolvedRound> history_;
};

nlohmann::json to_json(const TranscriptEntry& e);

/// Thread-safe registry of sessions sharing one read-only speaker. Optional
/// transcript persistence appends each resolved round to a JSONL file in the
/// native corpus format.
class SessionManager {
 public:
  explicit SessionManager(std::shared_ptr<const speaker::Speaker> speaker,
                          std::optional<std::string> transcript_path = std::nullopt, int default_rounds = 50);

  nlohmann::json create(const SessionConfig& cfg);
  /// Parses {mode, language, seed?, policy?, rounds?} and creates a session;
  /// an absent seed is drawn from the manager's random salt.
  nlohmann::json create(const nlohmann::json& request);
  nlohmann::json get(const std::string& id) const;
  nlohmann::json post_message(const std::string& id, const std::string& text);
  nlohmann::json click(const std::string& id, int index);

  std::size_t size() const;

 private:
  struct Entry {
    std::mutex mutex;
    Session session;
    std::size_t persisted = 0;
    explicit Entry(Session s) : session(std::move(s)) {}
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  void persist(Entry& e);

  std::shared_ptr<const speaker::Speaker> speaker_;
  std::optional<std::string> transcript_path_;
  int default_rounds_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_id_ = 1;
  std::uint64_t id_salt_;
  std::mutex file_mutex_;
};

}  // namespace colorref::game
