#pragma once

// Event-sourced session shared by all games. A session's game state is always
// the fold of its event log over the initial state derived from the lesson
// config; replay() recomputes it from scratch.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "classroom_ai/cnn_game.hpp"
#include "classroom_ai/game.hpp"
#include "classroom_ai/json_util.hpp"
#include "classroom_ai/predictors_game.hpp"
#include "classroom_ai/spotify_game.hpp"
#include "classroom_ai/surprise_box_game.hpp"
#include "classroom_ai/trainers_game.hpp"

namespace classroom_ai {

struct LessonConfig {
  GameKind game = GameKind::cnn;
  std::uint64_t seed = 0;
  DisplayMode display_mode = DisplayMode::teacher;
  json payload = json::object();

  json to_json() const {
    return {{"game", to_string(game)}, {"seed", seed}, {"display_mode", to_string(display_mode)}, {"payload", payload}};
  }
  bool operator==(const LessonConfig&) const = default;
};

class InvalidConfig : public EngineError {
 public:
  explicit InvalidConfig(ValidationReport report)
      : EngineError(ErrorCode::invalid_config, summary(report)), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  static std::string summary(const ValidationReport& r) {
    for (const auto& d : r.items()) {
      if (d.severity == Severity::error) return d.field + ": " + d.message;
    }
    return "lesson config is invalid";
  }
  ValidationReport report_;
};

namespace detail {

template <Game G>
struct GameSlot {
  using GameType = G;
  typename G::Config config;
  typename G::State state;
};

using AnyGame = std::variant<GameSlot<cnn::CnnGame>, GameSlot<surprise_box::SurpriseBoxGame>,
                             GameSlot<trainers::TrainersGame>, GameSlot<predictors::PredictorsGame>,
                             GameSlot<spotify::SpotifyGame>>;

/// Calls f.template operator()<G>() for the game type matching `kind`.
template <class F>
decltype(auto) with_game(GameKind kind, F&& f) {
  switch (kind) {
    case GameKind::cnn: return f.template operator()<cnn::CnnGame>();
    case GameKind::surprise_box: return f.template operator()<surprise_box::SurpriseBoxGame>();
    case GameKind::little_trainers: return f.template operator()<trainers::TrainersGame>();
    case GameKind::predictors: return f.template operator()<predictors::PredictorsGame>();
    case GameKind::classroom_spotify: return f.template operator()<spotify::SpotifyGame>();
  }
  return f.template operator()<cnn::CnnGame>();
}

}  // namespace detail

/// Static checks on a lesson document (`game`, `seed`, `display_mode`,
/// `payload`). An empty error list means create_session will succeed.
inline ValidationReport validate_config(const json& document) {
  ValidationReport report;
  ConfigReader root(document, "lesson", report);
  if (!root.valid()) return report;
  root.warn_unknown({"game", "seed", "display_mode", "payload"});

  std::optional<GameKind> kind;
  if (auto game = root.string("game")) {
    kind = game_kind_from_string(*game);
    if (!kind) {
      report.error(root.field("game"),
                   "unknown game '" + *game + "' (expected cnn, surprise_box, little_trainers, predictors or classroom_spotify)");
    }
  }
  if (const json* seed = root.get("seed", false); seed && !seed->is_number_unsigned()) {
    if (!(seed->is_number_integer() && seed->get<std::int64_t>() >= 0)) {
      report.error(root.field("seed"), "seed must be an unsigned 64-bit integer");
    }
  }
  if (auto mode = root.string("display_mode", false); mode && *mode != "teacher" && *mode != "student") {
    report.error(root.field("display_mode"), "display_mode must be teacher or student");
  }
  const json* payload = root.object("payload");
  if (kind && payload) {
    detail::with_game(*kind, [&]<Game G>() { (void)G::parse_config(*payload, report); });
  }
  return report;
}

inline ValidationReport validate_config(const LessonConfig& config) { return validate_config(config.to_json()); }

/// Parses and validates; throws InvalidConfig with per-field diagnostics.
inline LessonConfig parse_lesson_config(const json& document) {
  ValidationReport report = validate_config(document);
  if (!report.ok()) throw InvalidConfig(std::move(report));
  LessonConfig config;
  config.game = *game_kind_from_string(document.at("game").get<std::string>());
  config.seed = document.value("seed", std::uint64_t{0});
  config.display_mode = document.value("display_mode", std::string("teacher")) == "student" ? DisplayMode::student
                                                                                            : DisplayMode::teacher;
  config.payload = document.at("payload");
  return config;
}

/// UTC wall-clock time as RFC 3339 with milliseconds.
inline std::string now_rfc3339() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms << 'Z';
  return os.str();
}

struct SessionEvent {
  std::uint64_t seq = 0;
  std::string actor;
  json action;
  std::string recorded_at;  // informational only

  json to_json() const {
    json j = {{"seq", seq}, {"actor", actor}, {"action", action}};
    if (!recorded_at.empty()) j["recorded_at"] = recorded_at;
    return j;
  }

  static SessionEvent from_json(const json& j) {
    if (!j.is_object()) throw EngineError(ErrorCode::malformed_action, "event must be a JSON object");
    SessionEvent e;
    const json& seq = action_fields::require(j, "seq");
    if (!seq.is_number_unsigned() && !(seq.is_number_integer() && seq.get<std::int64_t>() >= 0)) {
      throw EngineError(ErrorCode::malformed_action, "seq must be a non-negative integer");
    }
    e.seq = seq.get<std::uint64_t>();
    e.actor = action_fields::string(j, "actor");
    e.action = action_fields::require(j, "action");
    e.recorded_at = j.value("recorded_at", std::string());
    return e;
  }

  /// Equality for replay purposes: timestamps are ignored.
  bool same_as(const SessionEvent& o) const { return seq == o.seq && actor == o.actor && action == o.action; }
};

inline void write_log_jsonl(std::ostream& os, const std::vector<SessionEvent>& events) {
  for (const auto& e : events) os << e.to_json().dump() << '\n';
}

inline std::vector<SessionEvent> read_log_jsonl(std::istream& is) {
  std::vector<SessionEvent> events;
  std::string line;
  std::size_t number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      events.push_back(SessionEvent::from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw EngineError(ErrorCode::malformed_action, "log line " + std::to_string(number) + ": " + e.what());
    } catch (const EngineError& e) {
      throw EngineError(e.code(), "log line " + std::to_string(number) + ": " + e.detail());
    }
  }
  return events;
}

enum class SessionStatus { setup, running, finished };

constexpr std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::setup: return "setup";
    case SessionStatus::running: return "running";
    case SessionStatus::finished: return "finished";
  }
  return "setup";
}

struct Outcome {
  json data;  // always has a "type"
};

/// Actor labels are free-form but must be non-empty printable tokens.
/// "teacher" is the orchestrator; "system" is reserved for the engine itself.
inline bool valid_actor(std::string_view actor) {
  if (actor.empty() || actor.size() > 64 || actor == kSystem) return false;
  return std::all_of(actor.begin(), actor.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' || c == ':';
  });
}

inline std::string generate_session_id() {
  static std::atomic<std::uint64_t> counter{0};
  std::random_device rd;
  std::ostringstream os;
  os << std::hex << std::setw(8) << std::setfill('0') << (rd() & 0xffffffffu) << '-' << std::dec << ++counter;
  return os.str();
}

class Session {
 public:
  const std::string& id() const { return id_; }
  const LessonConfig& config() const { return config_; }
  SessionStatus status() const { return status_; }
  const std::vector<SessionEvent>& log() const { return log_; }
  std::uint64_t next_seq() const { return log_.size(); }
  const SessionRng& rng() const { return rng_; }

  View default_view() const { return config_.display_mode == DisplayMode::student ? View::student : View::teacher; }

  /// Validates, applies and appends one event. On any error the session is
  /// left untouched.
  Outcome apply(const std::string& actor, const json& action, std::string recorded_at = now_rfc3339()) {
    if (!valid_actor(actor)) throw EngineError(ErrorCode::unknown_actor, "unknown actor '" + actor + "'");
    if (status_ == SessionStatus::finished) {
      throw EngineError(ErrorCode::illegal_action, "the session is finished; no further events are accepted");
    }
    if (!action.is_object() || !action.contains("type") || !action.at("type").is_string()) {
      throw EngineError(ErrorCode::malformed_action, "action must be an object with a string 'type'");
    }
    const std::string type = action.at("type").get<std::string>();
    Outcome outcome;
    if (type == "start" || type == "finish") {
      if (actor != kTeacher) throw EngineError(ErrorCode::illegal_action, "only the teacher may " + type + " the session");
      const auto from = type == "start" ? SessionStatus::setup : SessionStatus::running;
      if (status_ != from) {
        throw EngineError(ErrorCode::illegal_action,
                          "cannot " + type + " a session in status " + std::string(to_string(status_)));
      }
      status_ = type == "start" ? SessionStatus::running : SessionStatus::finished;
      outcome.data = {{"type", type == "start" ? "started" : "finished"}, {"status", to_string(status_)}};
    } else {
      if (status_ != SessionStatus::running) {
        throw EngineError(ErrorCode::illegal_action, "the teacher has not started the session yet");
      }
      outcome.data = std::visit(
          [&]<class Slot>(Slot& slot) -> json {
            using G = typename Slot::GameType;
            if (G::teacher_only(type) && actor != kTeacher) {
              throw EngineError(ErrorCode::illegal_action, "only the teacher may perform '" + type + "'");
            }
            auto state = slot.state;
            auto rng = rng_;
            json out = G::apply(slot.config, state, actor, action, rng);
            slot.state = std::move(state);
            rng_ = rng;
            return out;
          },
          game_);
    }
    log_.push_back(SessionEvent{log_.size(), actor, action, std::move(recorded_at)});
    return outcome;
  }

  /// {game, status, seq, display_mode, game_state}, plus rng_draws in the
  /// system view, projected for `view`.
  json state_json(View view = View::system) const {
    json game_state = std::visit(
        [&]<class Slot>(const Slot& slot) {
          using G = typename Slot::GameType;
          return G::state_json(slot.config, slot.state);
        },
        game_);
    json j = {{"game", to_string(config_.game)},
              {"status", to_string(status_)},
              {"seq", next_seq()},
              {"display_mode", to_string(config_.display_mode)},
              {"rng_draws", rng_.draws()},
              {"game_state", std::move(game_state)}};
    return project_state(std::move(j), view);
  }

  /// Projection of a system-view state_json() document.
  json project_state(json state, View view) const {
    if (view == View::system) return state;
    state.erase("rng_draws");
    if (state.contains("game_state")) state["game_state"] = project_outcome(state["game_state"], view);
    return state;
  }

  json project_outcome(const json& outcome, View view) const {
    return std::visit(
        [&]<class Slot>(const Slot&) {
          using G = typename Slot::GameType;
          return project(outcome, view, G::hidden_keys());
        },
        game_);
  }

  std::string render_outcome(const json& outcome) const {
    const auto type = outcome.value("type", "");
    if (type == "started" || type == "finished") return "session " + type + "\n";
    return std::visit(
        [&]<class Slot>(const Slot&) {
          using G = typename Slot::GameType;
          return G::render_outcome(outcome);
        },
        game_);
  }

  void write_materials(std::ostream& os) const {
    std::visit(
        [&]<class Slot>(const Slot& slot) {
          using G = typename Slot::GameType;
          G::write_materials(slot.config, os);
        },
        game_);
  }

  /// State equality: everything except the id and the event timestamps.
  bool same_state(const Session& other) const {
    if (!(config_ == other.config_) || status_ != other.status_ || !(rng_ == other.rng_)) return false;
    if (log_.size() != other.log_.size()) return false;
    for (std::size_t i = 0; i < log_.size(); ++i) {
      if (!log_[i].same_as(other.log_[i])) return false;
    }
    return state_json(View::system) == other.state_json(View::system);
  }

 private:
  friend Session create_session(const LessonConfig&, std::string);

  std::string id_;
  LessonConfig config_;
  detail::AnyGame game_;
  SessionRng rng_;
  SessionStatus status_ = SessionStatus::setup;
  std::vector<SessionEvent> log_;
};

inline Session create_session(const LessonConfig& config, std::string id = generate_session_id()) {
  ValidationReport report;
  Session s;
  s.id_ = std::move(id);
  s.config_ = config;
  s.rng_ = SessionRng(config.seed);
  s.game_ = detail::with_game(config.game, [&]<Game G>() -> detail::AnyGame {
    auto cfg = G::parse_config(config.payload, report);
    if (!report.ok()) throw InvalidConfig(report);
    auto state = G::initial_state(cfg);
    return detail::GameSlot<G>{std::move(cfg), std::move(state)};
  });
  return s;
}

inline std::pair<Session, Outcome> apply_event(Session session, const std::string& actor, const json& action,
                                               std::string recorded_at = now_rfc3339()) {
  Outcome out = session.apply(actor, action, std::move(recorded_at));
  return {std::move(session), std::move(out)};
}

/// Folds `events` over the initial session. Events must be numbered 0, 1, 2...
/// and each must be legal at its position.
inline Session replay(const LessonConfig& config, const std::vector<SessionEvent>& events,
                      std::string id = generate_session_id()) {
  Session s = create_session(config, std::move(id));
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (e.seq != i) {
      throw EngineError(ErrorCode::replay_divergence,
                        "expected seq " + std::to_string(i) + " but found " + std::to_string(e.seq));
    }
    try {
      s.apply(e.actor, e.action, e.recorded_at);
    } catch (const EngineError& err) {
      throw EngineError(ErrorCode::replay_divergence, "event " + std::to_string(i) + " rejected: " + err.what());
    }
  }
  return s;
}

}  // namespace classroom_ai
