#pragma once

#include <concepts>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

#include "classroom_ai/rng.hpp"
#include "classroom_ai/validation.hpp"

namespace classroom_ai {

enum class GameKind { cnn, surprise_box, little_trainers, predictors, classroom_spotify };

constexpr std::string_view to_string(GameKind kind) {
  switch (kind) {
    case GameKind::cnn: return "cnn";
    case GameKind::surprise_box: return "surprise_box";
    case GameKind::little_trainers: return "little_trainers";
    case GameKind::predictors: return "predictors";
    case GameKind::classroom_spotify: return "classroom_spotify";
  }
  return "cnn";
}

inline std::optional<GameKind> game_kind_from_string(std::string_view s) {
  for (auto k : {GameKind::cnn, GameKind::surprise_box, GameKind::little_trainers, GameKind::predictors,
                 GameKind::classroom_spotify}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

enum class DisplayMode { teacher, student };

constexpr std::string_view to_string(DisplayMode mode) { return mode == DisplayMode::teacher ? "teacher" : "student"; }

/// Who is looking at a state or outcome. `system` sees everything, `teacher`
/// everything except hidden game facts, `student` additionally loses all
/// probabilities and analytics.
enum class View { system, teacher, student };

inline constexpr std::string_view kTeacher = "teacher";
inline constexpr std::string_view kSystem = "system";

/// Keys removed (at any depth) from state/outcome JSON for a view.
struct HiddenKeys {
  std::set<std::string> from_teacher;
  std::set<std::string> from_student;  // in addition to from_teacher
};

inline void strip_keys(nlohmann::json& j, const std::set<std::string>& keys) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end();) {
      if (keys.contains(it.key())) {
        it = j.erase(it);
      } else {
        strip_keys(it.value(), keys);
        ++it;
      }
    }
  } else if (j.is_array()) {
    for (auto& e : j) strip_keys(e, keys);
  }
}

inline nlohmann::json project(nlohmann::json j, View view, const HiddenKeys& hidden) {
  if (view == View::system) return j;
  strip_keys(j, hidden.from_teacher);
  if (view == View::student) strip_keys(j, hidden.from_student);
  return j;
}

/// Static interface every game module provides to the session engine.
/// Transitions mutate `state` in place; the session applies them to a copy and
/// commits only on success.
template <class G>
concept Game = requires(const nlohmann::json& j, ValidationReport& report, const typename G::Config& config,
                        typename G::State& state, const typename G::State& cstate, const std::string& actor,
                        SessionRng& rng, std::ostream& os, std::string_view type) {
  { G::kind } -> std::convertible_to<GameKind>;
  { G::parse_config(j, report) } -> std::same_as<typename G::Config>;
  { G::initial_state(config) } -> std::same_as<typename G::State>;
  { G::teacher_only(type) } -> std::same_as<bool>;
  { G::apply(config, state, actor, j, rng) } -> std::same_as<nlohmann::json>;
  { G::state_json(config, cstate) } -> std::same_as<nlohmann::json>;
  { G::hidden_keys() } -> std::same_as<const HiddenKeys&>;
  { G::render_outcome(j) } -> std::same_as<std::string>;
  G::write_materials(config, os);
};

}  // namespace classroom_ai
