#pragma once

// Session glue for the predictors: cards are revealed one at a time; students
// guess the next card before the teacher turns it over.

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "classroom_ai/game.hpp"
#include "classroom_ai/json_util.hpp"
#include "classroom_ai/predictors.hpp"

namespace classroom_ai::predictors {

struct PredictorsGame {
  static constexpr GameKind kind = GameKind::predictors;

  struct Config {
    PatternSpec spec;
    std::size_t reveal_up_to = 1;
  };

  struct Guess {
    std::string actor;
    Symbol symbol;

    bool operator==(const Guess&) const = default;
  };

  struct State {
    std::size_t revealed = 1;
    std::vector<Guess> pending;  // guesses for position `revealed`
    std::map<std::string, int> scores;
    std::vector<std::size_t> surprises;  // positions where the naive predictor was confidently wrong

    bool operator==(const State&) const = default;
  };

  static Config parse_config(const json& payload, ValidationReport& report) {
    Config config;
    ConfigReader root(payload, "payload", report);
    root.warn_unknown({"blocks", "plan", "reveal_up_to"});
    if (const json* blocks = root.array("blocks")) {
      for (std::size_t i = 0; i < blocks->size(); ++i) {
        const auto field = indexed(root.field("blocks"), i);
        const json& b = (*blocks)[i];
        Sequence block;
        if (!b.is_array() || b.empty()) {
          report.error(field, "a block must be a non-empty list of symbols");
        } else {
          for (const auto& t : b) {
            if (!t.is_string() || t.get<std::string>().empty()) {
              report.error(field, "symbols must be non-empty strings");
              continue;
            }
            block.push_back(t.get<std::string>());
          }
        }
        config.spec.blocks.push_back(block);
      }
    }
    if (const json* plan = root.array("plan")) {
      for (std::size_t i = 0; i < plan->size(); ++i) {
        ConfigReader r((*plan)[i], indexed(root.field("plan"), i), report);
        r.warn_unknown({"block", "repeat"});
        auto block = r.integer("block");
        auto repeat = r.integer("repeat");
        if (block && (*block < 0 || static_cast<std::size_t>(*block) >= config.spec.blocks.size())) {
          report.error(r.field("block"), "no block with index " + std::to_string(*block));
          continue;
        }
        if (repeat && *repeat < 1) report.error(r.field("repeat"), "repeat must be at least 1");
        if (block && repeat && *repeat >= 1) {
          config.spec.plan.push_back({static_cast<std::size_t>(*block), static_cast<std::size_t>(*repeat)});
        }
      }
      if (plan->empty()) report.error(root.field("plan"), "pattern expands to no symbols (empty plan)");
    }
    if (auto reveal = root.integer("reveal_up_to", false)) {
      if (*reveal < 1) {
        report.error(root.field("reveal_up_to"), "at least one card must be visible at the start");
      } else {
        config.reveal_up_to = static_cast<std::size_t>(*reveal);
      }
    }
    return config;
  }

  static State initial_state(const Config& config) { return State{config.reveal_up_to, {}, {}, {}}; }

  static bool teacher_only(std::string_view type) { return type == "reveal"; }

  static std::size_t cycle_length(const Config& config) { return config.spec.cycle().size(); }

  static json apply(const Config& config, State& state, const std::string& actor, const json& action, SessionRng&) {
    const std::string type = action_fields::string(action, "type");
    if (type == "guess") {
      if (actor == kTeacher) throw EngineError(ErrorCode::illegal_action, "the teacher does not guess");
      const Symbol symbol = action_fields::string(action, "symbol");
      if (symbol.empty()) throw EngineError(ErrorCode::malformed_action, "symbol must be non-empty");
      auto dup = std::find_if(state.pending.begin(), state.pending.end(), [&](const Guess& g) { return g.actor == actor; });
      if (dup != state.pending.end()) {
        throw EngineError(ErrorCode::illegal_action, actor + " already guessed position " + std::to_string(state.revealed));
      }
      state.pending.push_back({actor, symbol});
      return {{"type", "guess"}, {"actor", actor}, {"position", state.revealed}, {"symbol", symbol}};
    }
    if (type == "reveal") {
      const std::size_t k = state.revealed;
      const Sequence s = expand(config.spec, k + 1);
      const Sequence prefix(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k));
      const std::size_t period = minimal_period(prefix);
      const Symbol predicted = predict_next(prefix);
      const bool surprise = period < k && predicted != s[k];
      json guesses = json::array();
      for (const auto& g : state.pending) {
        const bool correct = g.symbol == s[k];
        if (correct) ++state.scores[g.actor];
        guesses.push_back({{"actor", g.actor}, {"symbol", g.symbol}, {"correct", correct}});
      }
      state.pending.clear();
      if (surprise) state.surprises.push_back(k);
      ++state.revealed;
      return {{"type", "revealed"},
              {"position", k},
              {"symbol", s[k]},
              {"guesses", guesses},
              {"predictor", {{"prediction", predicted}, {"period", period}, {"correct", predicted == s[k]}, {"surprise", surprise}}}};
    }
    throw EngineError(ErrorCode::illegal_action, "unknown action '" + type + "' for the predictors game");
  }

  static json state_json(const Config& config, const State& state) {
    const std::size_t cycle = cycle_length(config);
    const Sequence full = expand(config.spec, state.revealed + cycle);
    const Sequence shown(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(state.revealed));
    json pending = json::array();
    for (const auto& g : state.pending) pending.push_back({{"actor", g.actor}, {"symbol", g.symbol}});
    const auto first = surprise_point(config.spec, 2 * cycle + 1);
    return {{"revealed", shown},
            {"position", state.revealed},
            {"pending_guesses", pending},
            {"scores", state.scores},
            {"surprises", state.surprises},
            {"upcoming", Sequence(full.begin() + static_cast<std::ptrdiff_t>(state.revealed), full.end())},
            {"engine_prediction", {{"symbol", predict_next(shown)}, {"period", minimal_period(shown)}}},
            {"first_surprise", first ? json(*first) : json(nullptr)}};
  }

  static const HiddenKeys& hidden_keys() {
    static const HiddenKeys keys{{}, {"upcoming", "engine_prediction", "first_surprise"}};
    return keys;
  }

  static std::string render_outcome(const json& outcome) {
    const auto type = outcome.value("type", "");
    std::ostringstream os;
    if (type == "guess") {
      os << outcome["actor"].get<std::string>() << " guesses " << outcome["symbol"].get<std::string>()
         << " for card " << outcome["position"].get<std::size_t>() + 1 << '\n';
    } else if (type == "revealed") {
      os << "card " << outcome["position"].get<std::size_t>() + 1 << " is " << outcome["symbol"].get<std::string>();
      const auto& p = outcome["predictor"];
      os << "; pattern guess " << p["prediction"].get<std::string>() << (p["correct"].get<bool>() ? " (right)" : " (wrong)");
      if (p["surprise"].get<bool>()) os << " SURPRISE";
      os << '\n';
      for (const auto& g : outcome["guesses"]) {
        os << "  " << g["actor"].get<std::string>() << ": " << g["symbol"].get<std::string>()
           << (g["correct"].get<bool>() ? " right" : " wrong") << '\n';
      }
    } else {
      os << outcome.dump() << '\n';
    }
    return os.str();
  }

  static void write_materials(const Config& config, std::ostream& os) {
    const std::size_t length = 2 * cycle_length(config);
    const Sequence s = expand(config.spec, length);
    os << "Predictors\n\nSequence cards (" << length << "), pinned in order:\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
      os << "  " << (i + 1) << ". " << s[i] << (i < config.reveal_up_to ? "" : "  (face down)") << '\n';
    }
    if (auto k = surprise_point(config.spec, length + 1)) {
      os << "\nThe obvious pattern first breaks at card " << (*k + 1) << ".\n";
    }
  }
};

static_assert(Game<PredictorsGame>);

}  // namespace classroom_ai::predictors
