#pragma once

// Session glue for the little trainers. Group roles map onto phases:
// trainers add labeled cards (training), testers show a new card and the
// model answers (testing), the referee team says yes/no and supplies the true
// label (awaiting_feedback).

#include <algorithm>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "classroom_ai/game.hpp"
#include "classroom_ai/json_util.hpp"
#include "classroom_ai/little_trainers.hpp"

namespace classroom_ai::trainers {

enum class Phase { training, testing, awaiting_feedback };

constexpr std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::training: return "training";
    case Phase::testing: return "testing";
    case Phase::awaiting_feedback: return "awaiting_feedback";
  }
  return "training";
}

inline json card_to_json(const DataCard& card) { return {{"id", card.id}, {"features", card.features}}; }

inline json prediction_to_json(const Prediction& p) {
  json j = {{"label", p.label}, {"mismatch_count", p.mismatch_count}};
  j["runner_up"] = p.runner_up ? json{{"label", p.runner_up->first}, {"mismatch_count", p.runner_up->second}}
                               : json(nullptr);
  return j;
}

inline DataCard card_from_action(const json& j) {
  if (!j.is_object()) throw EngineError(ErrorCode::malformed_action, "card must be an object");
  DataCard card;
  card.id = action_fields::string(j, "id");
  for (const auto& [name, value] : action_fields::object(j, "features").items()) {
    if (!value.is_string()) throw EngineError(ErrorCode::malformed_action, "feature values must be strings");
    card.features[name] = value.get<std::string>();
  }
  return card;
}

struct TrainersGame {
  static constexpr GameKind kind = GameKind::little_trainers;

  struct Config {
    std::vector<std::string> features;
    TrainingSet examples;
    std::vector<Example> tests;
  };

  struct QueryRecord {
    DataCard card;
    Prediction prediction;
    std::optional<bool> correct;  // set by feedback
    std::optional<Label> true_label;

    bool operator==(const QueryRecord&) const = default;
  };

  struct State {
    TrainingSet set;
    Phase phase = Phase::training;
    std::vector<QueryRecord> queries;  // last one pending while awaiting_feedback

    bool operator==(const State&) const = default;
  };

  static std::optional<DataCard> parse_card(ConfigReader& r, const std::set<std::string>& declared) {
    auto& report = r.report();
    DataCard card;
    card.id = r.string("id").value_or("");
    if (card.id.empty()) report.error(r.field("id"), "card id must be non-empty");
    const json* feats = r.object("features");
    if (!feats) return std::nullopt;
    if (feats->empty()) report.error(r.field("features"), "a card needs at least one feature");
    for (const auto& [name, value] : feats->items()) {
      if (name.empty()) report.error(r.field("features"), "feature names must be non-empty");
      if (!value.is_string()) {
        report.error(r.field("features") + "." + name, "feature values must be strings");
        continue;
      }
      if (!declared.empty() && !declared.contains(name)) {
        report.warning(r.field("features") + "." + name, "feature not listed in payload.features");
      }
      card.features[name] = value.get<std::string>();
    }
    return card;
  }

  static std::vector<Example> parse_examples(ConfigReader& root, const char* key, bool required,
                                             const std::set<std::string>& declared) {
    std::vector<Example> out;
    const json* arr = root.array(key, required);
    if (!arr) return out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      ConfigReader r((*arr)[i], indexed(root.field(key), i), root.report());
      r.warn_unknown({"id", "features", "label"});
      auto card = parse_card(r, declared);
      auto label = r.string("label");
      if (label && label->empty()) root.report().error(r.field("label"), "label must be non-empty");
      if (card && label) out.push_back({*card, *label});
    }
    return out;
  }

  static Config parse_config(const json& payload, ValidationReport& report) {
    Config config;
    ConfigReader root(payload, "payload", report);
    root.warn_unknown({"features", "examples", "tests"});
    std::set<std::string> declared;
    if (const json* feats = root.array("features", false)) {
      for (const auto& f : *feats) {
        if (!f.is_string() || f.get<std::string>().empty()) {
          report.error(root.field("features"), "feature names must be non-empty strings");
          continue;
        }
        declared.insert(f.get<std::string>());
        config.features.push_back(f.get<std::string>());
      }
    }
    const auto examples = parse_examples(root, "examples", false, declared);
    for (std::size_t i = 0; i < examples.size(); ++i) {
      try {
        config.examples.add(examples[i].card, examples[i].label);
      } catch (const EngineError& e) {
        report.error(indexed(root.field("examples"), i), e.detail());
      }
    }
    config.tests = parse_examples(root, "tests", false, declared);
    return config;
  }

  static State initial_state(const Config& config) { return State{config.examples, Phase::training, {}}; }

  static bool teacher_only(std::string_view type) { return type == "set_phase" || type == "evaluate"; }

  static void require_phase(const State& state, Phase phase, std::string_view what) {
    if (state.phase != phase) {
      throw EngineError(ErrorCode::wrong_phase, std::string(what) + " is only possible in the " +
                                                    std::string(to_string(phase)) + " phase (now " +
                                                    std::string(to_string(state.phase)) + ")");
    }
  }

  static json apply(const Config& config, State& state, const std::string&, const json& action, SessionRng&) {
    const std::string type = action_fields::string(action, "type");
    if (type == "add_example") {
      require_phase(state, Phase::training, "adding examples");
      DataCard card = card_from_action(action_fields::require(action, "card"));
      const Label label = action_fields::string(action, "label");
      state.set.add(card, label);
      return {{"type", "example_added"}, {"card", card_to_json(card)}, {"label", label}, {"size", state.set.size()}};
    }
    if (type == "set_phase") {
      const auto target = action_fields::string(action, "phase");
      if (state.phase == Phase::awaiting_feedback) {
        throw EngineError(ErrorCode::wrong_phase, "the referee team has not answered the pending question yet");
      }
      if (target == "training") {
        state.phase = Phase::training;
      } else if (target == "testing") {
        state.phase = Phase::testing;
      } else {
        throw EngineError(ErrorCode::malformed_action, "phase must be training or testing");
      }
      return {{"type", "phase_changed"}, {"phase", target}};
    }
    if (type == "query") {
      require_phase(state, Phase::testing, "asking the model");
      DataCard card;
      if (auto test_id = action_fields::optional_string(action, "test")) {
        auto it = std::find_if(config.tests.begin(), config.tests.end(),
                               [&](const Example& e) { return e.card.id == *test_id; });
        if (it == config.tests.end()) throw EngineError(ErrorCode::unknown_reference, "no test card '" + *test_id + "'");
        card = it->card;
      } else {
        card = card_from_action(action_fields::require(action, "card"));
      }
      const Prediction p = predict(state.set, card);
      state.queries.push_back({card, p, std::nullopt, std::nullopt});
      state.phase = Phase::awaiting_feedback;
      return {{"type", "prediction"}, {"card", card_to_json(card)}, {"prediction", prediction_to_json(p)}};
    }
    if (type == "feedback") {
      require_phase(state, Phase::awaiting_feedback, "feedback");
      auto& q = state.queries.back();
      const auto verdict = action_fields::string(action, "verdict");
      json out = {{"type", "feedback"}, {"card", q.card.id}, {"predicted", q.prediction.label}};
      if (verdict == "yes") {
        q.correct = true;
        out["verdict"] = "yes";
      } else if (verdict == "no") {
        const Label truth = action_fields::string(action, "true_label");
        if (truth == q.prediction.label) {
          throw EngineError(ErrorCode::malformed_action, "a 'no' verdict needs a label different from the prediction");
        }
        state.set = trainers::feedback(state.set, q.card, truth);
        q.correct = false;
        q.true_label = truth;
        out["verdict"] = "no";
        out["true_label"] = truth;
        out["size"] = state.set.size();
      } else {
        throw EngineError(ErrorCode::malformed_action, "verdict must be yes or no");
      }
      state.phase = Phase::testing;
      return out;
    }
    if (type == "evaluate") {
      const Evaluation ev = evaluate(state.set, config.tests);
      json out = {{"type", "evaluation"},
                  {"correct", ev.correct},
                  {"total", ev.total},
                  {"accuracy", std::to_string(ev.accuracy.numerator()) + "/" + std::to_string(ev.accuracy.denominator())}};
      if (ev.vacuous) out["warning"] = "no test cards: accuracy is 1 by convention";
      return out;
    }
    throw EngineError(ErrorCode::illegal_action, "unknown action '" + type + "' for the little trainers game");
  }

  static json state_json(const Config&, const State& state) {
    json examples = json::array();
    for (const auto& e : state.set.examples()) {
      examples.push_back({{"id", e.card.id}, {"features", e.card.features}, {"label", e.label}});
    }
    json queries = json::array();
    for (const auto& q : state.queries) {
      json j = {{"card", card_to_json(q.card)}, {"prediction", prediction_to_json(q.prediction)}};
      j["correct"] = q.correct ? json(*q.correct) : json(nullptr);
      j["true_label"] = q.true_label ? json(*q.true_label) : json(nullptr);
      queries.push_back(j);
    }
    return {{"phase", to_string(state.phase)},
            {"examples", examples},
            {"labels", state.set.vocabulary()},
            {"queries", queries}};
  }

  static const HiddenKeys& hidden_keys() {
    static const HiddenKeys keys{{}, {"mismatch_count", "runner_up"}};
    return keys;
  }

  static std::string render_outcome(const json& outcome) {
    const auto type = outcome.value("type", "");
    std::ostringstream os;
    if (type == "example_added") {
      os << "example " << outcome["card"]["id"].get<std::string>() << " labeled " << outcome["label"].get<std::string>()
         << " (" << outcome["size"] << " examples)\n";
    } else if (type == "phase_changed") {
      os << "phase: " << outcome["phase"].get<std::string>() << '\n';
    } else if (type == "prediction") {
      os << "model says " << outcome["prediction"]["label"].get<std::string>() << " for "
         << outcome["card"]["id"].get<std::string>();
      if (outcome["prediction"].contains("mismatch_count")) {
        os << " (mismatches " << outcome["prediction"]["mismatch_count"] << ")";
      }
      os << '\n';
    } else if (type == "feedback") {
      os << "referee: " << outcome["verdict"].get<std::string>();
      if (outcome.contains("true_label")) os << ", true label " << outcome["true_label"].get<std::string>();
      os << '\n';
    } else if (type == "evaluation") {
      os << "accuracy " << outcome["accuracy"].get<std::string>() << " (" << outcome["correct"] << " of "
         << outcome["total"] << ")";
      if (outcome.contains("warning")) os << " warning: " << outcome["warning"].get<std::string>();
      os << '\n';
    } else {
      os << outcome.dump() << '\n';
    }
    return os.str();
  }

  static void write_materials(const Config& config, std::ostream& os) {
    os << "Little trainers\n\nData cards (" << config.examples.size() << "):\n";
    for (const auto& e : config.examples.examples()) {
      os << "  " << e.card.id << "  [" << e.label << "]";
      for (const auto& [k, v] : e.card.features) os << "  " << k << '=' << v;
      os << '\n';
    }
    os << "\nLabel cards:";
    for (const auto& l : config.examples.vocabulary()) os << ' ' << l;
    os << "\n\nQuestion cards (" << config.tests.size() << "):\n";
    for (const auto& t : config.tests) {
      os << "  " << t.card.id;
      for (const auto& [k, v] : t.card.features) os << "  " << k << '=' << v;
      os << '\n';
    }
    os << "\nFeedback cards: YES, NOT\n";
  }
};

static_assert(Game<TrainersGame>);

}  // namespace classroom_ai::trainers
