#pragma once

// Session glue for the classroom neural network: lesson payload, actions
// (show a card, change ropes, search for a corrective rope arrangement) and
// state rendering.

#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "classroom_ai/game.hpp"
#include "classroom_ai/json_util.hpp"
#include "classroom_ai/threshold_network.hpp"

namespace classroom_ai::cnn {

inline std::optional<NeuronKind> neuron_kind_from_string(std::string_view s) {
  for (auto k : {NeuronKind::input, NeuronKind::hidden, NeuronKind::output}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

inline json network_to_json(const ThresholdNetwork& network) {
  json neurons = json::array();
  for (const auto& n : network.neurons()) {
    neurons.push_back({{"id", n.id}, {"threshold", n.threshold}, {"kind", to_string(n.kind)}});
  }
  json connections = json::array();
  for (const auto& c : network.connections()) {
    connections.push_back({{"from", c.from}, {"to", c.to}, {"weight", c.weight}});
  }
  return {{"neurons", neurons}, {"connections", connections}};
}

inline Signals signals_from_json(const json& j) {
  if (!j.is_object()) throw EngineError(ErrorCode::malformed_action, "signals must be an object of id -> 0/1");
  Signals s;
  for (const auto& [id, v] : j.items()) {
    if (!v.is_number_integer()) throw EngineError(ErrorCode::malformed_action, "signal for " + id + " must be 0 or 1");
    s[id] = v.get<int>();
  }
  return s;
}

inline json activation_to_json(const ThresholdNetwork& network, const ActivationState& state) {
  json trace = json::array();
  for (const auto& id : state.order) {
    const auto& a = state.neurons.at(id);
    trace.push_back({{"id", id}, {"sum", a.input_sum}, {"threshold", network.find(id)->threshold}, {"bit", a.bit}});
  }
  json decision = json::object();
  for (const auto& id : network.outputs()) decision[id] = state.bit(id);
  Decision d;
  for (const auto& id : network.outputs()) d[id] = state.bit(id);
  return {{"trace", trace}, {"decision", decision}, {"verdict", is_positive(d) ? "positive" : "negative"}};
}

struct CnnGame {
  static constexpr GameKind kind = GameKind::cnn;

  struct Config {
    ThresholdNetwork network;
    std::optional<Signals> input_assignment;
  };

  struct State {
    ThresholdNetwork network;  // current ropes
    std::optional<Signals> last_signals;
    std::optional<ActivationState> activation;
    int cards_shown = 0;
    int rope_changes = 0;

    bool operator==(const State&) const = default;
  };

  static Config parse_config(const json& payload, ValidationReport& report) {
    Config config;
    ConfigReader root(payload, "payload", report);
    root.warn_unknown({"neurons", "connections", "input_assignment"});

    std::vector<Neuron> neurons;
    if (const json* arr = root.array("neurons")) {
      for (std::size_t i = 0; i < arr->size(); ++i) {
        ConfigReader r((*arr)[i], indexed(root.field("neurons"), i), report);
        r.warn_unknown({"id", "threshold", "kind"});
        Neuron n;
        n.id = r.string("id").value_or("");
        auto kind_text = r.string("kind");
        if (kind_text) {
          if (auto k = neuron_kind_from_string(*kind_text)) {
            n.kind = *k;
          } else {
            report.error(r.field("kind"), "kind must be one of input, hidden, output");
          }
        }
        n.threshold = static_cast<int>(r.integer("threshold", n.kind != NeuronKind::input).value_or(0));
        neurons.push_back(std::move(n));
      }
    }
    std::vector<Connection> connections;
    if (const json* arr = root.array("connections")) {
      for (std::size_t i = 0; i < arr->size(); ++i) {
        ConfigReader r((*arr)[i], indexed(root.field("connections"), i), report);
        r.warn_unknown({"from", "to", "weight"});
        Connection c;
        c.from = r.string("from").value_or("");
        c.to = r.string("to").value_or("");
        c.weight = static_cast<int>(r.integer("weight").value_or(1));
        connections.push_back(std::move(c));
      }
    }
    config.network = ThresholdNetwork(std::move(neurons), std::move(connections));
    report.merge(validate_network(config.network, "payload"));

    if (const json* assign = root.object("input_assignment", false)) {
      Signals s;
      for (const auto& [id, v] : assign->items()) {
        const std::string field = root.field("input_assignment") + "." + id;
        const Neuron* n = config.network.find(id);
        if (!n || n->kind != NeuronKind::input) report.error(field, id + " is not an input neuron");
        if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
          report.error(field, "signal must be 0 or 1");
          continue;
        }
        s[id] = v.get<int>();
      }
      config.input_assignment = s;
    }
    return config;
  }

  static State initial_state(const Config& config) { return State{config.network, {}, {}, 0, 0}; }

  static bool teacher_only(std::string_view type) { return type == "reweigh" || type == "set_weight"; }

  static json apply(const Config& config, State& state, const std::string&, const json& action, SessionRng&) {
    const std::string type = action_fields::string(action, "type");
    if (type == "show_card") {
      Signals signals;
      if (action.contains("signals")) {
        signals = signals_from_json(action.at("signals"));
      } else if (config.input_assignment) {
        signals = *config.input_assignment;
      }
      auto activation = propagate(state.network, signals);
      state.last_signals = signals;
      state.activation = activation;
      ++state.cards_shown;
      json out = activation_to_json(state.network, activation);
      out["type"] = "activation";
      return out;
    }
    if (type == "set_weight") {
      const auto weight = action_fields::integer(action, "weight");
      if (weight < 1) throw EngineError(ErrorCode::malformed_action, "rope weight must be a positive integer");
      const auto from = action_fields::string(action, "from");
      const auto to = action_fields::string(action, "to");
      state.network.set_weight(from, to, static_cast<int>(weight));
      state.activation.reset();
      ++state.rope_changes;
      return {{"type", "rope_changed"}, {"from", from}, {"to", to}, {"weight", weight}};
    }
    if (type == "reweigh") {
      Signals signals;
      if (action.contains("signals")) {
        signals = signals_from_json(action.at("signals"));
      } else if (state.last_signals) {
        signals = *state.last_signals;
      } else if (config.input_assignment) {
        signals = *config.input_assignment;
      }
      Decision desired;
      for (const auto& [id, v] : action_fields::object(action, "desired").items()) {
        if (!v.is_number_integer()) throw EngineError(ErrorCode::malformed_action, "desired bits must be 0 or 1");
        desired[id] = v.get<int>();
      }
      std::vector<int> pool;
      for (const auto& v : action_fields::array(action, "pool")) {
        if (!v.is_number_integer()) throw EngineError(ErrorCode::malformed_action, "pool must list integers");
        pool.push_back(v.get<int>());
      }
      auto found = reweigh_search(state.network, signals, desired, pool);
      json out = {{"type", "reweigh"}, {"found", found.has_value()}};
      if (found) {
        state.network = state.network.with_canonical_weights(*found);
        ++state.rope_changes;
        auto activation = propagate(state.network, signals);
        state.last_signals = signals;
        state.activation = activation;
        json weights = json::array();
        const auto order = state.network.canonical_order();
        for (auto i : order) {
          const auto& c = state.network.connections()[i];
          weights.push_back({{"from", c.from}, {"to", c.to}, {"weight", c.weight}});
        }
        out["weights"] = weights;
        out["activation"] = activation_to_json(state.network, activation);
      }
      return out;
    }
    throw EngineError(ErrorCode::illegal_action, "unknown action '" + type + "' for the neural network game");
  }

  static json state_json(const Config&, const State& state) {
    json j = {{"network", network_to_json(state.network)},
              {"cards_shown", state.cards_shown},
              {"rope_changes", state.rope_changes}};
    j["last_signals"] = state.last_signals ? json(*state.last_signals) : json(nullptr);
    j["activation"] = state.activation ? activation_to_json(state.network, *state.activation) : json(nullptr);
    return j;
  }

  static const HiddenKeys& hidden_keys() {
    static const HiddenKeys keys{{}, {}};
    return keys;
  }

  static std::string render_activation(const json& activation) {
    std::ostringstream os;
    for (const auto& t : activation.at("trace")) {
      os << t.at("id").get<std::string>() << ' ' << t.at("sum") << ' ' << t.at("threshold") << ' ' << t.at("bit")
         << '\n';
    }
    os << "decision: " << activation.at("verdict").get<std::string>() << '\n';
    return os.str();
  }

  static std::string render_outcome(const json& outcome) {
    const auto type = outcome.value("type", "");
    if (type == "activation") return render_activation(outcome);
    if (type == "rope_changed") {
      return "rope " + outcome.at("from").get<std::string>() + " -> " + outcome.at("to").get<std::string>() +
             " now weighs " + outcome.at("weight").dump() + "\n";
    }
    if (type == "reweigh") {
      if (!outcome.at("found").get<bool>()) return "reweigh: no arrangement of the pool gives the desired output\n";
      std::ostringstream os;
      os << "reweigh:";
      for (const auto& w : outcome.at("weights")) {
        os << ' ' << w.at("from").get<std::string>() << "->" << w.at("to").get<std::string>() << ':' << w.at("weight");
      }
      os << '\n' << render_activation(outcome.at("activation"));
      return os.str();
    }
    return outcome.dump() + "\n";
  }

  static void write_materials(const Config& config, std::ostream& os) {
    const auto& net = config.network;
    os << "Classroom neural network\n\nNeuron t-shirts (" << net.neurons().size() << "):\n";
    for (const auto& n : net.neurons()) {
      if (n.kind == NeuronKind::input) {
        os << "  " << n.id << "  input neuron, colored shirt (raises a hand when its card is shown)\n";
      } else {
        os << "  " << n.id << "  shirt number " << n.threshold << (n.kind == NeuronKind::output ? "  (final neuron)" : "")
           << '\n';
      }
    }
    os << "\nRopes (" << net.connections().size() << "):\n";
    for (const auto& c : net.connections()) {
      os << "  " << c.from << " -> " << c.to << "  weight " << c.weight << '\n';
    }
    os << "\nOther: 1 student as the user holding the input cards\n";
  }
};

static_assert(Game<CnnGame>);

}  // namespace classroom_ai::cnn
