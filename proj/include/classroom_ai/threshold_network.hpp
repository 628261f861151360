#pragma once

// Feedforward binary-threshold network: neurons fire when the weighted sum of
// their firing predecessors reaches their threshold.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "classroom_ai/error.hpp"
#include "classroom_ai/validation.hpp"

namespace classroom_ai::cnn {

using NeuronId = std::string;

enum class NeuronKind { input, hidden, output };

constexpr std::string_view to_string(NeuronKind kind) {
  switch (kind) {
    case NeuronKind::input: return "input";
    case NeuronKind::hidden: return "hidden";
    case NeuronKind::output: return "output";
  }
  return "hidden";
}

struct Neuron {
  NeuronId id;
  int threshold = 0;  // ignored for input neurons
  NeuronKind kind = NeuronKind::hidden;

  bool operator==(const Neuron&) const = default;
};

struct Connection {
  NeuronId from;
  NeuronId to;
  int weight = 1;

  bool operator==(const Connection&) const = default;
};

/// External 0/1 signal per input neuron.
using Signals = std::map<NeuronId, int>;

class ThresholdNetwork {
 public:
  ThresholdNetwork() = default;
  ThresholdNetwork(std::vector<Neuron> neurons, std::vector<Connection> connections)
      : neurons_(std::move(neurons)), connections_(std::move(connections)) {}

  const std::vector<Neuron>& neurons() const { return neurons_; }
  const std::vector<Connection>& connections() const { return connections_; }

  std::optional<std::size_t> index_of(std::string_view id) const {
    for (std::size_t i = 0; i < neurons_.size(); ++i) {
      if (neurons_[i].id == id) return i;
    }
    return std::nullopt;
  }

  const Neuron* find(std::string_view id) const {
    auto idx = index_of(id);
    return idx ? &neurons_[*idx] : nullptr;
  }

  std::vector<NeuronId> ids_of_kind(NeuronKind kind) const {
    std::vector<NeuronId> out;
    for (const auto& n : neurons_) {
      if (n.kind == kind) out.push_back(n.id);
    }
    return out;
  }
  std::vector<NeuronId> inputs() const { return ids_of_kind(NeuronKind::input); }
  std::vector<NeuronId> outputs() const { return ids_of_kind(NeuronKind::output); }

  /// Connection indices sorted by (from, to) label; the order used for weight
  /// vectors in reweigh_search.
  std::vector<std::size_t> canonical_order() const {
    std::vector<std::size_t> order(connections_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& ca = connections_[a];
      const auto& cb = connections_[b];
      return std::tie(ca.from, ca.to) < std::tie(cb.from, cb.to);
    });
    return order;
  }

  /// Weights listed in canonical connection order.
  std::vector<int> canonical_weights() const {
    std::vector<int> w;
    for (auto i : canonical_order()) w.push_back(connections_[i].weight);
    return w;
  }

  /// Copy with weights replaced; `weights` is in canonical connection order.
  ThresholdNetwork with_canonical_weights(const std::vector<int>& weights) const {
    ThresholdNetwork copy = *this;
    const auto order = canonical_order();
    for (std::size_t k = 0; k < order.size(); ++k) copy.connections_[order[k]].weight = weights[k];
    return copy;
  }

  void set_weight(std::string_view from, std::string_view to, int weight) {
    for (auto& c : connections_) {
      if (c.from == from && c.to == to) {
        c.weight = weight;
        return;
      }
    }
    throw EngineError(ErrorCode::unknown_reference,
                      "no connection " + std::string(from) + " -> " + std::string(to));
  }

  /// Kahn's algorithm; among ready neurons the earliest declared goes first.
  /// Connections to unknown neurons are ignored here (validate_network reports
  /// them). Returns nullopt when the graph has a cycle.
  std::optional<std::vector<std::size_t>> topological_order() const {
    const std::size_t n = neurons_.size();
    std::vector<std::size_t> indegree(n, 0);
    std::vector<std::vector<std::size_t>> out(n);
    for (const auto& c : connections_) {
      auto f = index_of(c.from);
      auto t = index_of(c.to);
      if (!f || !t) continue;
      out[*f].push_back(*t);
      ++indegree[*t];
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i) {
      if (indegree[i] == 0) ready.push(i);
    }
    std::vector<std::size_t> order;
    while (!ready.empty()) {
      auto i = ready.top();
      ready.pop();
      order.push_back(i);
      for (auto j : out[i]) {
        if (--indegree[j] == 0) ready.push(j);
      }
    }
    if (order.size() != n) return std::nullopt;
    return order;
  }

  /// One directed cycle as a list of neuron ids (first id repeated at the
  /// end), or empty if the graph is acyclic.
  std::vector<NeuronId> find_cycle() const {
    const std::size_t n = neurons_.size();
    std::vector<std::vector<std::size_t>> out(n);
    for (const auto& c : connections_) {
      auto f = index_of(c.from);
      auto t = index_of(c.to);
      if (f && t) out[*f].push_back(*t);
    }
    enum class Mark { white, grey, black };
    std::vector<Mark> mark(n, Mark::white);
    std::vector<std::size_t> stack;
    std::vector<NeuronId> cycle;

    auto dfs = [&](auto&& self, std::size_t v) -> bool {
      mark[v] = Mark::grey;
      stack.push_back(v);
      for (auto w : out[v]) {
        if (mark[w] == Mark::grey) {
          auto it = std::find(stack.begin(), stack.end(), w);
          for (; it != stack.end(); ++it) cycle.push_back(neurons_[*it].id);
          cycle.push_back(neurons_[w].id);
          return true;
        }
        if (mark[w] == Mark::white && self(self, w)) return true;
      }
      stack.pop_back();
      mark[v] = Mark::black;
      return false;
    };
    for (std::size_t v = 0; v < n; ++v) {
      if (mark[v] == Mark::white && dfs(dfs, v)) break;
    }
    return cycle;
  }

  bool operator==(const ThresholdNetwork&) const = default;

 private:
  std::vector<Neuron> neurons_;
  std::vector<Connection> connections_;
};

struct NeuronActivation {
  int input_sum = 0;
  int bit = 0;

  bool operator==(const NeuronActivation&) const = default;
};

struct ActivationState {
  std::vector<NeuronId> order;  // topological
  std::map<NeuronId, NeuronActivation> neurons;

  int bit(const NeuronId& id) const { return neurons.at(id).bit; }
  int input_sum(const NeuronId& id) const { return neurons.at(id).input_sum; }

  bool operator==(const ActivationState&) const = default;
};

inline void check_signals(const ThresholdNetwork& network, const Signals& signals) {
  for (const auto& id : network.inputs()) {
    if (!signals.contains(id)) {
      throw EngineError(ErrorCode::missing_input_signal, "no signal for input neuron " + id);
    }
  }
  for (const auto& [id, bit] : signals) {
    const Neuron* n = network.find(id);
    if (n == nullptr || n->kind != NeuronKind::input) {
      throw EngineError(ErrorCode::unknown_input_signal, id + " is not an input neuron");
    }
    if (bit != 0 && bit != 1) {
      throw EngineError(ErrorCode::malformed_action, "signal for " + id + " must be 0 or 1");
    }
  }
}

/// Evaluates every neuron once in topological order. A hidden/output neuron
/// fires when its input sum reaches (>=) its threshold; input neurons copy
/// their external signal.
inline ActivationState propagate(const ThresholdNetwork& network, const Signals& signals) {
  for (const auto& c : network.connections()) {
    if (!network.find(c.from) || !network.find(c.to)) {
      throw EngineError(ErrorCode::unknown_reference, "connection " + c.from + " -> " + c.to +
                                                          " references an unknown neuron");
    }
  }
  auto order = network.topological_order();
  if (!order) throw EngineError(ErrorCode::cycle_detected, "network must be acyclic");
  check_signals(network, signals);

  std::vector<std::vector<const Connection*>> incoming(network.neurons().size());
  for (const auto& c : network.connections()) incoming[*network.index_of(c.to)].push_back(&c);

  ActivationState state;
  for (auto i : *order) {
    const Neuron& n = network.neurons()[i];
    NeuronActivation act;
    for (const Connection* c : incoming[i]) act.input_sum += state.neurons.at(c->from).bit * c->weight;
    if (n.kind == NeuronKind::input) {
      act.bit = signals.at(n.id);
    } else {
      act.bit = act.input_sum >= n.threshold ? 1 : 0;
    }
    state.order.push_back(n.id);
    state.neurons.emplace(n.id, act);
  }
  return state;
}

using Decision = std::map<NeuronId, int>;

inline Decision decide(const ThresholdNetwork& network, const Signals& signals) {
  const auto state = propagate(network, signals);
  Decision out;
  for (const auto& id : network.outputs()) out[id] = state.bit(id);
  return out;
}

/// Conjunction of output bits.
inline bool is_positive(const Decision& decision) {
  return !decision.empty() &&
         std::all_of(decision.begin(), decision.end(), [](const auto& kv) { return kv.second == 1; });
}

/// One line per neuron in topological order: `id sum threshold bit`.
inline std::string render_trace(const ThresholdNetwork& network, const ActivationState& state) {
  std::ostringstream os;
  for (const auto& id : state.order) {
    const auto& act = state.neurons.at(id);
    os << id << ' ' << act.input_sum << ' ' << network.find(id)->threshold << ' ' << act.bit << '\n';
  }
  return os.str();
}

/// Finds weights for all connections, drawn from `pool` with each element used
/// exactly once, under which decide() equals `desired`. Weights are returned in
/// canonical connection order (see ThresholdNetwork::canonical_order). When the
/// current weights already produce `desired` they are returned unchanged;
/// otherwise the lexicographically smallest satisfying weight vector is
/// returned, or nullopt if no arrangement of the pool works.
inline std::optional<std::vector<int>> reweigh_search(const ThresholdNetwork& network,
                                                      const Signals& signals, const Decision& desired,
                                                      std::vector<int> pool) {
  if (pool.size() != network.connections().size()) {
    throw EngineError(ErrorCode::pool_size_mismatch,
                      "pool has " + std::to_string(pool.size()) + " weights for " +
                          std::to_string(network.connections().size()) + " connections");
  }
  for (int w : pool) {
    if (w < 1) throw EngineError(ErrorCode::malformed_action, "pool weights must be positive integers");
  }
  const auto outputs = network.outputs();
  for (const auto& id : outputs) {
    if (!desired.contains(id)) {
      throw EngineError(ErrorCode::malformed_action, "desired output missing for " + id);
    }
  }
  for (const auto& [id, bit] : desired) {
    if (std::find(outputs.begin(), outputs.end(), id) == outputs.end()) {
      throw EngineError(ErrorCode::unknown_reference, id + " is not an output neuron");
    }
  }

  if (decide(network, signals) == desired) return network.canonical_weights();

  std::sort(pool.begin(), pool.end());
  do {
    if (decide(network.with_canonical_weights(pool), signals) == desired) return pool;
  } while (std::next_permutation(pool.begin(), pool.end()));
  return std::nullopt;
}

/// Structural checks: unknown endpoints, non-positive weights, duplicate
/// connections and neurons, cycles, missing input/output neurons, and output
/// neurons no input can reach.
inline ValidationReport validate_network(const ThresholdNetwork& network, const std::string& path = "network") {
  ValidationReport report;
  std::set<NeuronId> seen;
  for (std::size_t i = 0; i < network.neurons().size(); ++i) {
    const auto& n = network.neurons()[i];
    const std::string field = path + ".neurons[" + std::to_string(i) + "]";
    if (n.id.empty()) report.error(field, "neuron id must be non-empty");
    if (!seen.insert(n.id).second) report.error(field, "duplicate neuron id '" + n.id + "'");
    if (n.threshold < 0) report.error(field, "threshold must be a non-negative integer");
  }
  if (network.inputs().empty()) report.error(path + ".neurons", "network needs at least one input neuron");
  if (network.outputs().empty()) report.error(path + ".neurons", "network needs at least one output neuron");

  std::set<std::pair<NeuronId, NeuronId>> edges;
  bool dangling = false;
  for (std::size_t i = 0; i < network.connections().size(); ++i) {
    const auto& c = network.connections()[i];
    const std::string field = path + ".connections[" + std::to_string(i) + "]";
    if (c.weight < 1) report.error(field, "weight must be a positive integer");
    if (!edges.insert({c.from, c.to}).second) {
      report.error(field, "duplicate connection " + c.from + " -> " + c.to);
    }
    for (const auto* end : {&c.from, &c.to}) {
      if (!network.find(*end)) {
        report.error(field, "unknown neuron '" + *end + "'");
        dangling = true;
      }
    }
    if (const Neuron* target = network.find(c.to); target && target->kind == NeuronKind::input) {
      report.warning(field, "connection into input neuron " + c.to + " is ignored during propagation");
    }
  }

  auto cycle = network.find_cycle();
  if (!cycle.empty()) {
    std::string text;
    for (std::size_t i = 0; i < cycle.size(); ++i) text += (i ? " -> " : "") + cycle[i];
    report.error(path + ".connections", "network must be acyclic (cycle: " + text + ")");
  }

  if (!dangling) {
    std::set<NeuronId> reached;
    std::vector<NeuronId> frontier = network.inputs();
    for (const auto& id : frontier) reached.insert(id);
    while (!frontier.empty()) {
      auto id = frontier.back();
      frontier.pop_back();
      for (const auto& c : network.connections()) {
        if (c.from == id && reached.insert(c.to).second) frontier.push_back(c.to);
      }
    }
    for (const auto& id : network.outputs()) {
      if (!reached.contains(id)) {
        report.warning(path + ".neurons", "unreachable output: no path from any input to " + id);
      }
    }
  }
  return report;
}

/// The network from the worked classroom example: a red-shirt input R feeding
/// B and C, both feeding D, which feeds the single output E.
inline ThresholdNetwork classroom_example_network() {
  return ThresholdNetwork(
      {{"R", 0, NeuronKind::input},
       {"B", 2, NeuronKind::hidden},
       {"C", 2, NeuronKind::hidden},
       {"D", 2, NeuronKind::hidden},
       {"E", 3, NeuronKind::output}},
      {{"R", "B", 1}, {"R", "C", 2}, {"B", "D", 1}, {"C", "D", 1}, {"D", "E", 3}});
}

}  // namespace classroom_ai::cnn
