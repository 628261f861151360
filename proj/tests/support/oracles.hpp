#pragma once

// Reference implementations used only by tests. Each one is written from the
// rule statement, deliberately naive, and shares no code with the engine.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------- networks

struct Net {
  struct Node {
    std::string id;
    int threshold;
    bool input;
    bool output;
  };
  struct Edge {
    std::string from, to;
    int weight;
  };
  std::vector<Node> nodes;
  std::vector<Edge> edges;
};

/// bit(n) by direct recursion over predecessors; no ordering needed.
inline std::map<std::string, int> activations(const Net& net, const std::map<std::string, int>& signals,
                                              std::map<std::string, int>* sums = nullptr) {
  std::map<std::string, int> bit;
  std::function<int(const std::string&)> eval = [&](const std::string& id) -> int {
    if (auto it = bit.find(id); it != bit.end()) return it->second;
    const auto& node = *std::find_if(net.nodes.begin(), net.nodes.end(), [&](const auto& n) { return n.id == id; });
    int sum = 0;
    for (const auto& e : net.edges) {
      if (e.to == id) sum += e.weight * eval(e.from);
    }
    if (sums) (*sums)[id] = sum;
    const int b = node.input ? signals.at(id) : (sum >= node.threshold ? 1 : 0);
    bit[id] = b;
    return b;
  };
  for (const auto& n : net.nodes) eval(n.id);
  return bit;
}

inline std::map<std::string, int> output_bits(const Net& net, const std::map<std::string, int>& signals) {
  const auto bits = activations(net, signals);
  std::map<std::string, int> out;
  for (const auto& n : net.nodes) {
    if (n.output) out[n.id] = bits.at(n.id);
  }
  return out;
}

/// Every assignment of pool elements to edges (all n! index orders, duplicates
/// included). Weight vectors are listed with edges sorted by (from, to).
/// Returns the lexicographically smallest vector that yields `desired`.
inline std::optional<std::vector<int>> smallest_reweigh(const Net& net, const std::map<std::string, int>& signals,
                                                        const std::map<std::string, int>& desired,
                                                        const std::vector<int>& pool) {
  std::vector<std::size_t> edge_order(net.edges.size());
  std::iota(edge_order.begin(), edge_order.end(), 0);
  std::stable_sort(edge_order.begin(), edge_order.end(), [&](std::size_t a, std::size_t b) {
    if (net.edges[a].from != net.edges[b].from) return net.edges[a].from < net.edges[b].from;
    return net.edges[a].to < net.edges[b].to;
  });
  std::optional<std::vector<int>> best;
  std::vector<int> chosen;
  std::vector<bool> used(pool.size(), false);
  std::function<void()> rec = [&] {
    if (chosen.size() == pool.size()) {
      Net trial = net;
      for (std::size_t k = 0; k < chosen.size(); ++k) trial.edges[edge_order[k]].weight = chosen[k];
      if (output_bits(trial, signals) == desired && (!best || chosen < *best)) best = chosen;
      return;
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      chosen.push_back(pool[i]);
      rec();
      chosen.pop_back();
      used[i] = false;
    }
  };
  rec();
  return best;
}

// ------------------------------------------------------------ surprise box

/// Expected points, in hundredths, of opening `box` after reading a card
/// about `card_box` that gives `prob_major` percent. Enumerates the two
/// possible worlds explicitly.
inline std::int64_t ev_hundredths(char card_box, int prob_major, int cost, char box, int major = 100, int minor = 30) {
  std::int64_t total = 0;
  for (char world : {'A', 'B'}) {  // world = where the major prize really is
    const int weight = world == card_box ? prob_major : 100 - prob_major;
    const int prize = world == box ? major : minor;
    total += static_cast<std::int64_t>(weight) * (prize - cost);
  }
  return total;
}

struct CardValue {
  char best_box;
  std::int64_t ev_hundredths;
  std::int64_t voi_hundredths;
};

inline CardValue card_value(char card_box, int prob_major, int cost, int prior_a_percent = 50) {
  const auto a = ev_hundredths(card_box, prob_major, cost, 'A');
  const auto b = ev_hundredths(card_box, prob_major, cost, 'B');
  const auto base_a = ev_hundredths('A', prior_a_percent, 0, 'A');
  const auto base_b = ev_hundredths('A', prior_a_percent, 0, 'B');
  const auto base = std::max(base_a, base_b);
  const auto best = std::max(a, b);
  return {b > a ? 'B' : 'A', best, best - base};
}

// ---------------------------------------------------------------- trainers

using Features = std::map<std::string, std::string>;

inline int feature_distance(const Features& a, const Features& b) {
  std::set<std::string> keys;
  for (const auto& [k, v] : a) keys.insert(k);
  for (const auto& [k, v] : b) keys.insert(k);
  int d = 0;
  for (const auto& k : keys) {
    const bool in_a = a.count(k) > 0, in_b = b.count(k) > 0;
    if (!in_a || !in_b || a.at(k) != b.at(k)) ++d;
  }
  return d;
}

/// Full distance matrix rows[q][e], then for each query the label with most
/// examples at the minimum distance, earliest such example breaking ties.
inline std::vector<std::string> nearest_labels(const std::vector<std::pair<Features, std::string>>& examples,
                                               const std::vector<Features>& queries) {
  std::vector<std::vector<int>> matrix(queries.size(), std::vector<int>(examples.size()));
  for (std::size_t q = 0; q < queries.size(); ++q) {
    for (std::size_t e = 0; e < examples.size(); ++e) matrix[q][e] = feature_distance(queries[q], examples[e].first);
  }
  std::vector<std::string> out;
  for (const auto& row : matrix) {
    const int m = *std::min_element(row.begin(), row.end());
    std::string best;
    int best_count = -1;
    std::size_t best_first = 0;
    for (std::size_t e = 0; e < row.size(); ++e) {
      if (row[e] != m) continue;
      const auto& label = examples[e].second;
      int count = 0;
      std::size_t first = examples.size();
      for (std::size_t f = 0; f < row.size(); ++f) {
        if (row[f] == m && examples[f].second == label) {
          ++count;
          first = std::min(first, f);
        }
      }
      if (count > best_count || (count == best_count && first < best_first)) {
        best = label;
        best_count = count;
        best_first = first;
      }
    }
    out.push_back(best);
  }
  return out;
}

// -------------------------------------------------------------- predictors

/// Smallest p such that s[i] == s[i - p] for all i >= p.
inline std::size_t period_scan(const std::vector<std::string>& s) {
  for (std::size_t p = 1; p <= s.size(); ++p) {
    bool ok = true;
    for (std::size_t i = p; i < s.size() && ok; ++i) ok = s[i] == s[i - p];
    if (ok) return p;
  }
  return s.size();
}

// ----------------------------------------------------------------- spotify

struct Song {
  std::string id;
  std::array<int, 4> rating;
};

/// Sorts every eligible song by the documented ranking and takes the first.
inline std::optional<std::string> rerank(const std::vector<Song>& songs, const std::array<int, 4>& target,
                                         const std::set<std::string>& accepted, const std::set<std::string>& rejected) {
  std::vector<Song> pool;
  for (const auto& s : songs) {
    if (!rejected.count(s.id)) pool.push_back(s);
  }
  if (pool.empty()) return std::nullopt;
  auto key = [&](const Song& s) {
    int dist = 0, score = 0;
    for (int i = 0; i < 4; ++i) {
      dist += s.rating[i] > target[i] ? s.rating[i] - target[i] : target[i] - s.rating[i];
      score += s.rating[i];
    }
    return std::make_tuple(accepted.count(s.id) ? 0 : 1, dist, -score, s.id);
  };
  std::sort(pool.begin(), pool.end(), [&](const Song& a, const Song& b) { return key(a) < key(b); });
  return pool.front().id;
}

}  // namespace oracle
