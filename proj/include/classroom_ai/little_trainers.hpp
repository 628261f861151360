#pragma once

// Supervised-learning loop: labeled data cards, a 1-nearest-neighbor
// classifier over categorical features, and additive feedback.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "classroom_ai/error.hpp"

namespace classroom_ai::trainers {

using Label = std::string;
using Features = std::map<std::string, std::string>;

struct DataCard {
  std::string id;
  Features features;

  bool operator==(const DataCard&) const = default;
};

struct Example {
  DataCard card;
  Label label;

  bool operator==(const Example&) const = default;
};

/// Count of feature names present on either card whose values differ or that
/// are missing on one side.
inline std::size_t mismatch_distance(const Features& a, const Features& b) {
  std::size_t d = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      ++d, ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      ++d, ++ib;
    } else {
      if (ia->second != ib->second) ++d;
      ++ia, ++ib;
    }
  }
  return d;
}

class TrainingSet {
 public:
  const std::vector<Example>& examples() const { return examples_; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }

  /// Labels in order of first appearance.
  std::vector<Label> vocabulary() const {
    std::vector<Label> out;
    for (const auto& e : examples_) {
      if (std::find(out.begin(), out.end(), e.label) == out.end()) out.push_back(e.label);
    }
    return out;
  }

  /// Rejects a card whose id is already present with different features, and
  /// cards without features.
  void add(DataCard card, Label label) {
    if (card.features.empty()) {
      throw EngineError(ErrorCode::malformed_action, "card " + card.id + " needs at least one feature");
    }
    for (const auto& [name, value] : card.features) {
      if (name.empty()) throw EngineError(ErrorCode::malformed_action, "feature names must be non-empty");
    }
    if (label.empty()) throw EngineError(ErrorCode::malformed_action, "label must be non-empty");
    for (const auto& e : examples_) {
      if (e.card.id == card.id && e.card.features != card.features) {
        throw EngineError(ErrorCode::conflicting_card,
                          "card id '" + card.id + "' already present with different features");
      }
    }
    examples_.push_back({std::move(card), std::move(label)});
  }

  bool operator==(const TrainingSet&) const = default;

 private:
  std::vector<Example> examples_;
};

inline TrainingSet add_example(TrainingSet set, DataCard card, Label label) {
  set.add(std::move(card), std::move(label));
  return set;
}

struct Prediction {
  Label label;
  std::size_t mismatch_count = 0;
  std::optional<std::pair<Label, std::size_t>> runner_up;  // nearest example with another label

  bool operator==(const Prediction&) const = default;
};

/// Nearest neighbor by mismatch distance. Among examples at the minimum
/// distance the label with the most such examples wins; a remaining tie goes
/// to the label whose first tied example was added earliest.
inline Prediction predict(const TrainingSet& set, const DataCard& query) {
  if (set.empty()) throw EngineError(ErrorCode::empty_training_set, "the model has no training examples yet");

  std::vector<std::size_t> dist;
  dist.reserve(set.size());
  for (const auto& e : set.examples()) dist.push_back(mismatch_distance(query.features, e.card.features));
  const std::size_t best = *std::min_element(dist.begin(), dist.end());

  struct Tally {
    std::size_t supporters = 0;
    std::size_t first_index = 0;
  };
  std::map<Label, Tally> tally;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] != best) continue;
    auto [it, inserted] = tally.try_emplace(set.examples()[i].label, Tally{0, i});
    ++it->second.supporters;
  }
  auto winner = std::min_element(tally.begin(), tally.end(), [](const auto& x, const auto& y) {
    if (x.second.supporters != y.second.supporters) return x.second.supporters > y.second.supporters;
    return x.second.first_index < y.second.first_index;
  });

  Prediction p{winner->first, best, std::nullopt};
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const auto& label = set.examples()[i].label;
    if (label == p.label) continue;
    if (!p.runner_up || dist[i] < p.runner_up->second) p.runner_up = std::make_pair(label, dist[i]);
  }
  return p;
}

/// Correction step: the query is appended with its true label.
inline TrainingSet feedback(TrainingSet set, DataCard query, Label true_label) {
  set.add(std::move(query), std::move(true_label));
  return set;
}

using Accuracy = boost::rational<std::int64_t>;

struct Evaluation {
  Accuracy accuracy{1};
  std::size_t correct = 0;
  std::size_t total = 0;
  bool vacuous = false;  // empty test list: accuracy is 1 by convention
};

inline Evaluation evaluate(const TrainingSet& set, const std::vector<Example>& tests) {
  if (set.empty()) throw EngineError(ErrorCode::empty_training_set, "the model has no training examples yet");
  Evaluation ev;
  ev.total = tests.size();
  if (tests.empty()) {
    ev.vacuous = true;
    return ev;
  }
  for (const auto& t : tests) {
    if (predict(set, t.card).label == t.label) ++ev.correct;
  }
  ev.accuracy = Accuracy(static_cast<std::int64_t>(ev.correct), static_cast<std::int64_t>(ev.total));
  return ev;
}

}  // namespace classroom_ai::trainers
