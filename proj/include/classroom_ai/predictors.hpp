#pragma once

// Pattern game: minimal-period hypothesis over an observed prefix, and
// teacher-designed sequences built from repeated symbol blocks.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "classroom_ai/error.hpp"

namespace classroom_ai::predictors {

using Symbol = std::string;
using Sequence = std::vector<Symbol>;

/// Smallest p >= 1 with s[i] == s[i - p] for all i >= p. Computed from the
/// longest proper border (prefix function); equals s.size() when aperiodic.
inline std::size_t minimal_period(const Sequence& s) {
  if (s.empty()) throw EngineError(ErrorCode::malformed_action, "prefix must contain at least one symbol");
  std::vector<std::size_t> border(s.size(), 0);
  for (std::size_t i = 1; i < s.size(); ++i) {
    std::size_t k = border[i - 1];
    while (k > 0 && s[i] != s[k]) k = border[k - 1];
    if (s[i] == s[k]) ++k;
    border[i] = k;
  }
  return s.size() - border.back();
}

/// Continuation under the minimal-period hypothesis.
inline Symbol predict_next(const Sequence& s) { return s[s.size() - minimal_period(s)]; }

struct PlanStep {
  std::size_t block = 0;
  std::size_t repeat = 1;

  bool operator==(const PlanStep&) const = default;
};

/// One cycle is the concatenation of blocks[step.block] x step.repeat over the
/// plan; the full sequence repeats that cycle forever.
struct PatternSpec {
  std::vector<Sequence> blocks;
  std::vector<PlanStep> plan;

  Sequence cycle() const {
    Sequence out;
    for (const auto& step : plan) {
      if (step.block >= blocks.size()) {
        throw EngineError(ErrorCode::unknown_reference, "plan refers to missing block " + std::to_string(step.block));
      }
      for (std::size_t r = 0; r < step.repeat; ++r) out.insert(out.end(), blocks[step.block].begin(), blocks[step.block].end());
    }
    return out;
  }

  bool operator==(const PatternSpec&) const = default;
};

inline Sequence expand(const PatternSpec& spec, std::size_t length) {
  const Sequence cycle = spec.cycle();
  if (cycle.empty()) throw EngineError(ErrorCode::empty_spec, "pattern expands to no symbols");
  Sequence out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) out.push_back(cycle[i % cycle.size()]);
  return out;
}

/// First prefix length k < horizon at which the minimal-period predictor is
/// confidently wrong: the prefix already repeats its hypothesised period
/// (period < k) yet the predicted symbol differs from the true s[k].
/// Aperiodic prefixes make no claim and are never counted.
inline std::optional<std::size_t> surprise_point(const PatternSpec& spec, std::size_t horizon) {
  if (horizon < 2) throw EngineError(ErrorCode::malformed_action, "horizon must be at least 2");
  const Sequence s = expand(spec, horizon);
  for (std::size_t k = 1; k < horizon; ++k) {
    const Sequence prefix(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k));
    const std::size_t p = minimal_period(prefix);
    if (p < k && prefix[k - p] != s[k]) return k;
  }
  return std::nullopt;
}

/// The classroom sequence: (@ smiley $) twice, then (1 2 3), repeated.
inline PatternSpec classroom_example_spec() {
  return PatternSpec{{{"@", "smiley", "$"}, {"1", "2", "3"}}, {{0, 2}, {1, 1}}};
}

}  // namespace classroom_ai::predictors
