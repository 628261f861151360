#pragma once

// Two boxes, one major and one minor prize, and purchasable information cards
// that state the chance of the major prize being in a given box. All scoring
// uses exact rationals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "classroom_ai/error.hpp"
#include "classroom_ai/rng.hpp"

namespace classroom_ai::surprise_box {

using Rational = boost::rational<std::int64_t>;

enum class Box { A, B };

constexpr std::string_view to_string(Box box) { return box == Box::A ? "A" : "B"; }
constexpr Box other(Box box) { return box == Box::A ? Box::B : Box::A; }

inline std::optional<Box> box_from_string(std::string_view s) {
  if (s == "A" || s == "a") return Box::A;
  if (s == "B" || s == "b") return Box::B;
  return std::nullopt;
}

struct Prizes {
  int major = 100;
  int minor = 30;

  int of(bool is_major) const { return is_major ? major : minor; }
  bool operator==(const Prizes&) const = default;
};

struct InfoCard {
  std::string id;
  Box about_box = Box::A;
  int cost = 0;        // points deducted when bought
  int prob_major = 0;  // percent chance that about_box holds the major prize

  bool operator==(const InfoCard&) const = default;
};

/// Probability of the major prize per box; the two always sum to one.
struct Belief {
  Rational major_in_a{1, 2};

  Rational major_in(Box box) const { return box == Box::A ? major_in_a : Rational(1) - major_in_a; }
  bool operator==(const Belief&) const = default;
};

inline Belief belief_major_in(Box box, Rational p) {
  return Belief{box == Box::A ? p : Rational(1) - p};
}

inline Belief posterior(const InfoCard& card) {
  return belief_major_in(card.about_box, Rational(card.prob_major, 100));
}

inline Rational expected_points(const Belief& belief, Box box, Rational sunk_cost, const Prizes& prizes = {}) {
  const Rational p = belief.major_in(box);
  return p * prizes.major + (Rational(1) - p) * prizes.minor - sunk_cost;
}

struct BestAction {
  Box box = Box::A;
  Rational points;

  bool operator==(const BestAction&) const = default;
};

/// Ties go to box A.
inline BestAction best_action(const Belief& belief, Rational sunk_cost, const Prizes& prizes = {}) {
  const Rational a = expected_points(belief, Box::A, sunk_cost, prizes);
  const Rational b = expected_points(belief, Box::B, sunk_cost, prizes);
  return b > a ? BestAction{Box::B, b} : BestAction{Box::A, a};
}

/// Gain from buying `card` and then acting optimally, net of its cost,
/// relative to acting optimally on `prior` alone. May be negative.
inline Rational value_of_information(const InfoCard& card, const Belief& prior, const Prizes& prizes = {}) {
  return best_action(posterior(card), card.cost, prizes).points - best_action(prior, 0, prizes).points;
}

/// Exact decimal text when the denominator divides a power of ten
/// (always the case for percent inputs), otherwise "num/den".
inline std::string to_decimal(Rational value) {
  std::int64_t den = value.denominator();
  int twos = 0, fives = 0;
  while (den % 2 == 0) den /= 2, ++twos;
  while (den % 5 == 0) den /= 5, ++fives;
  if (den != 1) return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());

  const int digits = std::max(twos, fives);
  std::int64_t scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const std::int64_t scaled = value.numerator() * (scale / value.denominator());
  const bool negative = scaled < 0;
  const std::uint64_t mag = negative ? static_cast<std::uint64_t>(-scaled) : static_cast<std::uint64_t>(scaled);
  std::string whole = std::to_string(mag / static_cast<std::uint64_t>(scale));
  std::string out = negative ? "-" + whole : whole;
  if (digits > 0) {
    std::string frac = std::to_string(mag % static_cast<std::uint64_t>(scale));
    frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    if (!frac.empty()) out += "." + frac;
  }
  return out;
}

inline double to_double(Rational value) {
  return static_cast<double>(value.numerator()) / static_cast<double>(value.denominator());
}

/// Probabilities arrive as JSON numbers; they are snapped to a 1e-6 grid so
/// every later computation is exact.
inline Rational rational_from_probability(double p) {
  return Rational(static_cast<std::int64_t>(std::llround(p * 1'000'000.0)), 1'000'000);
}

/// Uniform draw without replacement: the card leaves `deck`.
inline InfoCard draw_card(std::vector<InfoCard>& deck, SessionRng& rng) {
  if (deck.empty()) throw EngineError(ErrorCode::empty_card_set, "no information cards left in this set");
  const auto idx = static_cast<std::size_t>(rng.uniform_index(deck.size()));
  InfoCard card = deck[idx];
  deck.erase(deck.begin() + static_cast<std::ptrdiff_t>(idx));
  return card;
}

/// Wording shown to students instead of a percentage: the chance of finding
/// the major prize read as how hard the box is.
inline std::string difficulty_phrase(int prob_major) {
  if (prob_major >= 75) return "very easy";
  if (prob_major >= 50) return "easy";
  if (prob_major >= 25) return "hard";
  return "very hard";
}

enum class RoundPhase { deciding_purchase, choosing_box, revealed };

constexpr std::string_view to_string(RoundPhase phase) {
  switch (phase) {
    case RoundPhase::deciding_purchase: return "deciding_purchase";
    case RoundPhase::choosing_box: return "choosing_box";
    case RoundPhase::revealed: return "revealed";
  }
  return "deciding_purchase";
}

struct PlayerRound {
  std::string player;
  std::optional<InfoCard> purchased_card;
  std::optional<Box> chosen_box;
  std::optional<int> points_awarded;
  RoundPhase phase = RoundPhase::deciding_purchase;

  int card_cost() const { return purchased_card ? purchased_card->cost : 0; }
  bool operator==(const PlayerRound&) const = default;
};

/// Opens `box`; `major_box` is the hidden assignment for this round.
inline PlayerRound resolve_open(Box major_box, PlayerRound round, Box box, const Prizes& prizes = {}) {
  if (round.phase != RoundPhase::choosing_box) {
    throw EngineError(ErrorCode::wrong_phase, "a box can only be opened while choosing (phase is " +
                                                  std::string(to_string(round.phase)) + ")");
  }
  round.chosen_box = box;
  round.points_awarded = prizes.of(box == major_box) - round.card_cost();
  round.phase = RoundPhase::revealed;
  return round;
}

struct MonteCarloStats {
  std::uint64_t rounds = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

/// Plays `rounds` rounds where the major prize sits in box A with
/// probability belief.major_in_a and the player opens the box that is best
/// under that same belief, paying `cost` up front. Running mean and variance
/// follow Welford.
inline MonteCarloStats simulate_rounds(const Belief& belief, int cost, std::uint64_t rounds, SessionRng& rng,
                                       const Prizes& prizes = {}) {
  MonteCarloStats stats;
  const Box choice = best_action(belief, cost, prizes).box;
  const auto p = belief.major_in_a;
  double m2 = 0.0;
  for (std::uint64_t i = 0; i < rounds; ++i) {
    const Box major = rng.bernoulli(static_cast<std::uint64_t>(p.numerator()), static_cast<std::uint64_t>(p.denominator()))
                          ? Box::A
                          : Box::B;
    const double x = prizes.of(choice == major) - cost;
    ++stats.rounds;
    const double delta = x - stats.mean;
    stats.mean += delta / static_cast<double>(stats.rounds);
    m2 += delta * (x - stats.mean);
  }
  if (stats.rounds > 1) {
    stats.std_error = std::sqrt(m2 / static_cast<double>(stats.rounds - 1) / static_cast<double>(stats.rounds));
  }
  return stats;
}

/// The two card sets of the classroom example, one per box.
inline std::vector<InfoCard> classroom_cards_a() {
  return {{"A", Box::A, 20, 10}, {"B", Box::A, 30, 20}, {"C", Box::A, 5, 5}, {"D", Box::A, 85, 40}};
}
inline std::vector<InfoCard> classroom_cards_b() {
  return {{"E", Box::B, 10, 50}, {"F", Box::B, 10, 10}, {"G", Box::B, 20, 30}, {"H", Box::B, 5, 5}};
}

}  // namespace classroom_ai::surprise_box
