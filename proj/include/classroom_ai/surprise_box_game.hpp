#pragma once

// Session glue for the surprise box: one player round at a time goes
// begin_round -> buy_card | skip_card -> open. The box holding the major prize
// is drawn from the prior when the round begins and stays hidden until the
// box is opened.

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "classroom_ai/game.hpp"
#include "classroom_ai/json_util.hpp"
#include "classroom_ai/surprise_box.hpp"

namespace classroom_ai::surprise_box {

inline json card_to_json(const InfoCard& card) {
  return {{"id", card.id},
          {"about_box", to_string(card.about_box)},
          {"cost", card.cost},
          {"prob_major", card.prob_major},
          {"difficulty", difficulty_phrase(card.prob_major)}};
}

inline json belief_json(const Belief& belief) {
  return {{"A", to_decimal(belief.major_in(Box::A))}, {"B", to_decimal(belief.major_in(Box::B))}};
}

/// Per-card analytics against a prior: the box to open after reading the
/// card, its expected points net of the card's cost, and the value of the
/// information.
struct CardAnalytics {
  InfoCard card;
  BestAction best;
  Rational voi;
};

inline CardAnalytics analyze_card(const InfoCard& card, const Belief& prior, const Prizes& prizes) {
  return {card, best_action(posterior(card), card.cost, prizes), value_of_information(card, prior, prizes)};
}

struct SurpriseBoxGame {
  static constexpr GameKind kind = GameKind::surprise_box;

  struct Config {
    Prizes prizes;
    Rational prior_major_in_a{1, 2};
    std::vector<InfoCard> cards_a;
    std::vector<InfoCard> cards_b;

    Belief prior() const { return Belief{prior_major_in_a}; }
  };

  struct State {
    std::vector<InfoCard> deck_a;
    std::vector<InfoCard> deck_b;
    std::vector<PlayerRound> rounds;  // the last one may be in progress
    std::vector<Box> major_boxes;     // hidden assignment, one per round
    std::map<std::string, int> ledger;

    const PlayerRound* open_round() const {
      if (rounds.empty() || rounds.back().phase == RoundPhase::revealed) return nullptr;
      return &rounds.back();
    }

    bool operator==(const State&) const = default;
  };

  static std::vector<InfoCard> parse_cards(ConfigReader& root, const char* key, Box box, std::set<std::string>& ids) {
    std::vector<InfoCard> out;
    const json* arr = root.array(key, false);
    if (!arr) return out;
    auto& report = root.report();
    for (std::size_t i = 0; i < arr->size(); ++i) {
      ConfigReader r((*arr)[i], indexed(root.field(key), i), report);
      r.warn_unknown({"id", "cost", "prob_major"});
      InfoCard card;
      card.about_box = box;
      card.id = r.string("id").value_or("");
      if (card.id.empty()) report.error(r.field("id"), "card id must be non-empty");
      if (!card.id.empty() && !ids.insert(card.id).second) report.error(r.field("id"), "duplicate card id '" + card.id + "'");
      auto cost = r.integer("cost");
      if (cost && *cost < 0) report.error(r.field("cost"), "cost must be a non-negative integer");
      card.cost = static_cast<int>(cost.value_or(0));
      auto prob = r.integer("prob_major");
      if (prob && (*prob < 0 || *prob > 100)) {
        report.error(r.field("prob_major"), "probability " + std::to_string(*prob) + "% is outside 0..100");
      }
      card.prob_major = static_cast<int>(prob.value_or(0));
      out.push_back(card);
    }
    return out;
  }

  static Config parse_config(const json& payload, ValidationReport& report) {
    Config config;
    ConfigReader root(payload, "payload", report);
    root.warn_unknown({"prizes", "prior_major_in_A", "cards_a", "cards_b"});
    if (const json* prizes = root.object("prizes", false)) {
      ConfigReader r(*prizes, root.field("prizes"), report);
      r.warn_unknown({"major", "minor"});
      config.prizes.major = static_cast<int>(r.integer("major").value_or(100));
      config.prizes.minor = static_cast<int>(r.integer("minor").value_or(30));
      if (config.prizes.minor < 1) report.error(r.field("minor"), "prize points must be positive");
      if (config.prizes.major <= config.prizes.minor) report.error(r.field("major"), "major prize must exceed the minor prize");
    }
    if (auto p = root.number("prior_major_in_A", false)) {
      if (*p < 0.0 || *p > 1.0) {
        report.error(root.field("prior_major_in_A"), "probability must be within 0..1");
      } else {
        config.prior_major_in_a = rational_from_probability(*p);
      }
    }
    std::set<std::string> ids;
    config.cards_a = parse_cards(root, "cards_a", Box::A, ids);
    config.cards_b = parse_cards(root, "cards_b", Box::B, ids);
    return config;
  }

  static State initial_state(const Config& config) {
    State s;
    s.deck_a = config.cards_a;
    s.deck_b = config.cards_b;
    return s;
  }

  static bool teacher_only(std::string_view) { return false; }

  static PlayerRound& players_round(State& state, const std::string& actor) {
    if (state.rounds.empty() || state.rounds.back().phase == RoundPhase::revealed) {
      throw EngineError(ErrorCode::wrong_phase, "no round in progress; begin a round first");
    }
    auto& round = state.rounds.back();
    if (round.player != actor) {
      throw EngineError(ErrorCode::illegal_action, "the current round belongs to " + round.player);
    }
    return round;
  }

  static json apply(const Config& config, State& state, const std::string& actor, const json& action, SessionRng& rng) {
    const std::string type = action_fields::string(action, "type");
    if (type == "begin_round") {
      if (state.open_round()) {
        throw EngineError(ErrorCode::wrong_phase, "round of " + state.rounds.back().player + " is still in progress");
      }
      if (actor == kTeacher) throw EngineError(ErrorCode::illegal_action, "the teacher does not play a round");
      const auto p = config.prior_major_in_a;
      const bool major_in_a = rng.bernoulli(static_cast<std::uint64_t>(p.numerator()),
                                            static_cast<std::uint64_t>(p.denominator()));
      state.major_boxes.push_back(major_in_a ? Box::A : Box::B);
      state.rounds.push_back(PlayerRound{actor, {}, {}, {}, RoundPhase::deciding_purchase});
      return {{"type", "round_started"}, {"player", actor}, {"round", state.rounds.size()}};
    }
    if (type == "buy_card" || type == "skip_card") {
      auto& round = players_round(state, actor);
      if (round.phase != RoundPhase::deciding_purchase) {
        throw EngineError(ErrorCode::wrong_phase, "the purchase decision for this round is already made");
      }
      if (type == "skip_card") {
        round.phase = RoundPhase::choosing_box;
        const auto best = best_action(config.prior(), 0, config.prizes);
        return {{"type", "card_skipped"},
                {"player", actor},
                {"analytics", {{"belief", belief_json(config.prior())},
                               {"best_box", to_string(best.box)},
                               {"expected_points", to_decimal(best.points)}}}};
      }
      const auto set = box_from_string(action_fields::string(action, "set"));
      if (!set) throw EngineError(ErrorCode::malformed_action, "set must be A or B");
      InfoCard card = draw_card(*set == Box::A ? state.deck_a : state.deck_b, rng);
      round.purchased_card = card;
      round.phase = RoundPhase::choosing_box;
      const auto best = best_action(posterior(card), card.cost, config.prizes);
      return {{"type", "card_bought"},
              {"player", actor},
              {"card", card_to_json(card)},
              {"analytics", {{"belief", belief_json(posterior(card))},
                             {"best_box", to_string(best.box)},
                             {"expected_points", to_decimal(best.points)},
                             {"voi", to_decimal(value_of_information(card, config.prior(), config.prizes))}}}};
    }
    if (type == "open") {
      if (state.rounds.empty()) throw EngineError(ErrorCode::wrong_phase, "no round in progress; begin a round first");
      auto& round = state.rounds.back();
      if (round.phase != RoundPhase::revealed && round.player != actor) {
        throw EngineError(ErrorCode::illegal_action, "the current round belongs to " + round.player);
      }
      const auto box = box_from_string(action_fields::string(action, "box"));
      if (!box) throw EngineError(ErrorCode::malformed_action, "box must be A or B");
      const Box major_box = state.major_boxes.back();
      round = resolve_open(major_box, round, *box, config.prizes);
      state.ledger[round.player] += *round.points_awarded;
      return {{"type", "revealed"},
              {"player", round.player},
              {"box", to_string(*box)},
              {"prize", config.prizes.of(*box == major_box)},
              {"card_cost", round.card_cost()},
              {"points", *round.points_awarded},
              {"total", state.ledger[round.player]},
              {"prize_locations", prize_locations(config, major_box)}};
    }
    throw EngineError(ErrorCode::illegal_action, "unknown action '" + type + "' for the surprise box game");
  }

  static json prize_locations(const Config& config, Box major_box) {
    return {{"A", config.prizes.of(major_box == Box::A)}, {"B", config.prizes.of(major_box == Box::B)}};
  }

  static json round_json(const Config& config, const PlayerRound& round, Box major_box) {
    json j = {{"player", round.player}, {"phase", to_string(round.phase)}};
    j["purchased_card"] = round.purchased_card ? card_to_json(*round.purchased_card) : json(nullptr);
    j["chosen_box"] = round.chosen_box ? json(to_string(*round.chosen_box)) : json(nullptr);
    j["points_awarded"] = round.points_awarded ? json(*round.points_awarded) : json(nullptr);
    if (round.phase == RoundPhase::revealed) {
      j["prize_locations"] = prize_locations(config, major_box);
    } else {
      j["hidden_assignment"] = to_string(major_box);
      const Belief belief = round.purchased_card ? posterior(*round.purchased_card) : config.prior();
      const auto best = best_action(belief, round.card_cost(), config.prizes);
      j["analytics"] = {{"belief", belief_json(belief)},
                        {"best_box", to_string(best.box)},
                        {"expected_points", to_decimal(best.points)}};
    }
    return j;
  }

  static json state_json(const Config& config, const State& state) {
    json deck_a = json::array(), deck_b = json::array();
    for (const auto& c : state.deck_a) deck_a.push_back(card_to_json(c));
    for (const auto& c : state.deck_b) deck_b.push_back(card_to_json(c));
    json rounds = json::array();
    for (std::size_t i = 0; i < state.rounds.size(); ++i) {
      rounds.push_back(round_json(config, state.rounds[i], state.major_boxes[i]));
    }
    json table = json::array();
    for (const auto* deck : {&config.cards_a, &config.cards_b}) {
      for (const auto& card : *deck) {
        const auto a = analyze_card(card, config.prior(), config.prizes);
        table.push_back({{"card", card.id},
                         {"best_box", to_string(a.best.box)},
                         {"expected_points", to_decimal(a.best.points)},
                         {"voi", to_decimal(a.voi)}});
      }
    }
    return {{"prizes", {{"major", config.prizes.major}, {"minor", config.prizes.minor}}},
            {"prior_major_in_A", to_decimal(config.prior_major_in_a)},
            {"cards_left", {{"A", state.deck_a.size()}, {"B", state.deck_b.size()}}},
            {"deck_a", deck_a},
            {"deck_b", deck_b},
            {"rounds", rounds},
            {"ledger", state.ledger},
            {"card_analytics", table}};
  }

  static const HiddenKeys& hidden_keys() {
    static const HiddenKeys keys{
        {"hidden_assignment"},
        {"prob_major", "analytics", "card_analytics", "prior_major_in_A", "deck_a", "deck_b", "belief",
         "expected_points", "best_box", "voi"}};
    return keys;
  }

  static std::string render_outcome(const json& outcome) {
    const auto type = outcome.value("type", "");
    std::ostringstream os;
    if (type == "round_started") {
      os << "round " << outcome.at("round") << " for " << outcome.at("player").get<std::string>() << '\n';
    } else if (type == "card_skipped") {
      os << "no card bought";
      if (outcome.contains("analytics")) {
        os << "; best box " << outcome["analytics"]["best_box"].get<std::string>() << " (expected "
           << outcome["analytics"]["expected_points"].get<std::string>() << ")";
      }
      os << '\n';
    } else if (type == "card_bought") {
      const auto& c = outcome.at("card");
      os << "card " << c.at("id").get<std::string>() << " about box " << c.at("about_box").get<std::string>()
         << ", cost " << c.at("cost");
      if (c.contains("prob_major")) {
        os << ", " << c.at("prob_major") << "% major";
      } else {
        os << ", " << c.at("difficulty").get<std::string>();
      }
      if (outcome.contains("analytics")) {
        os << "; best box " << outcome["analytics"]["best_box"].get<std::string>() << " (expected "
           << outcome["analytics"]["expected_points"].get<std::string>() << ")";
      }
      os << '\n';
    } else if (type == "revealed") {
      os << "opened box " << outcome.at("box").get<std::string>() << ": prize " << outcome.at("prize") << ", card cost "
         << outcome.at("card_cost") << ", points " << outcome.at("points") << " (total " << outcome.at("total") << ")\n";
    } else {
      os << outcome.dump() << '\n';
    }
    return os.str();
  }

  static void write_materials(const Config& config, std::ostream& os) {
    os << "Surprise box\n\nBoxes: A, B\nAward cards: " << config.prizes.major << " points, " << config.prizes.minor
       << " points\n";
    for (const auto* deck : {&config.cards_a, &config.cards_b}) {
      os << "\nInformation cards for box " << (deck == &config.cards_a ? "A" : "B") << " (" << deck->size() << "):\n";
      for (const auto& c : *deck) {
        os << "  " << c.id << "  cost " << c.cost << ", " << c.prob_major << "% chance of the " << config.prizes.major
           << "-point award (" << difficulty_phrase(c.prob_major) << ")\n";
      }
    }
    os << "\nOther: a paper sheet for the points record\n";
  }
};

static_assert(Game<SurpriseBoxGame>);

}  // namespace classroom_ai::surprise_box
