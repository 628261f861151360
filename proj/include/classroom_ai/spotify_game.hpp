#pragma once

// Session glue for the classroom recommender: sensors rate, the user states a
// mood, the decider recommends, the feedback student records yes/no.

#include <algorithm>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "classroom_ai/classroom_spotify.hpp"
#include "classroom_ai/game.hpp"
#include "classroom_ai/json_util.hpp"

namespace classroom_ai::spotify {

inline json rating_to_json(const RlidRating& r) { return json::array({r.rhythm, r.lyrics, r.instruments, r.danceability}); }

inline RlidRating rating_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw EngineError(ErrorCode::malformed_action, "rating must be [rhythm, lyrics, instruments, danceability]");
  }
  std::array<int, 4> c{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!j[i].is_number_integer()) throw EngineError(ErrorCode::malformed_action, "rating components must be integers");
    c[i] = j[i].get<int>();
  }
  return RlidRating::from_components(c);
}

/// Export of the feedback board: keyed by mood, each with `accepted` song ids
/// and `rejected` {song, reason} entries.
inline json board_to_json(const FeedbackBoard& board) {
  json j = json::object();
  for (const auto& [mood, f] : board.moods()) {
    json rejected = json::array();
    for (const auto& r : f.rejected) rejected.push_back({{"song", r.song}, {"reason", r.reason}});
    j[mood] = {{"accepted", f.accepted}, {"rejected", rejected}};
  }
  return j;
}

struct SpotifyGame {
  static constexpr GameKind kind = GameKind::classroom_spotify;

  struct Config {
    std::vector<SongProfile> songs;
    std::vector<MoodProfile> moods;

    const MoodProfile* mood(const std::string& name) const {
      auto it = std::find_if(moods.begin(), moods.end(), [&](const MoodProfile& m) { return m.name == name; });
      return it == moods.end() ? nullptr : &*it;
    }
  };

  struct Pending {
    std::string mood;
    std::string song;
    std::string user;

    bool operator==(const Pending&) const = default;
  };

  struct State {
    std::vector<SongProfile> catalog;
    FeedbackBoard board;
    std::optional<Pending> pending;
    int requests = 0;

    bool operator==(const State&) const = default;
  };

  static Config parse_config(const json& payload, ValidationReport& report) {
    Config config;
    ConfigReader root(payload, "payload", report);
    root.warn_unknown({"songs", "moods"});
    std::set<std::string> ids;
    if (const json* songs = root.array("songs")) {
      for (std::size_t i = 0; i < songs->size(); ++i) {
        ConfigReader r((*songs)[i], indexed(root.field("songs"), i), report);
        r.warn_unknown({"id", "title"});
        SongProfile s;
        s.id = r.string("id").value_or("");
        s.title = r.string("title", false).value_or(s.id);
        if (s.id.empty()) report.error(r.field("id"), "song id must be non-empty");
        if (!s.id.empty() && !ids.insert(s.id).second) report.error(r.field("id"), "duplicate song id '" + s.id + "'");
        config.songs.push_back(s);
      }
    }
    std::set<std::string> names;
    if (const json* moods = root.array("moods")) {
      for (std::size_t i = 0; i < moods->size(); ++i) {
        ConfigReader r((*moods)[i], indexed(root.field("moods"), i), report);
        r.warn_unknown({"name", "target"});
        MoodProfile m;
        m.name = r.string("name").value_or("");
        if (m.name.empty()) report.error(r.field("name"), "mood name must be non-empty");
        if (!m.name.empty() && !names.insert(m.name).second) report.error(r.field("name"), "duplicate mood '" + m.name + "'");
        if (const json* target = r.array("target")) {
          try {
            m.target = rating_from_json(*target);
            if (!m.target.valid()) report.error(r.field("target"), "target components must be in 1..3");
          } catch (const EngineError& e) {
            report.error(r.field("target"), e.detail());
          }
        }
        config.moods.push_back(m);
      }
    }
    return config;
  }

  static State initial_state(const Config& config) { return State{config.songs, {}, std::nullopt, 0}; }

  static bool teacher_only(std::string_view) { return false; }

  static SongProfile& find_song(State& state, const std::string& id) {
    auto it = std::find_if(state.catalog.begin(), state.catalog.end(), [&](const SongProfile& s) { return s.id == id; });
    if (it == state.catalog.end()) throw EngineError(ErrorCode::unknown_reference, "no song '" + id + "'");
    return *it;
  }

  static json apply(const Config& config, State& state, const std::string& actor, const json& action, SessionRng&) {
    const std::string type = action_fields::string(action, "type");
    if (type == "rate") {
      const auto id = action_fields::string(action, "song");
      const RlidRating rating = rating_from_json(action_fields::require(action, "rating"));
      SongProfile& song = find_song(state, id);
      song = rate_song(song, actor, rating);
      return {{"type", "rated"},
              {"song", id},
              {"sensor", actor},
              {"rating", rating_to_json(rating)},
              {"aggregate", rating_to_json(*song.rating)},
              {"score", neuron_score(*song.rating)}};
    }
    if (type == "request") {
      if (state.pending) {
        throw EngineError(ErrorCode::wrong_phase, "song " + state.pending->song + " still awaits feedback");
      }
      const auto name = action_fields::string(action, "mood");
      const MoodProfile* mood = config.mood(name);
      if (!mood) throw EngineError(ErrorCode::unknown_reference, "no mood '" + name + "'");
      ++state.requests;
      const auto pick = recommend(state.catalog, *mood, state.board);
      json out = {{"type", "recommendation"}, {"user", actor}, {"mood", name}};
      if (!pick) {
        out["song"] = nullptr;
        return out;
      }
      const SongProfile& song = find_song(state, *pick);
      state.pending = Pending{name, *pick, actor};
      out["song"] = *pick;
      out["title"] = song.title;
      out["score"] = neuron_score(*song.rating);
      out["distance"] = l1_distance(*song.rating, mood->target);
      return out;
    }
    if (type == "feedback") {
      const bool accepted = action_fields::boolean(action, "accepted");
      const auto reason = action_fields::optional_string(action, "reason");
      std::string mood, song;
      if (action.contains("song") || action.contains("mood")) {
        mood = action_fields::string(action, "mood");
        song = action_fields::string(action, "song");
        if (!config.mood(mood)) throw EngineError(ErrorCode::unknown_reference, "no mood '" + mood + "'");
        find_song(state, song);
      } else if (state.pending) {
        mood = state.pending->mood;
        song = state.pending->song;
      } else {
        throw EngineError(ErrorCode::wrong_phase, "no recommendation awaits feedback");
      }
      state.board.record(mood, song, accepted, reason);
      if (state.pending && state.pending->mood == mood && state.pending->song == song) state.pending.reset();
      json out = {{"type", "feedback"}, {"mood", mood}, {"song", song}, {"accepted", accepted}};
      if (!accepted) out["reason"] = *reason;
      return out;
    }
    throw EngineError(ErrorCode::illegal_action, "unknown action '" + type + "' for the classroom spotify game");
  }

  static json state_json(const Config& config, const State& state) {
    json songs = json::array();
    json scores = json::array();
    for (const auto& s : state.catalog) {
      json sensors = json::array();
      for (const auto& [actor, r] : s.sensor_ratings) sensors.push_back({{"sensor", actor}, {"rating", rating_to_json(r)}});
      songs.push_back({{"id", s.id},
                       {"title", s.title},
                       {"rating", s.rating ? rating_to_json(*s.rating) : json(nullptr)},
                       {"sensor_ratings", sensors}});
      if (s.rating) scores.push_back({{"song", s.id}, {"score", neuron_score(*s.rating)}});
    }
    json moods = json::array();
    for (const auto& m : config.moods) moods.push_back({{"name", m.name}, {"target", rating_to_json(m.target)}});
    json j = {{"songs", songs},
              {"score_board", scores},
              {"moods", moods},
              {"feedback_board", board_to_json(state.board)},
              {"requests", state.requests}};
    j["pending"] = state.pending ? json{{"mood", state.pending->mood}, {"song", state.pending->song}, {"user", state.pending->user}}
                                 : json(nullptr);
    return j;
  }

  static const HiddenKeys& hidden_keys() {
    static const HiddenKeys keys{{}, {"distance"}};
    return keys;
  }

  static std::string render_outcome(const json& outcome) {
    const auto type = outcome.value("type", "");
    std::ostringstream os;
    if (type == "rated") {
      os << outcome["sensor"].get<std::string>() << " rates " << outcome["song"].get<std::string>() << ' '
         << outcome["rating"].dump() << " -> aggregate " << outcome["aggregate"].dump() << ", score " << outcome["score"]
         << '\n';
    } else if (type == "recommendation") {
      if (outcome["song"].is_null()) {
        os << "no song left to suggest for mood " << outcome["mood"].get<std::string>() << '\n';
      } else {
        os << "suggest " << outcome["song"].get<std::string>() << " (score " << outcome["score"] << ") for mood "
           << outcome["mood"].get<std::string>() << '\n';
      }
    } else if (type == "feedback") {
      os << (outcome["accepted"].get<bool>() ? "YES" : "NO") << " for " << outcome["song"].get<std::string>() << " ("
         << outcome["mood"].get<std::string>() << ")";
      if (outcome.contains("reason")) os << ": " << outcome["reason"].get<std::string>();
      os << '\n';
    } else {
      os << outcome.dump() << '\n';
    }
    return os.str();
  }

  static void write_materials(const Config& config, std::ostream& os) {
    os << "Classroom spotify\n\nSong cards (" << config.songs.size() << "):\n";
    for (const auto& s : config.songs) os << "  " << s.id << "  " << s.title << '\n';
    os << "\nMood cards (" << config.moods.size() << "):\n";
    for (const auto& m : config.moods) os << "  " << m.name << "  target RLID " << rating_to_json(m.target).dump() << '\n';
    os << "\nRLID card deck: rhythm, lyrics, instruments, danceability, each rated 1, 2 or 3\n"
       << "Boards: scores, feedback (one column per mood), RLID classification\n";
  }
};

static_assert(Game<SpotifyGame>);

}  // namespace classroom_ai::spotify
