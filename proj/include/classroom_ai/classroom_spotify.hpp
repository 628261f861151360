#pragma once

// Recommender: sensors rate songs on four 1..3 scales (rhythm, lyrics,
// instruments, danceability), neurons sum the scales into a score, and a
// per-mood feedback board steers later recommendations.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "classroom_ai/error.hpp"

namespace classroom_ai::spotify {

struct RlidRating {
  int rhythm = 1;
  int lyrics = 1;
  int instruments = 1;
  int danceability = 1;

  std::array<int, 4> components() const { return {rhythm, lyrics, instruments, danceability}; }
  static RlidRating from_components(const std::array<int, 4>& c) { return {c[0], c[1], c[2], c[3]}; }

  bool valid() const {
    const auto c = components();
    return std::all_of(c.begin(), c.end(), [](int v) { return v >= 1 && v <= 3; });
  }

  bool operator==(const RlidRating&) const = default;
};

inline void check_rating(const RlidRating& r) {
  if (!r.valid()) throw EngineError(ErrorCode::out_of_range_rating, "every RLID component must be in 1..3");
}

/// The score the neuron group writes on the board: R + L + I + D.
inline int neuron_score(const RlidRating& r) {
  check_rating(r);
  const auto c = r.components();
  return c[0] + c[1] + c[2] + c[3];
}

inline int l1_distance(const RlidRating& a, const RlidRating& b) {
  const auto x = a.components();
  const auto y = b.components();
  int d = 0;
  for (std::size_t i = 0; i < 4; ++i) d += std::abs(x[i] - y[i]);
  return d;
}

struct SongProfile {
  std::string id;
  std::string title;
  std::optional<RlidRating> rating;                          // aggregate; empty until rated
  std::vector<std::pair<std::string, RlidRating>> sensor_ratings;  // one per actor, in first-rating order

  bool operator==(const SongProfile&) const = default;
};

/// Per-component mean over sensors, rounded half-up.
inline RlidRating aggregate(const std::vector<std::pair<std::string, RlidRating>>& ratings) {
  std::array<int, 4> sum{};
  for (const auto& [actor, r] : ratings) {
    const auto c = r.components();
    for (std::size_t i = 0; i < 4; ++i) sum[i] += c[i];
  }
  const int n = static_cast<int>(ratings.size());
  std::array<int, 4> mean{};
  for (std::size_t i = 0; i < 4; ++i) mean[i] = (2 * sum[i] + n) / (2 * n);
  return RlidRating::from_components(mean);
}

/// Records (or replaces) one sensor's rating and recomputes the aggregate.
inline SongProfile rate_song(SongProfile song, const std::string& actor, const RlidRating& rating) {
  check_rating(rating);
  auto it = std::find_if(song.sensor_ratings.begin(), song.sensor_ratings.end(),
                         [&](const auto& entry) { return entry.first == actor; });
  if (it != song.sensor_ratings.end()) {
    it->second = rating;
  } else {
    song.sensor_ratings.emplace_back(actor, rating);
  }
  song.rating = aggregate(song.sensor_ratings);
  return song;
}

struct MoodProfile {
  std::string name;
  RlidRating target;

  bool operator==(const MoodProfile&) const = default;
};

struct Rejection {
  std::string song;
  std::string reason;

  bool operator==(const Rejection&) const = default;
};

struct MoodFeedback {
  std::vector<std::string> accepted;
  std::vector<Rejection> rejected;

  bool is_accepted(const std::string& song) const {
    return std::find(accepted.begin(), accepted.end(), song) != accepted.end();
  }
  bool is_rejected(const std::string& song) const {
    return std::any_of(rejected.begin(), rejected.end(), [&](const Rejection& r) { return r.song == song; });
  }

  bool operator==(const MoodFeedback&) const = default;
};

class FeedbackBoard {
 public:
  const std::map<std::string, MoodFeedback>& moods() const { return moods_; }

  const MoodFeedback* find(const std::string& mood) const {
    auto it = moods_.find(mood);
    return it == moods_.end() ? nullptr : &it->second;
  }
  bool is_rejected(const std::string& mood, const std::string& song) const {
    const auto* f = find(mood);
    return f && f->is_rejected(song);
  }
  bool is_accepted(const std::string& mood, const std::string& song) const {
    const auto* f = find(mood);
    return f && f->is_accepted(song);
  }
  std::size_t entry_count() const {
    std::size_t n = 0;
    for (const auto& [mood, f] : moods_) n += f.accepted.size() + f.rejected.size();
    return n;
  }

  void record(const std::string& mood, const std::string& song, bool accepted, const std::optional<std::string>& reason) {
    if (is_accepted(mood, song) || is_rejected(mood, song)) {
      throw EngineError(ErrorCode::duplicate_feedback, "feedback for song " + song + " and mood " + mood + " already recorded");
    }
    if (!accepted && (!reason || reason->empty())) {
      throw EngineError(ErrorCode::missing_rejection_reason, "a rejected song needs a reason");
    }
    auto& f = moods_[mood];
    if (accepted) {
      f.accepted.push_back(song);
    } else {
      f.rejected.push_back({song, *reason});
    }
  }

  bool operator==(const FeedbackBoard&) const = default;

 private:
  std::map<std::string, MoodFeedback> moods_;
};

inline FeedbackBoard record_feedback(FeedbackBoard board, const std::string& mood, const std::string& song,
                                     bool accepted, const std::optional<std::string>& reason = std::nullopt) {
  board.record(mood, song, accepted, reason);
  return board;
}

/// Ranking key; smaller is better.
inline std::tuple<int, int, int, std::string> recommendation_rank(const SongProfile& song, const MoodProfile& mood,
                                                                  const FeedbackBoard& board) {
  return {board.is_accepted(mood.name, song.id) ? 0 : 1, l1_distance(*song.rating, mood.target),
          -neuron_score(*song.rating), song.id};
}

/// Best rated song not rejected for this mood: previously accepted first, then
/// closest to the mood target (L1), then higher score, then smaller id.
inline std::optional<std::string> recommend(const std::vector<SongProfile>& catalog, const MoodProfile& mood,
                                            const FeedbackBoard& board) {
  const SongProfile* best = nullptr;
  for (const auto& song : catalog) {
    if (!song.rating || board.is_rejected(mood.name, song.id)) continue;
    if (!best || recommendation_rank(song, mood, board) < recommendation_rank(*best, mood, board)) best = &song;
  }
  if (!best) return std::nullopt;
  return best->id;
}

}  // namespace classroom_ai::spotify
