#include <functional>

#include <gtest/gtest.h>

#include "classroom_ai/session.hpp"
#include "fuzz.hpp"
#include "oracles.hpp"

using namespace classroom_ai;
using namespace classroom_ai::spotify;

TEST(Spotify, NeuronScore) {
  EXPECT_EQ(neuron_score({1, 1, 1, 1}), 4);
  EXPECT_EQ(neuron_score({3, 3, 3, 3}), 12);
  try {
    neuron_score({0, 1, 1, 1});
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), ErrorCode::out_of_range_rating);
  }
}

TEST(Spotify, AggregateRoundsHalfUp) {
  SongProfile s{"x", "x", std::nullopt, {}};
  s = rate_song(s, "a", {1, 1, 2, 3});
  s = rate_song(s, "b", {2, 1, 3, 3});
  EXPECT_EQ(*s.rating, (RlidRating{2, 1, 3, 3}));
  s = rate_song(s, "a", {1, 1, 1, 1});  // replaces a's earlier rating
  EXPECT_EQ(s.sensor_ratings.size(), 2u);
  EXPECT_EQ(*s.rating, (RlidRating{2, 1, 2, 2}));
}

TEST(Spotify, FeedbackBoardRules) {
  FeedbackBoard b;
  b = record_feedback(b, "sleepy", "s1", true);
  EXPECT_THROW(record_feedback(b, "sleepy", "s1", false, "nope"), EngineError);
  try {
    record_feedback(b, "sleepy", "s2", false);
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), ErrorCode::missing_rejection_reason);
  }
  b = record_feedback(b, "excited", "s1", false, "too slow");
  EXPECT_TRUE(b.is_accepted("sleepy", "s1"));
  EXPECT_TRUE(b.is_rejected("excited", "s1"));
}

TEST(Spotify, RecommendMatchesExhaustiveReranking) {
  const std::vector<std::array<int, 4>> ratings = {{1, 1, 1, 1}, {2, 1, 2, 1}, {3, 3, 3, 3}, {1, 2, 1, 1}};
  const std::vector<MoodProfile> moods = {{"sleepy", {1, 1, 1, 1}}, {"excited", {3, 3, 3, 3}}};
  int checked = 0;
  for (int n = 1; n <= 3; ++n) {
    std::vector<int> pick(static_cast<std::size_t>(n), 0);
    std::function<void(int)> rec = [&](int i) {
      if (i == n) {
        std::vector<SongProfile> catalog;
        std::vector<oracle::Song> songs;
        for (int k = 0; k < n; ++k) {
          const auto r = ratings[static_cast<std::size_t>(pick[static_cast<std::size_t>(k)])];
          const std::string id = "s" + std::to_string(k);
          catalog.push_back({id, id, RlidRating::from_components(r), {}});
          songs.push_back({id, r});
        }
        // every accepted/rejected/unknown marking of every song per mood
        int states = 1;
        for (int k = 0; k < n; ++k) states *= 3;
        for (int m = 0; m < states; ++m) {
          FeedbackBoard board;
          std::set<std::string> acc, rej;
          int code = m;
          for (int k = 0; k < n; ++k, code /= 3) {
            const std::string id = "s" + std::to_string(k);
            if (code % 3 == 1) board.record("sleepy", id, true, std::nullopt), acc.insert(id);
            if (code % 3 == 2) board.record("sleepy", id, false, "no"), rej.insert(id);
          }
          ASSERT_EQ(recommend(catalog, moods[0], board), oracle::rerank(songs, moods[0].target.components(), acc, rej));
          ++checked;
        }
        return;
      }
      for (std::size_t r = 0; r < ratings.size(); ++r) {
        pick[static_cast<std::size_t>(i)] = static_cast<int>(r);
        rec(i + 1);
      }
    };
    rec(0);
  }
  EXPECT_GT(checked, 100);
}

TEST(SpotifyGame, RejectedSongNotSuggestedAgain) {
  Session s = create_session(fuzz::load_lesson("spotify.lesson.json"), "t");
  s.apply("teacher", {{"type", "start"}});
  s.apply("sensor1", {{"type", "rate"}, {"song", "lullaby"}, {"rating", {1, 1, 1, 1}}});
  s.apply("sensor1", {{"type", "rate"}, {"song", "rain"}, {"rating", {1, 2, 1, 1}}});
  EXPECT_EQ(s.apply("user", {{"type", "request"}, {"mood", "sleepy"}}).data["song"], "lullaby");
  EXPECT_THROW(s.apply("user", {{"type", "request"}, {"mood", "sleepy"}}), EngineError);
  s.apply("fb", {{"type", "feedback"}, {"accepted", false}, {"reason", "too sad"}});
  EXPECT_EQ(s.apply("user", {{"type", "request"}, {"mood", "sleepy"}}).data["song"], "rain");
  s.apply("fb", {{"type", "feedback"}, {"accepted", false}, {"reason", "meh"}});
  EXPECT_TRUE(s.apply("user", {{"type", "request"}, {"mood", "sleepy"}}).data["song"].is_null());
  const auto board = s.state_json()["game_state"]["feedback_board"];
  EXPECT_EQ(board["sleepy"]["rejected"].size(), 2u);
  EXPECT_EQ(board["sleepy"]["rejected"][0]["reason"], "too sad");
}
