#include <random>

#include <gtest/gtest.h>

#include "classroom_ai/session.hpp"
#include "fuzz.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace classroom_ai;
using namespace classroom_ai::trainers;

namespace {

struct Animals {
  TrainingSet set;
  DataCard wolf;
};

Animals bundled_animals() {
  const auto config = fuzz::load_lesson("animals.lesson.json");
  ValidationReport report;
  const auto cfg = TrainersGame::parse_config(config.payload, report);
  EXPECT_TRUE(report.ok());
  return {cfg.examples, cfg.tests.at(0).card};
}

}  // namespace

TEST(Trainers, BundledDatasetShape) {
  const auto a = bundled_animals();
  int dogs = 0, cats = 0;
  for (const auto& e : a.set.examples()) (e.label == "DOG" ? dogs : cats)++;
  EXPECT_EQ(dogs, 3);
  EXPECT_EQ(cats, 3);
  EXPECT_EQ(a.wolf.id, "wolf");
}

TEST(Trainers, WolfIsDogUntilCorrected) {
  const auto a = bundled_animals();
  std::vector<std::pair<oracle::Features, std::string>> ex;
  for (const auto& e : a.set.examples()) ex.emplace_back(e.card.features, e.label);
  EXPECT_EQ(oracle::nearest_labels(ex, {a.wolf.features}).at(0), "DOG");

  EXPECT_EQ(predict(a.set, a.wolf).label, "DOG");
  const auto corrected = feedback(a.set, a.wolf, "WOLF");
  EXPECT_EQ(corrected.size(), 7u);
  EXPECT_EQ(predict(corrected, a.wolf).label, "WOLF");
  EXPECT_EQ(predict(corrected, a.wolf).mismatch_count, 0u);
}

TEST(Trainers, MatchesDistanceMatrixOracle) {
  std::mt19937_64 g(11);
  for (int i = 0; i < 500; ++i) {
    const auto c = gen::random_nn_case(g);
    const auto set = gen::to_training_set(c);
    const auto want = oracle::nearest_labels(c.examples, c.queries);
    for (std::size_t q = 0; q < c.queries.size(); ++q) {
      ASSERT_EQ(predict(set, {"q", c.queries[q]}).label, want[q]) << "case " << i;
    }
  }
}

TEST(Trainers, Errors) {
  try {
    predict(TrainingSet{}, {"q", {{"a", "b"}}});
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_training_set);
  }
  TrainingSet set;
  set.add({"c1", {{"a", "x"}}}, "L");
  try {
    set.add({"c1", {{"a", "y"}}}, "L");
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), ErrorCode::conflicting_card);
  }
}

TEST(Trainers, EvaluateVacuousAndExact) {
  TrainingSet set;
  set.add({"c1", {{"a", "x"}}}, "L");
  set.add({"c2", {{"a", "y"}}}, "M");
  const auto empty = evaluate(set, {});
  EXPECT_TRUE(empty.vacuous);
  EXPECT_EQ(empty.accuracy, Accuracy(1));
  const auto ev = evaluate(set, {{{"t1", {{"a", "x"}}}, "L"}, {{"t2", {{"a", "y"}}}, "L"}, {{"t3", {{"a", "y"}}}, "M"}});
  EXPECT_EQ(ev.correct, 2u);
  EXPECT_EQ(ev.accuracy, Accuracy(2, 3));
}

TEST(TrainersGame, PhaseMachineAndStudentView) {
  Session s = create_session(fuzz::load_lesson("animals.lesson.json"), "t");
  s.apply("teacher", {{"type", "start"}});
  EXPECT_THROW(s.apply("testers", {{"type", "query"}, {"test", "wolf"}}), EngineError);
  EXPECT_THROW(s.apply("s1", {{"type", "set_phase"}, {"phase", "testing"}}), EngineError);
  s.apply("teacher", {{"type", "set_phase"}, {"phase", "testing"}});
  const auto out = s.apply("testers", {{"type", "query"}, {"test", "wolf"}});
  EXPECT_EQ(out.data["prediction"]["label"], "DOG");
  EXPECT_FALSE(s.project_outcome(out.data, View::student)["prediction"].contains("mismatch_count"));
  EXPECT_THROW(s.apply("testers", {{"type", "query"}, {"test", "wolf"}}), EngineError);
  s.apply("referee", {{"type", "feedback"}, {"verdict", "no"}, {"true_label", "WOLF"}});
  EXPECT_EQ(s.apply("testers", {{"type", "query"}, {"test", "wolf"}}).data["prediction"]["label"], "WOLF");
}
