#include <random>

#include <gtest/gtest.h>

#include "classroom_ai/cnn_game.hpp"
#include "classroom_ai/threshold_network.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace classroom_ai;
using namespace classroom_ai::cnn;

namespace {

ThresholdNetwork with_pool(const ThresholdNetwork& net, const std::vector<int>& w) { return net.with_canonical_weights(w); }

}  // namespace

TEST(ThresholdNetwork, RedCardTraceMatchesHandWorkedValues) {
  const auto net = classroom_example_network();
  const auto state = propagate(net, {{"R", 1}});
  EXPECT_EQ(state.input_sum("B"), 1);
  EXPECT_EQ(state.input_sum("C"), 2);
  EXPECT_EQ(state.input_sum("D"), 1);
  EXPECT_EQ(state.input_sum("E"), 0);
  EXPECT_EQ(state.bit("R"), 1);
  EXPECT_EQ(state.bit("B"), 0);
  EXPECT_EQ(state.bit("C"), 1);
  EXPECT_EQ(state.bit("D"), 0);
  EXPECT_EQ(state.bit("E"), 0);
  EXPECT_FALSE(is_positive(decide(net, {{"R", 1}})));
  EXPECT_EQ(render_trace(net, state), "R 0 0 1\nB 1 2 0\nC 2 2 1\nD 1 2 0\nE 0 3 0\n");
}

TEST(ThresholdNetwork, FiresAtEqualityOnly) {
  ThresholdNetwork net({{"I", 0, NeuronKind::input}, {"O", 2, NeuronKind::output}}, {{"I", "O", 2}});
  EXPECT_EQ(decide(net, {{"I", 1}}).at("O"), 1);
  net.set_weight("I", "O", 1);
  EXPECT_EQ(decide(net, {{"I", 1}}).at("O"), 0);
}

TEST(ThresholdNetwork, ZeroInputGivesAllZeroForPositiveThresholds) {
  const auto state = propagate(classroom_example_network(), {{"R", 0}});
  for (const auto& [id, act] : state.neurons) EXPECT_EQ(act.bit, 0) << id;
}

TEST(ThresholdNetwork, SignalErrors) {
  const auto net = classroom_example_network();
  try {
    propagate(net, {});
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), ErrorCode::missing_input_signal);
  }
  try {
    propagate(net, {{"R", 1}, {"B", 1}});
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_input_signal);
  }
}

TEST(ThresholdNetwork, CycleIsRejected) {
  ThresholdNetwork net({{"R", 0, NeuronKind::input}, {"B", 1, NeuronKind::hidden}, {"C", 1, NeuronKind::output}},
                       {{"R", "B", 1}, {"B", "C", 1}, {"C", "B", 1}});
  try {
    propagate(net, {{"R", 1}});
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), ErrorCode::cycle_detected);
  }
  const auto report = validate_network(net);
  EXPECT_FALSE(report.ok());
  EXPECT_TRUE(report.has_error_containing("cycle"));
  EXPECT_TRUE(report.has_error_containing("B"));
}

TEST(ThresholdNetwork, ValidationCatchesStructuralProblems) {
  EXPECT_TRUE(validate_network(classroom_example_network()).ok());
  ThresholdNetwork bad({{"R", 0, NeuronKind::input}, {"E", 1, NeuronKind::output}, {"E", 1, NeuronKind::hidden}},
                       {{"R", "E", 0}, {"R", "Z", 1}});
  const auto report = validate_network(bad);
  EXPECT_GE(report.error_count(), 3u);
  ThresholdNetwork no_output({{"R", 0, NeuronKind::input}}, {});
  EXPECT_FALSE(validate_network(no_output).ok());
  ThresholdNetwork unreachable({{"R", 0, NeuronKind::input}, {"E", 1, NeuronKind::output}}, {});
  const auto r2 = validate_network(unreachable);
  EXPECT_TRUE(r2.ok());
  EXPECT_EQ(r2.warning_count(), 1u);
}

TEST(ThresholdNetwork, TopologicalOrderFollowsDeclarationAmongReadyNeurons) {
  const auto net = classroom_example_network();
  const auto state = propagate(net, {{"R", 1}});
  EXPECT_EQ(state.order, (std::vector<NeuronId>{"R", "B", "C", "D", "E"}));
}

TEST(Reweigh, PoolWithExtraHeavyRopeMakesEFire) {
  const auto net = classroom_example_network();
  const auto w = reweigh_search(net, {{"R", 1}}, {{"E", 1}}, {2, 2, 1, 1, 3});
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(decide(with_pool(net, *w), {{"R", 1}}).at("E"), 1);
  auto sorted = *w;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<int>{1, 1, 2, 2, 3}));
}

TEST(Reweigh, AgreesWithFullEnumerationOnPaperPools) {
  const auto net = classroom_example_network();
  const oracle::Net o{{{"R", 0, true, false}, {"B", 2, false, false}, {"C", 2, false, false}, {"D", 2, false, false},
                       {"E", 3, false, true}},
                      {{"R", "B", 1}, {"R", "C", 2}, {"B", "D", 1}, {"C", "D", 1}, {"D", "E", 3}}};
  for (const auto& pool : {std::vector<int>{1, 2, 1, 1, 3}, std::vector<int>{2, 2, 1, 1, 3}}) {
    EXPECT_EQ(reweigh_search(net, {{"R", 1}}, {{"E", 1}}, pool), oracle::smallest_reweigh(o, {{"R", 1}}, {{"E", 1}}, pool));
  }
}

TEST(Reweigh, ReturnsCurrentWeightsWhenAlreadySatisfied) {
  const auto net = classroom_example_network();
  EXPECT_EQ(reweigh_search(net, {{"R", 1}}, {{"E", 0}}, {3, 3, 3, 3, 3}), net.canonical_weights());
}

TEST(Reweigh, PoolSizeMismatch) {
  try {
    reweigh_search(classroom_example_network(), {{"R", 1}}, {{"E", 1}}, {1, 2});
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), ErrorCode::pool_size_mismatch);
  }
}

TEST(Reweigh, RandomNetworksMatchEnumeration) {
  std::mt19937_64 g(99);
  int checked = 0;
  while (checked < 150) {
    auto c = gen::random_dag(g, 5);
    if (c.net.edges.empty() || c.net.edges.size() > 6) continue;
    std::vector<int> pool;
    for (const auto& e : c.net.edges) pool.push_back(e.weight);
    std::shuffle(pool.begin(), pool.end(), g);
    for (auto& p : pool) p = 1 + (p + checked) % 3;
    const auto signals = gen::all_signal_patterns(c.inputs).back();
    auto desired = oracle::output_bits(c.net, signals);
    for (auto& [id, b] : desired) b = 1 - b;
    const auto got = reweigh_search(c.network, signals, desired, pool);
    const auto want = oracle::smallest_reweigh(c.net, signals, desired, pool);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (got) {
      EXPECT_EQ(*got, *want);
      EXPECT_EQ(decide(c.network.with_canonical_weights(*got), signals), desired);
    }
    ++checked;
  }
}

TEST(Propagation, RandomDagsMatchRecursiveOracle) {
  std::mt19937_64 g(7);
  for (int i = 0; i < 300; ++i) {
    const auto c = gen::random_dag(g);
    for (const auto& signals : gen::all_signal_patterns(c.inputs)) {
      std::map<std::string, int> sums;
      const auto bits = oracle::activations(c.net, signals, &sums);
      const auto state = propagate(c.network, signals);
      for (const auto& [id, b] : bits) {
        ASSERT_EQ(state.bit(id), b) << "case " << i << " neuron " << id;
        ASSERT_EQ(state.input_sum(id), sums.at(id));
      }
    }
  }
}

TEST(CnnGame, ConfigValidationAndActions) {
  ValidationReport report;
  const json payload = {{"neurons", json::array({{{"id", "R"}, {"kind", "input"}}, {{"id", "E"}, {"kind", "output"}, {"threshold", 1}}})},
                        {"connections", json::array({{{"from", "R"}, {"to", "E"}, {"weight", 1}}, {{"from", "E"}, {"to", "R"}, {"weight", 1}}})}};
  CnnGame::parse_config(payload, report);
  EXPECT_FALSE(report.ok());
  EXPECT_TRUE(report.has_error_containing("cycle"));
}
