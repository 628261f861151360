#include <sstream>

#include <gtest/gtest.h>

#include "classroom_ai/cli.hpp"
#include "fuzz.hpp"
#include "process.hpp"

using namespace classroom_ai;

namespace {

std::string lesson(const std::string& name) { return (std::filesystem::path(CLASSROOM_AI_LESSON_DIR) / name).string(); }
std::string script(const std::string& name) {
  return (std::filesystem::path(CLASSROOM_AI_LESSON_DIR) / "scripts" / name).string();
}

std::string write_temp(const std::string& tag, const std::string& text) {
  const auto dir = fuzz::scratch_dir(tag);
  const auto path = dir / "file";
  std::ofstream(path) << text;
  return path.string();
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(CliValidate, ExitCodes) {
  EXPECT_EQ(proc::run({"validate", lesson("cnn.lesson.json")}).code, 0);
  json cyclic = json::parse(proc::slurp(lesson("cnn.lesson.json")));
  cyclic["payload"]["connections"].push_back({{"from", "E"}, {"to", "B"}, {"weight", 1}});
  const auto r = proc::run({"validate", write_temp("cycle", cyclic.dump())});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("cycle"), std::string::npos);
  EXPECT_NE(r.out.find("E"), std::string::npos);
  EXPECT_EQ(proc::run({"validate", "/nonexistent/lesson.json"}).code, 2);
  EXPECT_EQ(proc::run({"validate", write_temp("garbage", "{not json")}).code, 1);
}

TEST(CliRun, RedCardTraceEndsNegative) {
  const auto r = proc::run({"run", lesson("cnn.lesson.json"), script("cnn.red_card.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("C 2 2 1\nD 1 2 0\nE 0 3 0\ndecision: negative\n"), std::string::npos);
}

TEST(CliRun, EmptyScriptPrintsInitialState) {
  const auto r = proc::run({"run", lesson("cnn.lesson.json"), write_temp("empty", "")});
  ASSERT_EQ(r.code, 0);
  const auto pos = r.out.find('{');
  ASSERT_NE(pos, std::string::npos);
  const auto state = json::parse(r.out.substr(pos));
  EXPECT_EQ(state["status"], "setup");
  EXPECT_EQ(state["seq"], 0);
}

TEST(CliRun, ByteIdenticalAcrossRuns) {
  for (const auto& [l, s] : std::vector<std::pair<std::string, std::string>>{
           {"cnn.lesson.json", "cnn.red_card.jsonl"},
           {"surprise_box.lesson.json", "surprise_box.round.jsonl"},
           {"animals.lesson.json", "animals.wolf.jsonl"},
           {"predictors.lesson.json", "predictors.reveal.jsonl"},
           {"spotify.lesson.json", "spotify.sleepy.jsonl"}}) {
    const auto dir = fuzz::scratch_dir("bytes");
    const auto a = proc::run({"run", "--seed", "42", lesson(l), script(s), "--out", (dir / "a.jsonl").string()});
    const auto b = proc::run({"run", "--seed", "42", lesson(l), script(s), "--out", (dir / "b.jsonl").string()});
    ASSERT_EQ(a.code, 0) << l << a.err;
    EXPECT_EQ(a.out, b.out) << l;
    EXPECT_EQ(proc::slurp(dir / "a.jsonl"), proc::slurp(dir / "b.jsonl")) << l;
    EXPECT_FALSE(proc::slurp(dir / "a.jsonl").empty());
  }
}

TEST(CliRun, SeedOverrideChangesHiddenDraws) {
  std::set<std::string> outcomes;
  for (int seed = 0; seed < 12; ++seed) {
    outcomes.insert(proc::run({"run", "--seed", std::to_string(seed), lesson("surprise_box.lesson.json"),
                               script("surprise_box.round.jsonl")})
                        .out);
  }
  EXPECT_GT(outcomes.size(), 1u);
}

TEST(CliRun, IllegalActionReportsSeq) {
  const auto path = write_temp("illegal",
                               R"({"actor": "teacher", "action": {"type": "start"}})"
                               "\n"
                               R"({"actor": "user", "action": {"type": "set_weight", "from": "R", "to": "B", "weight": 3}})"
                               "\n");
  const auto r = proc::run({"run", lesson("cnn.lesson.json"), path});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error at seq 1"), std::string::npos);
}

TEST(CliRun, LogReplaysToTheSameState) {
  const auto dir = fuzz::scratch_dir("replay");
  const auto r = proc::run({"run", lesson("animals.lesson.json"), script("animals.wolf.jsonl"), "--out", (dir / "log.jsonl").string()});
  ASSERT_EQ(r.code, 0);
  const auto events = fuzz::import_log(proc::slurp(dir / "log.jsonl"));
  const auto session = replay(fuzz::load_lesson("animals.lesson.json"), events);
  const auto pos = r.out.find("final state:\n");
  EXPECT_EQ(json::parse(r.out.substr(pos + 13)), session.state_json(View::teacher));
}

TEST(CliSimulate, EmpiricalMeansWithinThreeStandardErrors) {
  const auto r = proc::run({"simulate", lesson("surprise_box.lesson.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = split_lines(r.out);
  ASSERT_EQ(lines.size(), 10u);
  EXPECT_EQ(lines[0], "card\tposterior_best_box\tev\tvoi\trounds\tempirical_mean\tstd_error");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream row(lines[i]);
    std::string card, box, ev, voi;
    std::uint64_t rounds;
    double mean, se;
    row >> card >> box >> ev >> voi >> rounds >> mean >> se;
    EXPECT_EQ(rounds, 100000u);
    EXPECT_LE(std::abs(mean - std::stod(ev)), 3 * se) << card;
  }
  EXPECT_EQ(lines[1].substr(0, 14), "baseline\tA\t65\t");
  EXPECT_EQ(lines[2].substr(0, 9), "A\tB\t73\t8\t");
  EXPECT_EQ(lines[4].substr(0, 14), "C\tB\t91.5\t26.5\t");
}

TEST(CliSimulate, ZeroRoundsAndWrongGame) {
  const auto zero = proc::run({"simulate", "--rounds", "0", lesson("surprise_box.lesson.json")});
  EXPECT_EQ(zero.code, 0);
  EXPECT_EQ(split_lines(zero.out).size(), 1u);
  const auto wrong = proc::run({"simulate", lesson("cnn.lesson.json")});
  EXPECT_EQ(wrong.code, 1);
  EXPECT_NE(wrong.err.find("wrong-game-kind"), std::string::npos);
}

TEST(CliMaterials, Kits) {
  const auto cnn = proc::run({"materials", lesson("cnn.lesson.json")});
  ASSERT_EQ(cnn.code, 0);
  EXPECT_NE(cnn.out.find("Neuron t-shirts (5)"), std::string::npos);
  EXPECT_NE(cnn.out.find("Ropes (5)"), std::string::npos);
  EXPECT_NE(cnn.out.find("D -> E  weight 3"), std::string::npos);
  const auto pred = proc::run({"materials", lesson("predictors.lesson.json")});
  EXPECT_NE(pred.out.find("Sequence cards (18)"), std::string::npos);
  const auto spot = proc::run({"materials", lesson("spotify.lesson.json")});
  EXPECT_NE(spot.out.find("Song cards (5)"), std::string::npos);
  EXPECT_NE(spot.out.find("Mood cards (2)"), std::string::npos);
  EXPECT_EQ(proc::run({"materials", "/nonexistent.json"}).code, 2);
}

TEST(CliServe, HealthzAndCleanShutdown) {
  proc::Server server({"--quiet"});
  ASSERT_TRUE(server.wait_ready());
  httplib::Client c("127.0.0.1", server.port());
  auto res = c.Get("/healthz");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(server.stop(), 0);
}

TEST(CliServe, OccupiedPortExitsTwo) {
  httplib::Server blocker;
  const int port = blocker.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  const auto r = proc::run({"serve", "--port", std::to_string(port)});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bind-failure"), std::string::npos);
}

TEST(CliServe, ResumeRestoresSessions) {
  const auto dir = fuzz::scratch_dir("serve");
  std::string id, before;
  {
    proc::Server server({"--log-dir", dir.string()});
    ASSERT_TRUE(server.wait_ready());
    httplib::Client c("127.0.0.1", server.port());
    auto created = c.Post("/sessions", proc::slurp(lesson("surprise_box.lesson.json")), "application/json");
    ASSERT_TRUE(created);
    ASSERT_EQ(created->status, 201);
    id = json::parse(created->body)["id"];
    int seq = 0;
    for (const json& step : {json{{"actor", "teacher"}, {"action", {{"type", "start"}}}},
                             json{{"actor", "ana"}, {"action", {{"type", "begin_round"}}}},
                             json{{"actor", "ana"}, {"action", {{"type", "buy_card"}, {"set", "A"}}}}}) {
      json body = step;
      body["expected_seq"] = seq++;
      auto r = c.Post("/sessions/" + id + "/events", body.dump(), "application/json");
      ASSERT_EQ(r->status, 200);
    }
    before = c.Get("/sessions/" + id + "/state")->body;
    EXPECT_EQ(server.stop(), 0);
  }
  proc::Server again({"--resume", dir.string()});
  ASSERT_TRUE(again.wait_ready());
  httplib::Client c("127.0.0.1", again.port());
  auto res = c.Get("/sessions/" + id + "/state");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->body, before);
}

TEST(CliInProcess, SameCodesAsBinary) {
  std::ostringstream out, err;
  cli::GlobalOptions opts;
  EXPECT_EQ(cli::cmd_validate(lesson("spotify.lesson.json"), opts, out, err), 0);
  EXPECT_EQ(cli::cmd_materials(lesson("animals.lesson.json"), opts, out, err), 0);
  EXPECT_NE(out.str().find("Label cards: DOG CAT"), std::string::npos);
  EXPECT_EQ(cli::cmd_simulate(lesson("predictors.lesson.json"), 10, opts, out, err), 1);
  opts.quiet = true;
  std::ostringstream quiet;
  EXPECT_EQ(cli::cmd_validate(lesson("spotify.lesson.json"), opts, quiet, err), 0);
  EXPECT_TRUE(quiet.str().empty());
}
