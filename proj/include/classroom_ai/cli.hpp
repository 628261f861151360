#pragma once

// Subcommand bodies for the classroom_ai executable. Each takes its output
// streams explicitly so tests can run them in-process.
//
// Exit codes: 0 success, 1 domain error, 2 environment error.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "classroom_ai/api_server.hpp"
#include "classroom_ai/session.hpp"

namespace classroom_ai::cli {

enum Exit : int { ok = 0, domain_error = 1, environment_error = 2 };

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

namespace detail {

struct IoError {
  std::string message;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError{"cannot read " + path.string()};
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError{"error reading " + path.string()};
  return os.str();
}

/// Loads and validates a lesson config. Prints diagnostics and returns
/// nullopt (with `code` set) when it cannot be used.
inline std::optional<LessonConfig> load_config(const std::filesystem::path& path, const GlobalOptions& opts,
                                               std::ostream& err, int& code) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    err << "io-error: " << e.message << '\n';
    code = Exit::environment_error;
    return std::nullopt;
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    err << "invalid-config: " << path.string() << " is not valid JSON: " << e.what() << '\n';
    code = Exit::domain_error;
    return std::nullopt;
  }
  try {
    LessonConfig config = parse_lesson_config(doc);
    if (opts.seed) config.seed = *opts.seed;
    return config;
  } catch (const InvalidConfig& e) {
    e.report().print(err);
    code = Exit::domain_error;
    return std::nullopt;
  }
}

struct ScriptLine {
  std::string actor;
  json action;
};

inline std::vector<ScriptLine> parse_script(const std::string& text) {
  std::vector<ScriptLine> lines;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw EngineError(ErrorCode::malformed_action, "script records must be objects");
      lines.push_back({action_fields::string(j, "actor"), action_fields::object(j, "action")});
    } catch (const json::exception& e) {
      throw EngineError(ErrorCode::malformed_action, "script line " + std::to_string(number) + ": " + e.what());
    } catch (const EngineError& e) {
      throw EngineError(e.code(), "script line " + std::to_string(number) + ": " + e.detail());
    }
  }
  return lines;
}

inline std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace detail

inline int cmd_validate(const std::filesystem::path& path, const GlobalOptions& opts, std::ostream& out,
                        std::ostream& err) {
  std::string text;
  try {
    text = detail::read_file(path);
  } catch (const detail::IoError& e) {
    err << "io-error: " << e.message << '\n';
    return Exit::environment_error;
  }
  ValidationReport report;
  try {
    report = validate_config(json::parse(text));
  } catch (const json::exception& e) {
    report.error("lesson", std::string("not valid JSON: ") + e.what());
  }
  if (!opts.quiet || !report.ok()) report.print(out);
  return report.ok() ? Exit::ok : Exit::domain_error;
}

/// Feeds a JSONL script of {actor, action} records through a fresh session.
/// Events carry no wall-clock stamp here so that output and log are byte-stable.
inline int cmd_run(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& script_path,
                   const std::optional<std::filesystem::path>& log_path, const GlobalOptions& opts,
                   std::ostream& out, std::ostream& err) {
  int code = Exit::ok;
  const auto config = detail::load_config(config_path, opts, err, code);
  if (!config) return code;

  std::vector<detail::ScriptLine> script;
  if (script_path) {
    try {
      script = detail::parse_script(detail::read_file(*script_path));
    } catch (const detail::IoError& e) {
      err << "io-error: " << e.message << '\n';
      return Exit::environment_error;
    } catch (const EngineError& e) {
      err << e.what() << '\n';
      return Exit::domain_error;
    }
  }

  Session session = create_session(*config, "cli");
  const View view = session.default_view();
  for (const auto& line : script) {
    const auto seq = session.next_seq();
    try {
      const Outcome outcome = session.apply(line.actor, line.action, "");
      if (!opts.quiet) {
        out << '[' << seq << "] " << line.actor << ' ' << line.action.at("type").get<std::string>() << '\n'
            << session.render_outcome(session.project_outcome(outcome.data, view));
      }
    } catch (const EngineError& e) {
      err << "error at seq " << seq << ": " << e.what() << '\n';
      code = Exit::domain_error;
      break;
    }
  }

  if (log_path) {
    std::ofstream log(*log_path, std::ios::binary | std::ios::trunc);
    if (!log) {
      err << "io-error: cannot write " << log_path->string() << '\n';
      return Exit::environment_error;
    }
    write_log_jsonl(log, session.log());
  }
  if (code != Exit::ok) return code;
  if (!opts.quiet) out << "final state:\n";
  out << session.state_json(view).dump(2) << '\n';
  return Exit::ok;
}

/// TSV: one baseline row (no card) and one row per card, each pairing the
/// analytic expectation with a seeded Monte-Carlo estimate. The hidden box
/// is drawn from the belief the player acts on, so the two agree in the limit.
inline int cmd_simulate(const std::filesystem::path& config_path, std::uint64_t rounds, const GlobalOptions& opts,
                        std::ostream& out, std::ostream& err) {
  using namespace surprise_box;
  int code = Exit::ok;
  const auto config = detail::load_config(config_path, opts, err, code);
  if (!config) return code;
  if (config->game != GameKind::surprise_box) {
    err << "wrong-game-kind: simulate needs a surprise_box lesson, got " << to_string(config->game) << '\n';
    return Exit::domain_error;
  }
  ValidationReport report;
  const auto game = SurpriseBoxGame::parse_config(config->payload, report);

  out << "card\tposterior_best_box\tev\tvoi\trounds\tempirical_mean\tstd_error\n";
  if (rounds == 0) return Exit::ok;

  SessionRng rng(config->seed);
  const auto row = [&](const std::string& name, const Belief& belief, int cost, Rational voi) {
    const BestAction best = best_action(belief, cost, game.prizes);
    const MonteCarloStats mc = simulate_rounds(belief, cost, rounds, rng, game.prizes);
    out << name << '\t' << to_string(best.box) << '\t' << to_decimal(best.points) << '\t' << to_decimal(voi)
        << '\t' << mc.rounds << '\t' << detail::fixed(mc.mean, 4) << '\t' << detail::fixed(mc.std_error, 4) << '\n';
  };
  row("baseline", game.prior(), 0, Rational(0));
  for (const auto* deck : {&game.cards_a, &game.cards_b}) {
    for (const auto& card : *deck) {
      const CardAnalytics a = analyze_card(card, game.prior(), game.prizes);
      row(card.id, posterior(card), card.cost, a.voi);
    }
  }
  return Exit::ok;
}

inline int cmd_materials(const std::filesystem::path& config_path, const GlobalOptions& opts, std::ostream& out,
                         std::ostream& err) {
  int code = Exit::ok;
  const auto config = detail::load_config(config_path, opts, err, code);
  if (!config) return code;
  create_session(*config, "materials").write_materials(out);
  return Exit::ok;
}

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path log_dir;
  std::optional<std::filesystem::path> resume;  // also becomes the log dir
};

/// Serves until `stop` turns true.
inline int cmd_serve(const ServeOptions& options, const GlobalOptions& opts, const std::atomic<bool>& stop,
                     std::ostream& out, std::ostream& err) {
  server::ApiServer::Options server_options;
  server_options.log_dir = options.resume ? *options.resume : options.log_dir;
  std::optional<server::ApiServer> srv;
  try {
    srv.emplace(server_options);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "io-error: " << e.what() << '\n';
    return Exit::environment_error;
  }
  if (options.resume) {
    try {
      const auto restored = srv->resume();
      if (!opts.quiet) out << "restored " << restored << " session(s) from " << options.resume->string() << '\n';
    } catch (const EngineError& e) {
      err << e.what() << '\n';
      return Exit::domain_error;
    } catch (const std::exception& e) {
      err << "io-error: " << e.what() << '\n';
      return Exit::environment_error;
    }
  }
  int port = options.port;
  if (port == 0) {
    port = srv->bind_to_any_port(options.host);
    if (port <= 0) {
      err << "bind-failure: cannot bind " << options.host << '\n';
      return Exit::environment_error;
    }
  } else if (!srv->bind(options.host, port)) {
    err << "bind-failure: cannot bind " << options.host << ':' << port << '\n';
    return Exit::environment_error;
  }
  srv->start();
  out << "listening on http://" << options.host << ':' << port << std::endl;
  while (!stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  srv->stop();
  if (!opts.quiet) out << "stopped" << std::endl;
  return Exit::ok;
}

}  // namespace classroom_ai::cli
