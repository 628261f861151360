// classroom_ai: validate, run, simulate, materials, serve.

#include <atomic>
#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "classroom_ai/cli.hpp"

namespace {
std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop.store(true); }
}  // namespace

int main(int argc, char** argv) {
  namespace cli = classroom_ai::cli;
  CLI::App app{"Classroom AI games: lesson tooling and session server"};
  app.require_subcommand(1);
  app.fallthrough();

  cli::GlobalOptions global;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "override the lesson seed")->group("Global");
  app.add_flag("--quiet", global.quiet, "print only essential output")->group("Global");

  std::string config;
  auto* validate = app.add_subcommand("validate", "check a lesson config");
  validate->add_option("config", config, "lesson config (JSON)")->required();

  std::string script, log_out;
  auto* run = app.add_subcommand("run", "play a scripted session headlessly");
  run->add_option("config", config, "lesson config (JSON)")->required();
  run->add_option("script", script, "JSONL of {actor, action} records");
  run->add_option("--out", log_out, "write the event log (JSONL) here");

  std::uint64_t rounds = 100000;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo check of surprise box card values");
  simulate->add_option("config", config, "surprise_box lesson config")->required();
  simulate->add_option("--rounds", rounds, "rounds per row")->capture_default_str();

  auto* materials = app.add_subcommand("materials", "print the physical kit for a lesson");
  materials->add_option("config", config, "lesson config (JSON)")->required();

  cli::ServeOptions serve_opts;
  std::string resume, log_dir;
  auto* serve = app.add_subcommand("serve", "run the HTTP session service");
  serve->add_option("--host", serve_opts.host, "bind address")->capture_default_str();
  serve->add_option("--port", serve_opts.port, "port (0 picks a free one)")->capture_default_str();
  serve->add_option("--log-dir", log_dir, "write session logs here");
  serve->add_option("--resume", resume, "restore sessions from this log directory and keep logging there");

  // exit code 2 for usage errors would clash with "environment error"; CLI11 uses 105+.
  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) global.seed = seed;

  if (*validate) return cli::cmd_validate(config, global, std::cout, std::cerr);
  if (*run) {
    return cli::cmd_run(config, script.empty() ? std::nullopt : std::optional<std::filesystem::path>(script),
                        log_out.empty() ? std::nullopt : std::optional<std::filesystem::path>(log_out), global,
                        std::cout, std::cerr);
  }
  if (*simulate) return cli::cmd_simulate(config, rounds, global, std::cout, std::cerr);
  if (*materials) return cli::cmd_materials(config, global, std::cout, std::cerr);
  if (*serve) {
    serve_opts.log_dir = log_dir;
    if (!resume.empty()) serve_opts.resume = resume;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    return cli::cmd_serve(serve_opts, global, g_stop, std::cout, std::cerr);
  }
  return 0;
}
