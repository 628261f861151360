#pragma once

// HTTP facade over sessions for the facilitator console.
//
//   GET  /healthz                 -> 200 "ok"
//   GET  /sessions                -> [{id, game, status}]
//   POST /sessions                -> 201 {id, state} | 400 validation report
//   POST /sessions/{id}/events    -> 200 {seq, state, outcome} | 404 | 409 | 422
//   GET  /sessions/{id}/state     -> 200 {seq, state}
//   GET  /sessions/{id}/stream    -> text/event-stream of {seq, state, outcome}
//
// `seq` in responses and stream ids is the session version: the number of
// events applied so far. An event submission carries the version it expects
// to extend (`expected_seq`); stale tokens get 409.
//
// With a log directory every session is written ahead to
// <dir>/<id>.lesson.json and <dir>/<id>.events.jsonl, and resume() rebuilds
// all sessions found there by replay.

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <sstream>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "classroom_ai/session.hpp"

namespace classroom_ai::server {

struct StreamItem {
  std::uint64_t seq;  // version after the event
  json state;         // system view; projected on the way out
  json outcome;
};

struct SessionSlot {
  std::mutex mu;
  std::condition_variable cv;
  Session session;
  std::vector<StreamItem> history;
};

class ApiServer {
 public:
  struct Options {
    std::filesystem::path log_dir;  // empty: keep sessions in memory only
  };

  ApiServer() : ApiServer(Options{}) {}
  explicit ApiServer(Options options) : options_(std::move(options)) {
    if (!options_.log_dir.empty()) std::filesystem::create_directories(options_.log_dir);
    http_.new_task_queue = [] { return new httplib::ThreadPool(64); };
    // no SO_REUSEPORT: a busy port has to fail the bind
    http_.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
    });
    routes();
  }

  ~ApiServer() { stop(); }

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Restores every session in the log directory. Returns how many.
  std::size_t resume() {
    if (options_.log_dir.empty()) return 0;
    std::size_t restored = 0;
    std::vector<std::filesystem::path> lessons;
    for (const auto& entry : std::filesystem::directory_iterator(options_.log_dir)) {
      const auto name = entry.path().filename().string();
      if (name.size() > 12 && name.ends_with(".lesson.json")) lessons.push_back(entry.path());
    }
    std::sort(lessons.begin(), lessons.end());
    for (const auto& path : lessons) {
      const auto name = path.filename().string();
      const std::string id = name.substr(0, name.size() - std::string(".lesson.json").size());
      std::ifstream config_in(path);
      const LessonConfig config = parse_lesson_config(json::parse(config_in));
      std::vector<SessionEvent> events;
      if (std::ifstream log_in(events_path(id)); log_in) events = read_log_jsonl(log_in);

      auto slot = std::make_shared<SessionSlot>();
      slot->session = create_session(config, id);
      for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].seq != i) {
          throw EngineError(ErrorCode::replay_divergence, id + ": expected seq " + std::to_string(i));
        }
        try {
          Outcome out = slot->session.apply(events[i].actor, events[i].action, events[i].recorded_at);
          slot->history.push_back({slot->session.next_seq(), slot->session.state_json(View::system), out.data});
        } catch (const EngineError& e) {
          throw EngineError(ErrorCode::replay_divergence, id + ": event " + std::to_string(i) + ": " + e.what());
        }
      }
      {
        std::unique_lock lock(sessions_mu_);
        sessions_[id] = slot;
        bump_counter(id);
      }
      ++restored;
    }
    return restored;
  }

  bool bind(const std::string& host, int port) { return http_.bind_to_port(host, port); }
  int bind_to_any_port(const std::string& host) { return http_.bind_to_any_port(host); }

  /// Blocks until stop().
  bool listen_after_bind() { return http_.listen_after_bind(); }

  /// Runs the accept loop on a background thread.
  void start() {
    thread_ = std::thread([this] { http_.listen_after_bind(); });
    http_.wait_until_ready();
  }

  void stop() {
    if (stopping_.exchange(true)) return;
    {
      std::shared_lock lock(sessions_mu_);
      for (auto& [id, slot] : sessions_) {
        std::lock_guard slot_lock(slot->mu);
        slot->cv.notify_all();
      }
    }
    http_.stop();
    if (thread_.joinable()) thread_.join();
  }

  bool running() const { return http_.is_running(); }

  std::shared_ptr<SessionSlot> find(const std::string& id) const {
    std::shared_lock lock(sessions_mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

 private:
  static View requested_view(const httplib::Request& req, const Session& s) {
    if (s.default_view() == View::student) return View::student;
    if (req.has_param("view") && req.get_param_value("view") == "student") return View::student;
    return View::teacher;
  }

  static void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
    send_json(res, status, {{"error", code}, {"message", message}});
  }

  std::filesystem::path lesson_path(const std::string& id) const { return options_.log_dir / (id + ".lesson.json"); }
  std::filesystem::path events_path(const std::string& id) const { return options_.log_dir / (id + ".events.jsonl"); }

  void bump_counter(const std::string& id) {
    if (id.size() > 1 && id[0] == 's' && std::all_of(id.begin() + 1, id.end(), ::isdigit)) {
      next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(id.substr(1)) + 1);
    }
  }

  std::string new_id() {
    std::ostringstream os;
    os << 's' << std::setw(4) << std::setfill('0') << next_id_++;
    return os.str();
  }

  static std::string sse_frame(const StreamItem& item, const Session& session, View view) {
    json data = {{"seq", item.seq},
                 {"state", session.project_state(item.state, view)},
                 {"outcome", session.project_outcome(item.outcome, view)}};
    return "id: " + std::to_string(item.seq) + "\ndata: " + data.dump() + "\n\n";
  }

  void routes() {
    http_.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });

    http_.Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
      json list = json::array();
      std::shared_lock lock(sessions_mu_);
      for (const auto& [id, slot] : sessions_) {
        std::lock_guard slot_lock(slot->mu);
        list.push_back({{"id", id}, {"game", to_string(slot->session.config().game)},
                        {"status", to_string(slot->session.status())}});
      }
      send_json(res, 200, list);
    });

    http_.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::exception& e) {
        send_error(res, 400, "invalid-json", e.what());
        return;
      }
      const ValidationReport report = validate_config(body);
      if (!report.ok()) {
        json out = report.to_json();
        out["error"] = "invalid-config";
        send_json(res, 400, out);
        return;
      }
      auto slot = std::make_shared<SessionSlot>();
      std::string id;
      {
        std::unique_lock lock(sessions_mu_);
        id = new_id();
        slot->session = create_session(parse_lesson_config(body), id);
        if (!options_.log_dir.empty()) {
          std::ofstream(lesson_path(id)) << slot->session.config().to_json().dump(2) << '\n';
          std::ofstream(events_path(id), std::ios::trunc);
        }
        sessions_[id] = slot;
      }
      res.set_header("Location", "/sessions/" + id);
      send_json(res, 201, {{"id", id}, {"state", slot->session.state_json(slot->session.default_view())}});
    });

    http_.Post(R"(/sessions/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
      auto slot = find(req.matches[1]);
      if (!slot) return send_error(res, 404, "unknown-session", "no session " + std::string(req.matches[1]));
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::exception& e) {
        return send_error(res, 400, "invalid-json", e.what());
      }
      if (!body.is_object() || !body.contains("expected_seq") || !body["expected_seq"].is_number_integer() ||
          !body.contains("actor") || !body["actor"].is_string() || !body.contains("action")) {
        return send_error(res, 400, "malformed-submission", "body needs expected_seq, actor and action");
      }
      std::unique_lock lock(slot->mu);
      const auto expected = body["expected_seq"].get<std::int64_t>();
      if (expected < 0 || static_cast<std::uint64_t>(expected) != slot->session.next_seq()) {
        json out = {{"error", "seq-conflict"},
                    {"message", "expected_seq is stale; refetch the state"},
                    {"seq", slot->session.next_seq()}};
        return send_json(res, 409, out);
      }
      Session next = slot->session;
      Outcome outcome;
      try {
        outcome = next.apply(body["actor"].get<std::string>(), body["action"]);
      } catch (const EngineError& e) {
        return send_error(res, 422, to_string(e.code()), e.detail());
      }
      if (!options_.log_dir.empty()) {
        std::ofstream log(events_path(slot->session.id()), std::ios::app);
        log << next.log().back().to_json().dump() << '\n';
        log.flush();
        if (!log) return send_error(res, 500, "log-write-failed", "could not persist the event");
      }
      slot->session = std::move(next);
      slot->history.push_back({slot->session.next_seq(), slot->session.state_json(View::system), outcome.data});
      slot->cv.notify_all();
      const View view = requested_view(req, slot->session);
      send_json(res, 200, {{"seq", slot->session.next_seq()},
                           {"state", slot->session.state_json(view)},
                           {"outcome", slot->session.project_outcome(outcome.data, view)}});
    });

    http_.Get(R"(/sessions/([^/]+)/state)", [this](const httplib::Request& req, httplib::Response& res) {
      auto slot = find(req.matches[1]);
      if (!slot) return send_error(res, 404, "unknown-session", "no session " + std::string(req.matches[1]));
      std::lock_guard lock(slot->mu);
      const View view = requested_view(req, slot->session);
      send_json(res, 200, {{"seq", slot->session.next_seq()}, {"state", slot->session.state_json(view)}});
    });

    http_.Get(R"(/sessions/([^/]+)/stream)", [this](const httplib::Request& req, httplib::Response& res) {
      auto slot = find(req.matches[1]);
      if (!slot) return send_error(res, 404, "unknown-session", "no session " + std::string(req.matches[1]));
      std::size_t next = 0;
      std::string last = req.get_header_value("Last-Event-ID");
      if (last.empty() && req.has_param("last_event_id")) last = req.get_param_value("last_event_id");
      if (!last.empty()) {
        try {
          next = static_cast<std::size_t>(std::stoull(last));
        } catch (const std::exception&) {
          return send_error(res, 400, "bad-last-event-id", "Last-Event-ID must be a sequence number");
        }
      }
      View view;
      {
        std::lock_guard lock(slot->mu);
        view = requested_view(req, slot->session);
      }
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "text/event-stream",
          [this, slot, next, view, idle = 0](std::size_t, httplib::DataSink& sink) mutable {
            std::string out;
            {
              std::unique_lock lock(slot->mu);
              slot->cv.wait_for(lock, std::chrono::milliseconds(250),
                                [&] { return stopping_.load() || slot->history.size() > next; });
              if (stopping_) return false;
              for (; next < slot->history.size(); ++next) out += sse_frame(slot->history[next], slot->session, view);
            }
            if (out.empty()) {
              if (++idle < 20) return true;
              out = ": keep-alive\n\n";
            }
            idle = 0;
            return sink.write(out.data(), out.size());
          });
    });
  }

  Options options_;
  httplib::Server http_;
  std::thread thread_;
  std::atomic<bool> stopping_{false};
  mutable std::shared_mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<SessionSlot>> sessions_;
  std::uint64_t next_id_ = 1;
};

}  // namespace classroom_ai::server
