#include "switchlens/server.hpp"

#include <chrono>
#include <mutex>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace switchlens {

using nlohmann::json;

struct Server::Impl {
  Advisor& advisor;
  std::ostream* log;
  std::mutex log_mutex;
  httplib::Server http;

  Impl(Advisor& a, std::ostream* l) : advisor(a), log(l) {}

  static Query query_of(const httplib::Request& req) {
    Query q;
    for (const auto& [k, v] : req.params) q[k] = v;
    return q;
  }

  static void send(httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    if (api.status != 204) res.set_content(api.body.dump(), "application/json");
  }

  void routes() {
    http.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok"})", "application/json");
    });
    http.Post("/events", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, advisor.post_events(req.body));
    });
    http.Get("/advice/switch", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, advisor.switch_advice(query_of(req)));
    });
    http.Get(R"(/suspension/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, advisor.suspension(req.matches[1], query_of(req)));
    });
    http.Get(R"(/resumption/([^/]+)/cues)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, advisor.resumption_cues(req.matches[1]));
    });
    http.Post(R"(/resumption/([^/]+)/cue-visit)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, advisor.post_cue_visit(req.matches[1], req.body));
    });
    http.Get("/graph/communication", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, advisor.communication(query_of(req)));
    });
    http.Get("/patterns", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, advisor.patterns(query_of(req)));
    });

    http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string what = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      res.status = 500;
      res.set_content(json{{"error", what}}.dump(), "application/json");
    });

    http.set_logger([this](const httplib::Request& req, const httplib::Response& res) {
      if (log == nullptr) return;
      const json line{{"ts", std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::system_clock::now().time_since_epoch())
                                 .count()},
                      {"method", req.method},
                      {"path", req.path},
                      {"status", res.status},
                      {"bytes", res.body.size()}};
      std::lock_guard lock(log_mutex);
      *log << line.dump() << '\n';
      log->flush();
    });
  }
};

Server::Server(Advisor& advisor, std::ostream* log) : impl_(std::make_unique<Impl>(advisor, log)) { impl_->routes(); }

Server::~Server() { stop(); }

bool Server::listen(const std::string& host, int port) { return impl_->http.listen(host, port); }

int Server::bind_any_port(const std::string& host) { return impl_->http.bind_to_any_port(host); }

bool Server::listen_after_bind() { return impl_->http.listen_after_bind(); }

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

void Server::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

}  // namespace switchlens
