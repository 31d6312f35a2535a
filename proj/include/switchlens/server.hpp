#pragma once

#include <functional>
#include <memory>
#include <ostream>
#include <string>

#include "switchlens/advisor.hpp"

namespace switchlens {

/// HTTP/JSON front of an Advisor:
///   POST /events, GET /advice/switch, GET /suspension/{task},
///   GET /resumption/{task}/cues, POST /resumption/{task}/cue-visit,
///   GET /graph/communication, GET /patterns, GET /health
/// Each request is logged as one JSON line to `log` (if non-null).
class Server {
 public:
  Server(Advisor& advisor, std::ostream* log = nullptr);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and blocks until stop().
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it (or -1); serve with listen_after_bind().
  int bind_any_port(const std::string& host);
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace switchlens
