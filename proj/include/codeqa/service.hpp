#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "codeqa/pipeline.hpp"

namespace httplib {
class Server;
}

namespace codeqa {

/// What the HTTP layer needs once loading has finished. Immutable after
/// construction and shared by every request handler.
struct ServiceState {
  Model model;
  std::vector<MethodRecord> records;
  std::map<std::string, const MethodRecord*> by_id;
  std::optional<SplitAssignment> split;

  ServiceState(Model m, std::vector<MethodRecord> r, std::optional<SplitAssignment> s);
};

struct HttpResult {
  int status = 200;
  std::string body;
  double elapsed_ms = 0;
};

/// Question answering over HTTP:
///
///   POST /api/ask      {"question", "method_id"} or {"question", "source", "summary"?}
///   GET  /api/methods  ?split=train|validation|test  &debug=1 adds sources
///   GET  /api/health
///   GET  /             static files of the chat UI
///
/// Until set_state() is called, /api/ask and /api/methods answer 503.
/// Elapsed time is reported in the X-Elapsed-Ms header so identical requests
/// produce identical bodies.
class QaService {
 public:
  explicit QaService(std::string static_dir = {}, unsigned threads = 8);
  ~QaService();
  QaService(const QaService&) = delete;
  QaService& operator=(const QaService&) = delete;

  void set_state(std::shared_ptr<const ServiceState> state);
  bool ready() const;

  HttpResult ask(const std::string& body) const;
  HttpResult methods(const std::string& split, bool debug) const;
  HttpResult health() const;

  /// Binds to host:port (port 0 picks a free one) and returns the port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  std::shared_ptr<const ServiceState> state() const;

  std::string static_dir_;
  std::unique_ptr<httplib::Server> server_;
  mutable std::mutex mutex_;
  std::shared_ptr<const ServiceState> state_;
};

}  // namespace codeqa
