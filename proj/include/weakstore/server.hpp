#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "weakstore/sql.hpp"
#include "weakstore/store.hpp"

namespace weakstore {

struct ServerConfig {
  StoreConfig store;
  // How long POST /kv/begin waits for another session's commit before 409.
  std::chrono::milliseconds begin_timeout{10'000};
  // Sessions unused for this long are closed, committing any live
  // transaction so they cannot hold the store forever.
  std::chrono::seconds idle_timeout{600};
};

// HTTP/JSON front end over one Store and SqlEngine.
//
//   POST   /session                 -> {"token", "session"}
//   DELETE /session/{token}
//   POST   /kv/begin                -> {"txn"}
//   POST   /kv/read   {"key"}       -> {"value"}
//   POST   /kv/write  {"key", "value"}
//   POST   /kv/commit
//   POST   /sql       {"query"}     -> {"rows"?, "affected"}
//   GET    /history                 -> history JSON
//   GET    /config
//
// Session-bound calls carry the token in X-Session-Token. Errors are
// {"error": code, "message"} with 400 for malformed requests, 404 for
// unknown tokens and 409 for lifecycle conflicts and begin timeouts.
class Server {
 public:
  explicit Server(ServerConfig cfg);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds host:port (port 0 picks a free one). Returns the port or -1.
  int bind(const std::string& host, int port);
  // Serves until stop(). Requires a successful bind.
  bool listen();
  void stop();
  bool running() const;

  Store& store();
  const ServerConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Splits "host:port" or ":port" or "port"; throws std::invalid_argument.
std::pair<std::string, int> parse_bind_address(const std::string& addr);

}  // namespace weakstore
