#include "weakstore/server.hpp"

#include <httplib.h>

#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <random>
#include <stdexcept>

#include "weakstore/errors.hpp"
#include "weakstore/history_json.hpp"

namespace weakstore {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

const char* kJson = "application/json";
const char* kTokenHeader = "X-Session-Token";

// Request-level failure with an HTTP status.
struct HttpError {
  int status;
  std::string code;
  std::string message;
};

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kLockTimeout:
    case ErrorCode::kNoLiveTransaction:
    case ErrorCode::kLiveTransactionExists:
      return 409;
    case ErrorCode::kUnknownSession:
      return 404;
    default:
      return 400;
  }
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) throw HttpError{400, "MalformedRequest", "body must be a JSON object"};
  return body;
}

std::string require_string(const json& body, const char* field) {
  auto it = body.find(field);
  if (it == body.end() || !it->is_string()) {
    throw HttpError{400, "MalformedRequest", std::string("missing string field \"") + field + "\""};
  }
  return it->get<std::string>();
}

json rows_to_json(const RowSet& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    json r = json::object();
    for (const auto& [c, v] : row) r[c] = value_to_json(v);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

struct Server::Impl {
  struct ApiSession {
    SessionId id;
    Clock::time_point last_used;
  };

  explicit Impl(ServerConfig c) : cfg(std::move(c)), store(cfg.store), sql(store), token_rng(std::random_device{}()) {
    sql.set_begin_timeout(cfg.begin_timeout);
    routes();
  }

  ServerConfig cfg;
  Store store;
  SqlEngine sql;
  httplib::Server http;
  std::mutex mu;
  std::map<std::string, ApiSession> sessions;
  std::mt19937_64 token_rng;

  std::string new_token() {
    static const char* hex = "0123456789abcdef";
    std::string t;
    for (int i = 0; i < 2; ++i) {
      std::uint64_t x = token_rng();
      for (int n = 0; n < 16; ++n, x >>= 4) t.push_back(hex[x & 0xf]);
    }
    return t;
  }

  void expire_idle() {
    std::vector<SessionId> stale;
    {
      std::lock_guard lock(mu);
      const auto now = Clock::now();
      for (auto it = sessions.begin(); it != sessions.end();) {
        if (now - it->second.last_used > cfg.idle_timeout) {
          stale.push_back(it->second.id);
          it = sessions.erase(it);
        } else {
          ++it;
        }
      }
    }
    for (SessionId s : stale) store.close_session(s);
  }

  SessionId session_of(const httplib::Request& req) {
    expire_idle();
    const std::string token = req.get_header_value(kTokenHeader);
    if (token.empty()) throw HttpError{400, "MalformedRequest", std::string("missing ") + kTokenHeader + " header"};
    std::lock_guard lock(mu);
    auto it = sessions.find(token);
    if (it == sessions.end()) throw HttpError{404, "UnknownSession", "unknown session token"};
    it->second.last_used = Clock::now();
    return it->second.id;
  }

  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f = std::move(f)](const httplib::Request& req, httplib::Response& res) {
      try {
        reply(res, 200, f(req));
      } catch (const HttpError& e) {
        reply(res, e.status, {{"error", e.code}, {"message", e.message}});
      } catch (const Error& e) {
        reply(res, status_for(e.code()), {{"error", std::string(error_code_name(e.code()))}, {"message", e.what()}});
      } catch (const json::exception& e) {
        reply(res, 400, {{"error", "MalformedRequest"}, {"message", e.what()}});
      }
    };
  }

  void routes() {
    http.Post("/session", guarded([this](const httplib::Request&) {
      expire_idle();
      const SessionId s = store.open_session();
      std::lock_guard lock(mu);
      std::string token = new_token();
      sessions[token] = {s, Clock::now()};
      return json{{"token", token}, {"session", raw(s)}};
    }));
    http.Delete(R"(/session/([0-9a-f]+))", guarded([this](const httplib::Request& req) {
      std::optional<SessionId> s;
      {
        std::lock_guard lock(mu);
        auto it = sessions.find(req.matches[1].str());
        if (it == sessions.end()) throw HttpError{404, "UnknownSession", "unknown session token"};
        s = it->second.id;
        sessions.erase(it);
      }
      store.close_session(*s);
      return json::object();
    }));
    http.Post("/kv/begin", guarded([this](const httplib::Request& req) {
      const SessionId s = session_of(req);
      return json{{"txn", to_string(store.begin(s, cfg.begin_timeout))}};
    }));
    http.Post("/kv/read", guarded([this](const httplib::Request& req) {
      const json body = parse_body(req);
      const SessionId s = session_of(req);
      return json{{"value", value_to_json(store.read(s, require_string(body, "key")))}};
    }));
    http.Post("/kv/write", guarded([this](const httplib::Request& req) {
      const json body = parse_body(req);
      const SessionId s = session_of(req);
      if (!body.contains("value")) throw HttpError{400, "MalformedRequest", "missing field \"value\""};
      store.write(s, require_string(body, "key"), value_from_json(body["value"]));
      return json::object();
    }));
    http.Post("/kv/commit", guarded([this](const httplib::Request& req) {
      store.commit(session_of(req));
      return json::object();
    }));
    http.Post("/sql", guarded([this](const httplib::Request& req) {
      const json body = parse_body(req);
      const SessionId s = session_of(req);
      SqlResult r = sql.execute(s, require_string(body, "query"));
      json out{{"affected", r.affected}};
      if (r.rows) out["rows"] = rows_to_json(*r.rows);
      return out;
    }));
    http.Get("/history", guarded([this](const httplib::Request&) { return history_to_json(store.history()); }));
    http.Get("/config", guarded([this](const httplib::Request&) {
      const StoreConfig& c = store.config();
      return json{{"isolation", c.level.display_name()},
                  {"latest_reads", c.latest_per_session},
                  {"delay_ms", c.delay_max_ms},
                  {"seed", c.seed},
                  {"default_value", value_to_json(c.default_value)},
                  {"begin_timeout_ms", cfg.begin_timeout.count()}};
    }));
  }
};

Server::Server(ServerConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool Server::listen() { return impl_->http.listen_after_bind(); }

void Server::stop() { impl_->http.stop(); }

bool Server::running() const { return impl_->http.is_running(); }

Store& Server::store() { return impl_->store; }

const ServerConfig& Server::config() const { return impl_->cfg; }

std::pair<std::string, int> parse_bind_address(const std::string& addr) {
  std::string host = "127.0.0.1";
  std::string port = addr;
  if (auto colon = addr.rfind(':'); colon != std::string::npos) {
    if (colon > 0) host = addr.substr(0, colon);
    port = addr.substr(colon + 1);
  }
  std::size_t used = 0;
  int p = 0;
  try {
    p = std::stoi(port, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != port.size() || p < 0 || p > 65535) throw std::invalid_argument("bad bind address: " + addr);
  return {host, p};
}

}  // namespace weakstore
