// weakstore command-line tool: serve, check, run, emit-bench.

#include <CLI11.hpp>
#include <csignal>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>
#include <thread>

#include "weakstore/errors.hpp"
#include "weakstore/history_json.hpp"
#include "weakstore/isolation.hpp"
#include "weakstore/program_json.hpp"
#include "weakstore/server.hpp"
#include "weakstore/testkit/campaign.hpp"
#include "weakstore/testkit/microbench.hpp"

namespace {

using json = nlohmann::json;
using namespace weakstore;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitInput = 2;

struct StoreFlags {
  std::string isolation = "causal";
  bool latest_reads = false;
  std::uint32_t delay_ms = 0;
  std::uint64_t seed = 0;
  std::string default_value = "null";
};

void add_store_flags(CLI::App* cmd, StoreFlags& f) {
  cmd->add_option("--isolation", f.isolation, "read-committed | causal | serializability")
      ->envname("WEAKSTORE_ISOLATION")
      ->capture_default_str();
  cmd->add_flag("--latest-reads", f.latest_reads, "read only the latest valid write of each session")
      ->envname("WEAKSTORE_LATEST_READS");
  cmd->add_option("--delay-ms", f.delay_ms, "random delay up to K ms before each begin")
      ->envname("WEAKSTORE_DELAY_MS")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "random seed")->envname("WEAKSTORE_SEED")->capture_default_str();
  cmd->add_option("--default-value", f.default_value, "initial value of every key, as JSON")
      ->envname("WEAKSTORE_DEFAULT_VALUE")
      ->capture_default_str();
}

IsolationLevel parse_level(const std::string& name) {
  auto level = level_by_name(name);
  if (!level) throw CLI::ValidationError("--isolation", "unknown isolation level " + name);
  return *level;
}

// JSON text, or a bare string when it does not parse.
Value parse_default(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) return Value(text);
  return value_from_json(j);
}

StoreConfig store_config(const StoreFlags& f) {
  StoreConfig cfg;
  cfg.level = parse_level(f.isolation);
  cfg.latest_per_session = f.latest_reads;
  cfg.delay_max_ms = f.delay_ms;
  cfg.seed = f.seed;
  cfg.default_value = parse_default(f.default_value);
  return cfg;
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMalformedHistory, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json violation_to_json(const Violation& v) {
  json j{{"axiom", v.axiom},        {"key", v.key},         {"t1", to_string(v.t1)},
         {"t2", to_string(v.t2)},   {"alpha_txn", to_string(v.alpha_txn)}, {"message", v.message}};
  if (v.alpha_read) j["alpha_read"] = to_string(*v.alpha_read);
  json cycle = json::array();
  for (TxnId t : v.cycle) cycle.push_back(to_string(t));
  j["cycle"] = cycle;
  return j;
}

int cmd_check(const std::string& path, const std::string& isolation) {
  History h;
  try {
    h = parse_history(read_input(path));
  } catch (const Error& e) {
    std::cout << json{{"error", std::string(error_code_name(e.code()))}, {"message", e.what()}}.dump(2) << "\n";
    return kExitInput;
  }
  const IsolationLevel level = parse_level(isolation);
  SatisfactionResult r = satisfies(h, level);
  json out{{"level", level.display_name()}, {"satisfied", r.satisfied}};
  if (r.witness) {
    json order = json::array();
    for (TxnId t : r.witness->order) order.push_back(to_string(t));
    out["commit_order"] = order;
  }
  if (r.violation) out["violation"] = violation_to_json(*r.violation);
  std::cout << out.dump(2) << "\n";
  return r.satisfied ? kExitOk : kExitFailed;
}

int cmd_run(const std::string& path, const StoreFlags& flags, std::size_t iterations, bool per_iteration) {
  ProgramIR p;
  try {
    p = parse_program(read_input(path));
  } catch (const Error& e) {
    std::cout << json{{"error", std::string(error_code_name(e.code()))}, {"message", e.what()}}.dump(2) << "\n";
    return kExitInput;
  }
  testkit::RunOptions opts;
  opts.iterations = iterations;
  opts.check_histories = true;
  opts.keep_outcomes = per_iteration;
  const auto report = testkit::run_iterations(p, store_config(flags), opts);
  std::cout << testkit::report_to_json(report).dump(2) << "\n";
  return report.first_failure ? kExitFailed : kExitOk;
}

int cmd_emit_bench(const std::string& name, std::size_t threads, std::size_t ops, std::optional<std::uint64_t> seed) {
  auto b = testkit::benchmark_by_name(name);
  if (!b) {
    std::cerr << "unknown benchmark " << name << " (cart, stack, twitter, courseware)\n";
    return kExitInput;
  }
  testkit::Harness h;
  if (seed) {
    std::mt19937_64 rng(*seed);
    h = testkit::random_harness(*b, threads, ops, rng);
  } else {
    h = testkit::default_harness(*b);
  }
  std::cout << program_to_json(testkit::build_benchmark(*b, h)).dump(2) << "\n";
  return kExitOk;
}

int cmd_serve(const StoreFlags& flags, const std::string& bind, std::uint32_t begin_timeout_ms,
              const std::string& dump_path) {
  ServerConfig cfg;
  cfg.store = store_config(flags);
  cfg.begin_timeout = std::chrono::milliseconds(begin_timeout_ms);
  const auto [host, port] = weakstore::parse_bind_address(bind);

  // Signals are taken synchronously by this thread; the server runs in
  // another one.
  sigset_t sigs;
  sigemptyset(&sigs);
  sigaddset(&sigs, SIGINT);
  sigaddset(&sigs, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &sigs, nullptr);

  Server server(cfg);
  const int bound = server.bind(host, port);
  if (bound < 0) {
    std::cerr << "cannot bind " << bind << "\n";
    return kExitFailed;
  }
  std::cout << "listening on " << host << ":" << bound << " (" << cfg.store.level.display_name() << ")" << std::endl;
  std::thread worker([&] { server.listen(); });
  int sig = 0;
  sigwait(&sigs, &sig);
  server.stop();
  worker.join();
  if (!dump_path.empty()) {
    std::ofstream out(dump_path);
    out << history_to_json(server.store().history()).dump(2) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weakstore: a key-value store with weak isolation for testing applications"};
  app.require_subcommand(1);

  StoreFlags serve_flags;
  std::string bind = "127.0.0.1:8080";
  std::uint32_t begin_timeout_ms = 10'000;
  std::string dump_path;
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  add_store_flags(serve, serve_flags);
  serve->add_option("--bind", bind, "host:port")->envname("WEAKSTORE_BIND")->capture_default_str();
  serve->add_option("--begin-timeout-ms", begin_timeout_ms, "wait for a begin before answering 409")
      ->envname("WEAKSTORE_BEGIN_TIMEOUT_MS")
      ->capture_default_str();
  serve->add_option("--dump-history", dump_path, "write the final history here on shutdown");

  std::string history_path;
  std::string check_isolation = "causal";
  auto* check = app.add_subcommand("check", "check a history file against an isolation level");
  check->add_option("history", history_path, "history JSON file, or - for stdin")->required();
  check->add_option("--isolation", check_isolation, "read-committed | causal | serializability")
      ->envname("WEAKSTORE_ISOLATION")
      ->capture_default_str();

  StoreFlags run_flags;
  std::string program_path;
  std::size_t iterations = 1;
  bool per_iteration = false;
  auto* run = app.add_subcommand("run", "execute a program repeatedly and report assertion failures");
  run->add_option("program", program_path, "program JSON file, or - for stdin")->required();
  add_store_flags(run, run_flags);
  run->add_option("--iterations,-n", iterations, "number of runs")->capture_default_str();
  run->add_flag("--per-iteration", per_iteration, "include every run's outcome in the report");

  std::string bench_name;
  std::size_t threads = 3;
  std::size_t ops = 3;
  std::optional<std::uint64_t> harness_seed;
  auto* emit = app.add_subcommand("emit-bench", "print a microbenchmark program as JSON");
  emit->add_option("benchmark", bench_name, "cart | stack | twitter | courseware")->required();
  emit->add_option("--threads", threads, "threads of a random harness")->capture_default_str();
  emit->add_option("--ops", ops, "operations per thread of a random harness")->capture_default_str();
  emit->add_option("--harness-seed", harness_seed, "draw a random harness instead of the default one");

  try {
    app.parse(argc, argv);
    if (*serve) return cmd_serve(serve_flags, bind, begin_timeout_ms, dump_path);
    if (*check) return cmd_check(history_path, check_isolation);
    if (*run) return cmd_run(program_path, run_flags, iterations, per_iteration);
    if (*emit) return cmd_emit_bench(bench_name, threads, ops, harness_seed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
