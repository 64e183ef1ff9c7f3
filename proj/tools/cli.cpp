//
// Copyright (C) 2026 The Announcer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <signal.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <spdlog/spdlog.h>

#include "announcer/database.hpp"
#include "announcer/error.hpp"
#include "announcer/registry.hpp"
#include "announcer/smsc_sim.hpp"
#include "app.hpp"
#include "httplib.h"
#include "json.hpp"

namespace announcer::cli {
namespace {

using json = nlohmann::json;

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? v : fallback;
}

/// SIGINT/SIGTERM are blocked before any thread starts so sigwait sees them.
sigset_t block_shutdown_signals() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  return set;
}

void wait_for_shutdown(const sigset_t& set) {
  int sig = 0;
  sigwait(&set, &sig);
  spdlog::info("signal {}, shutting down", sig);
}

struct ApiReply {
  int status = 0;
  json body;
};

class ApiClient {
 public:
  ApiClient(std::string base, std::string token) : base_(std::move(base)), token_(std::move(token)) {}

  ApiReply call(const std::string& method, const std::string& path, const json& body = nullptr) {
    httplib::Client c(base_);
    c.set_connection_timeout(5);
    c.set_read_timeout(60);
    httplib::Headers h;
    if (!token_.empty()) h.emplace("Authorization", "Bearer " + token_);
    auto res = method == "GET" ? c.Get(path, h) : c.Post(path, h, body.is_null() ? "" : body.dump(), "application/json");
    if (!res) throw Error("API_UNREACHABLE", base_ + ": " + httplib::to_string(res.error()));
    auto j = json::parse(res->body, nullptr, false);
    if (j.is_discarded()) throw Error("API_UNREACHABLE", base_ + " answered " + std::to_string(res->status) + " without JSON");
    return {res->status, std::move(j)};
  }

 private:
  std::string base_;
  std::string token_;
};

std::string api_base(const std::string& flag, const std::optional<std::string>& config_path) {
  if (!flag.empty()) return flag;
  if (const char* v = std::getenv("ANNOUNCER_API"); v && *v) return v;
  auto path = Config::resolve_path(config_path);
  if (std::filesystem::exists(path)) {
    auto [host, port] = Config::load(path).listen_endpoint();
    return "http://" + host + ":" + std::to_string(port);
  }
  return "http://127.0.0.1:8080";
}

std::string describe(const json& b) {
  std::string s = "batch " + std::to_string(b["batch_id"].get<std::int64_t>()) + " " + b["kind"].get<std::string>() +
                  " " + b["state"].get<std::string>();
  if (b.contains("report")) {
    const auto& r = b["report"];
    s += ": " + std::to_string(r["total"].get<int>()) + " messages (pending " + std::to_string(r["pending"].get<int>()) +
         ", sent " + std::to_string(r["sent"].get<int>()) + ", delivered " + std::to_string(r["delivered"].get<int>()) +
         ", failed " + std::to_string(r["failed"].get<int>()) + ", skipped " + std::to_string(r["skipped"].get<int>()) + ")";
  }
  if (b.contains("warning") && b["warning"].is_string()) s += " [" + b["warning"].get<std::string>() + "]";
  return s;
}

struct Options {
  bool json_out = false;
  std::optional<std::string> config;
  std::string api;
  std::string token;
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  Options opt;

  int fail(const std::string& code, const std::string& message) {
    if (opt.json_out) out_ << json{{"code", code}, {"message", message}}.dump() << "\n";
    err_ << code << ": " << message << "\n";
    return 1;
  }

  /// Prints the reply; returns the exit code.
  int api(const std::string& method, const std::string& path, const json& body,
          const std::function<void(const json&)>& human) {
    ApiClient client(api_base(opt.api, opt.config), opt.token.empty() ? env_or("ANNOUNCER_TOKEN", "") : opt.token);
    auto reply = client.call(method, path, body);
    if (reply.status >= 400)
      return fail(reply.body.value("code", "HTTP_" + std::to_string(reply.status)), reply.body.value("message", ""));
    if (opt.json_out)
      out_ << reply.body.dump() << "\n";
    else
      human(reply.body);
    return 0;
  }

  int serve() {
    auto cfg = Config::load(Config::resolve_path(opt.config));
    auto signals = block_shutdown_signals();
    App app(cfg);
    auto port = app.start();
    if (opt.json_out)
      out_ << json{{"listening", port}}.dump() << std::endl;
    else
      out_ << "serving on port " << port << std::endl;
    wait_for_shutdown(signals);
    app.stop();
    return 0;
  }

  int simsc(sim::SimConfig cfg, const std::vector<std::string>& accounts, const std::string& ledger_path) {
    if (!accounts.empty()) {
      cfg.accounts.clear();
      for (const auto& a : accounts) {
        auto colon = a.find(':');
        if (colon == std::string::npos) return fail("BAD_CONFIG", "--account wants SYSTEM_ID:PASSWORD, got " + a);
        cfg.accounts.emplace_back(a.substr(0, colon), a.substr(colon + 1));
      }
    }
    auto signals = block_shutdown_signals();
    auto sim = sim::SmscSim::run(cfg);
    // stdout carries only the ledger, as JSON lines, once the simulator stops.
    if (opt.json_out)
      err_ << json{{"listening", sim->port()}}.dump() << std::endl;
    else
      err_ << "smsc simulator on " << cfg.host << ":" << sim->port() << std::endl;
    wait_for_shutdown(signals);
    sim->stop();
    auto lines = sim::ledger_json_lines(sim->ledger());
    out_ << lines << std::flush;
    if (!ledger_path.empty()) {
      std::ofstream f(ledger_path);
      f << lines;
      if (!f) return fail("IO_ERROR", "cannot write " + ledger_path);
    }
    return 0;
  }

  int import(const std::string& kind_text, const std::string& file) {
    auto kind = parse_import_kind(kind_text);
    if (!kind) return fail("BAD_FIELD", "unknown kind " + kind_text);
    auto cfg = Config::load(Config::resolve_path(opt.config));
    Registry registry(std::make_shared<Database>(cfg.db_path), cfg.default_country);
    if (!std::filesystem::exists(file)) return fail("FILE_NOT_FOUND", file);
    auto report = registry.import_csv(*kind, file);
    if (opt.json_out) {
      json rejected = json::array();
      for (const auto& r : report.rejected)
        rejected.push_back({{"line", r.line}, {"code", r.code}, {"column", r.column}, {"message", r.message}});
      out_ << json{{"accepted", report.accepted}, {"rejected", rejected}}.dump() << "\n";
    } else {
      out_ << "accepted: " << report.accepted << "\n";
      if (!report.rejected.empty()) out_ << "rejected: " << report.rejected.size() << "\n";
      for (const auto& r : report.rejected) {
        out_ << "  line " << r.line << ": " << r.code;
        if (!r.column.empty()) out_ << " (" << r.column << ")";
        out_ << " " << r.message << "\n";
      }
    }
    if (!report.rejected.empty()) {
      err_ << "IMPORT_REJECTED: " << report.rejected.size() << " rows rejected\n";
      return 1;
    }
    return 0;
  }

  int login(const std::string& staff_id, std::string password) {
    if (password.empty()) password = env_or("ANNOUNCER_PASSWORD", "");
    if (password.empty()) std::getline(std::cin, password);
    return api("POST", "/api/login", {{"staff_id", staff_id}, {"password", password}},
               [&](const json& j) { out_ << j["token"].get<std::string>() << "\n"; });
  }

  int autorun(const std::string& kind, const std::string& as_of) {
    std::string path = "/api/autorun/" + kind + "/trigger";
    if (!as_of.empty()) path += "?as_of=" + as_of;
    return api("POST", path, nullptr, [&](const json& j) {
      if (j["batch"].is_null())
        out_ << "no batch: nothing to send\n";
      else
        out_ << describe(j["batch"]) << "\n";
    });
  }

  int batches(const std::string& state) {
    std::string path = "/api/batches";
    if (!state.empty()) path += "?state=" + state;
    return api("GET", path, nullptr, [&](const json& j) {
      for (const auto& b : j["batches"])
        out_ << describe(b) << " by " << b["created_by"].get<std::string>() << " at "
             << b["created_at"].get<std::string>() << "\n";
      if (j["batches"].empty()) out_ << "no batches\n";
    });
  }

  int decide(std::int64_t id, const std::string& verb) {
    return api("POST", "/api/batches/" + std::to_string(id) + "/" + verb, nullptr,
               [&](const json& j) { out_ << describe(j) << "\n"; });
  }

  int report(std::int64_t id) {
    return api("GET", "/api/batches/" + std::to_string(id) + "/report", nullptr, [&](const json& j) {
      const auto& r = j["report"];
      out_ << "batch " << j["batch_id"] << " " << j["state"].get<std::string>() << ": total " << r["total"]
           << ", pending " << r["pending"] << ", sent " << r["sent"] << ", delivered " << r["delivered"] << ", failed "
           << r["failed"] << ", skipped " << r["skipped"] << "\n";
      for (const auto& m : j["messages"]) {
        out_ << "  " << m["msg_id"] << " " << m["student_id"].get<std::string>() << " "
             << m["channel"].get<std::string>() << " " << m["dest"].get<std::string>() << " "
             << m["status"].get<std::string>();
        if (m["reason"].is_string()) out_ << " " << m["reason"].get<std::string>();
        if (m["error"].is_string()) out_ << " " << m["error"].get<std::string>();
        out_ << "\n";
      }
    });
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Runner r(out, err);
  CLI::App app{"Campus SMS and email announcer", "announcer"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_flag("--json", r.opt.json_out, "Machine-readable JSON output");
  app.add_option("--config", r.opt.config, "Config file (default $ANNOUNCER_CONFIG, then ./announcer.conf)");
  app.add_option("--api", r.opt.api, "API base URL (default $ANNOUNCER_API, then the config's listen_addr)");
  app.add_option("--token", r.opt.token, "Bearer token (default $ANNOUNCER_TOKEN)");

  std::function<int()> action;

  auto* serve = app.add_subcommand("serve", "Run the API, scheduler and SMPP session");
  serve->callback([&] { action = [&] { return r.serve(); }; });

  sim::SimConfig sim_cfg;
  sim_cfg.port = 2775;
  std::vector<std::string> accounts;
  std::string ledger_path;
  auto* simsc = app.add_subcommand("simsc", "Run the SMSC simulator");
  simsc->add_option("--port", sim_cfg.port, "Listen port (0 picks one)");
  simsc->add_option("--host", sim_cfg.host, "Listen address");
  simsc->add_option("--seed", sim_cfg.rng_seed, "RNG seed");
  simsc->add_option("--drop-resp", sim_cfg.drop_resp_rate, "Probability of dropping a submit_sm_resp")
      ->check(CLI::Range(0.0, 1.0));
  simsc->add_option("--account", accounts, "SYSTEM_ID:PASSWORD (repeatable; default announcer:secret)");
  simsc->add_option("--receipt-delay", sim_cfg.receipt_delay_ms, "Milliseconds before a delivery receipt");
  simsc->add_option("--latency-min", sim_cfg.ack_latency_min_ms, "Minimum response latency, ms");
  simsc->add_option("--latency-max", sim_cfg.ack_latency_max_ms, "Maximum response latency, ms");
  simsc->add_option("--ledger", ledger_path, "Also write the ledger to this file on exit");
  simsc->callback([&] { action = [&] { return r.simsc(sim_cfg, accounts, ledger_path); }; });

  std::string kind, file;
  auto* import = app.add_subcommand("import", "Import a CSV file straight into the database");
  import->add_option("--kind", kind, "students|staff|timetable|enrollments|fees|loans")->required();
  import->add_option("--file", file, "CSV file")->required();
  import->callback([&] { action = [&] { return r.import(kind, file); }; });

  std::string staff_id, password;
  auto* login = app.add_subcommand("login", "Print a bearer token for ANNOUNCER_TOKEN");
  login->add_option("staff_id", staff_id, "Staff id")->required();
  login->add_option("--password", password, "Password (default $ANNOUNCER_PASSWORD, then stdin)");
  login->callback([&] { action = [&] { return r.login(staff_id, password); }; });

  std::string as_of;
  auto* autorun = app.add_subcommand("autorun", "Run an autorun now and print the new batch");
  autorun->add_option("--kind", kind, "fees|library")->required()->check(CLI::IsMember({"fees", "library"}));
  autorun->add_option("--as-of", as_of, "Scan date YYYY-MM-DD (default today)");
  autorun->callback([&] { action = [&] { return r.autorun(kind, as_of); }; });

  std::string state;
  auto* batches = app.add_subcommand("batches", "List batches");
  batches->add_option("--state", state, "Only batches in this state");
  batches->callback([&] { action = [&] { return r.batches(state); }; });

  std::int64_t id = 0;
  for (const char* verb : {"approve", "reject", "report"}) {
    auto* sub = app.add_subcommand(verb, std::string(verb) == "report" ? "Dispatch report for a batch"
                                                                      : std::string("Mark a batch ") + verb + "d");
    sub->add_option("id", id, "Batch id")->required();
    sub->callback([&, v = std::string(verb)] {
      action = [&, v] { return v == "report" ? r.report(id) : r.decide(id, v); };
    });
  }

  auto* openapi = app.add_subcommand("openapi", "Print the OpenAPI description of the HTTP API");
  openapi->callback([&] {
    action = [&] {
      out << api::Service::openapi().dump(2) << "\n";
      return 0;
    };
  });

  std::vector<std::string> argv_store = {"announcer"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    return action();
  } catch (const Error& e) {
    return r.fail(e.code(), e.detail());
  } catch (const std::exception& e) {
    return r.fail("INTERNAL", e.what());
  }
}

}  // namespace announcer::cli
