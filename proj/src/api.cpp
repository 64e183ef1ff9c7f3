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

#include "announcer/api.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <regex>

#include "announcer/credentials.hpp"
#include "announcer/error.hpp"
#include "httplib.h"

namespace announcer::api {

namespace {

json optional_json(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }
json optional_json(const std::optional<Timestamp>& v) { return v ? json(format_iso8601(*v)) : json(nullptr); }

Response error(int status, const std::string& code, const std::string& message) {
  return {status, {{"code", code}, {"message", message}}};
}

std::string bearer(const std::string& header) {
  constexpr std::string_view prefix = "Bearer ";
  if (header.size() <= prefix.size() || header.compare(0, prefix.size(), prefix) != 0) return "";
  return header.substr(prefix.size());
}

std::string required_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) throw Error("BAD_FIELD", std::string(key) + " must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw Error("BAD_FIELD", std::string(key) + " must be a string");
  return it->get<std::string>();
}

std::vector<std::string> string_list(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_array()) throw Error("BAD_FIELD", std::string(key) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) throw Error("BAD_FIELD", std::string(key) + " must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

Date parse_date_field(const std::string& text, const char* what) {
  auto d = Date::parse(text);
  if (!d) throw Error("BAD_FIELD", std::string(what) + " must be YYYY-MM-DD");
  return *d;
}

bool has_role(Role role, std::initializer_list<Role> roles) {
  return std::find(roles.begin(), roles.end(), role) != roles.end();
}

void require_role(Role role, std::initializer_list<Role> roles, const std::string& what) {
  if (!has_role(role, roles)) throw Error("FORBIDDEN_ROLE", std::string(to_string(role)) + " may not " + what);
}

std::int64_t id_param(const std::string& text) {
  if (text.empty() || text.size() > 18 || !std::all_of(text.begin(), text.end(), ::isdigit))
    throw Error("NOT_FOUND", "no batch " + text);
  return std::stoll(text);
}

}  // namespace

// ------------------------------------------------------------------ tokens

SessionToken TokenStore::mint(const std::string& staff_id, Role role) {
  SessionToken t{random_hex(16), staff_id, role, clock_() + ttl_};
  std::lock_guard lock(mu_);
  tokens_[t.token] = t;
  return t;
}

std::optional<SessionToken> TokenStore::lookup(const std::string& token) {
  if (token.empty()) return std::nullopt;
  std::lock_guard lock(mu_);
  auto it = tokens_.find(token);
  if (it == tokens_.end()) return std::nullopt;
  if (clock_() >= it->second.expires_at) {
    tokens_.erase(it);
    return std::nullopt;
  }
  return it->second;
}

void TokenStore::revoke(const std::string& token) {
  std::lock_guard lock(mu_);
  tokens_.erase(token);
}

// ------------------------------------------------------------------ views

int status_for(const std::string& code) {
  static const std::map<std::string, int> table = {
      {"UNAUTHORIZED", 401},     {"BAD_CREDENTIALS", 401},  {"FORBIDDEN_ROLE", 403},
      {"NOT_YOUR_STUDENT", 403}, {"NOT_YOUR_COURSE", 403},  {"NOT_FOUND", 404},
      {"UNKNOWN_STUDENT", 404},  {"UNKNOWN_COURSE", 404},   {"UNKNOWN_STAFF", 404},
      {"METHOD_NOT_ALLOWED", 405}, {"WRONG_STATE", 409},    {"TICK_IN_PROGRESS", 409},
      {"BAD_FIELD", 400},        {"BAD_JSON", 400},         {"BAD_REFERENCE", 400},
      {"MISSING_BINDING", 400},  {"UNKNOWN_PLACEHOLDER", 400}, {"TOO_MANY_SEGMENTS", 400},
  };
  auto it = table.find(code);
  return it == table.end() ? 500 : it->second;
}

json to_json(const Student& s) {
  return {{"student_id", s.student_id}, {"name", s.name}, {"phone", s.phone}, {"email", s.email},
          {"program", s.program}};
}

json to_json(const OutboundMessage& m) {
  return {{"msg_id", m.msg_id},
          {"student_id", m.student_id},
          {"channel", to_string(m.channel)},
          {"dest", m.dest},
          {"subject", m.subject},
          {"body", m.body},
          {"status", to_string(m.status)},
          {"smsc_message_id", optional_json(m.smsc_message_id)},
          {"attempts", m.attempts},
          {"reason", m.reason ? json(to_string(*m.reason)) : json(nullptr)},
          {"reference", m.reference},
          {"error", optional_json(m.error)},
          {"sent_at", optional_json(m.sent_at)}};
}

json to_json(const DispatchReport& r) {
  return {{"pending", r.pending}, {"sent", r.sent},       {"delivered", r.delivered},
          {"failed", r.failed},   {"skipped", r.skipped}, {"total", r.total()}};
}

json to_json(const Batch& b, bool with_messages) {
  json j = {{"batch_id", b.batch_id},
            {"kind", to_string(b.kind)},
            {"state", to_string(b.state)},
            {"created_by", b.created_by},
            {"created_at", format_iso8601(b.created_at)},
            {"decided_at", optional_json(b.decided_at)},
            {"decided_by", optional_json(b.decided_by)},
            {"warning", optional_json(b.warning)}};
  if (with_messages) {
    j["report"] = to_json(DispatchReport::of(b.messages));
    j["messages"] = json::array();
    for (const auto& m : b.messages) j["messages"].push_back(to_json(m));
  }
  return j;
}

// ------------------------------------------------------------------ routing

struct Service::Ctx {
  const Request& req;
  std::vector<std::string> params;
  std::optional<SessionToken> who;
  std::optional<json> parsed;

  const json& body() {
    if (!parsed) {
      auto j = json::parse(req.body.empty() ? "{}" : req.body, nullptr, false);
      if (j.is_discarded() || !j.is_object()) throw Error("BAD_JSON", "request body must be a JSON object");
      parsed = std::move(j);
    }
    return *parsed;
  }
  std::optional<std::string> query(const std::string& key) const {
    auto it = req.query.find(key);
    return it == req.query.end() ? std::nullopt : std::optional<std::string>(it->second);
  }
  const SessionToken& user() const { return *who; }
};

struct Service::Route {
  EndpointDoc doc;
  std::regex pattern;
  Handler handler;
};

const std::vector<Service::Route>& Service::routes() {
  using R = Role;
  static const std::vector<Route> table = [] {
    struct Row {
      const char* method;
      const char* path;
      const char* summary;
      bool auth, mutating;
      std::vector<Role> roles;
      Handler handler;
    };
    const std::vector<Row> rows = {
        {"POST", "/api/login", "Exchange staff id and password for a bearer token", false, true, {}, &Service::login},
        {"POST", "/api/logout", "Revoke the caller's token", true, true, {}, &Service::logout},
        {"GET", "/api/me", "The signed-in staff member", true, false, {}, &Service::me},
        {"GET", "/api/students", "Students by ?course=C or ?lecturer=me|ID; lecturers see only their own", true,
         false, {}, &Service::students},
        {"GET", "/api/courses", "Timetabled courses with enrollment counts; lecturers see only their own", true,
         false, {}, &Service::courses},
        {"POST", "/api/announce", "Send {body} to {student_ids} or a {course_code}; approved immediately", true,
         true, {R::kLecturer}, &Service::announce},
        {"GET", "/api/scans/fees", "Overdue fee preview at ?as_of=YYYY-MM-DD (default today)", true, false,
         {R::kRecords, R::kAdmin}, &Service::scan_fees},
        {"GET", "/api/scans/loans", "Overdue loan preview at ?as_of=YYYY-MM-DD (default today)", true, false,
         {R::kLibrary, R::kAdmin}, &Service::scan_loans},
        {"POST", "/api/batches", "Create a batch from {kind, item_refs, channel_policy, as_of}", true, true,
         {R::kRecords, R::kLibrary, R::kAdmin}, &Service::create_batch},
        {"GET", "/api/batches", "List batches, optionally ?state=S", true, false, {}, &Service::list_batches},
        {"GET", "/api/batches/{id}", "One batch with its messages", true, false, {}, &Service::get_batch},
        {"POST", "/api/batches/{id}/approve", "Approve a pending batch; dispatch starts in the background", true,
         true, {R::kRecords, R::kLibrary, R::kAdmin}, &Service::approve},
        {"POST", "/api/batches/{id}/reject", "Reject a pending batch; it will never send", true, true,
         {R::kRecords, R::kLibrary, R::kAdmin}, &Service::reject},
        {"POST", "/api/autorun/{kind}/trigger", "Run the fees or library autorun now, optionally ?as_of=D", true,
         true, {R::kRecords, R::kLibrary, R::kAdmin}, &Service::trigger},
        {"GET", "/api/batches/{id}/report", "Dispatch report and per-message statuses", true, false, {},
         &Service::report},
    };
    std::vector<Route> out;
    for (const auto& r : rows) {
      std::string re = std::regex_replace(std::string(r.path), std::regex(R"(\{[a-z_]+\})"), "([^/]+)");
      out.push_back({EndpointDoc{r.method, r.path, r.summary, r.auth, r.mutating, r.roles}, std::regex(re),
                     r.handler});
    }
    return out;
  }();
  return table;
}

const std::vector<EndpointDoc>& Service::endpoints() {
  static const std::vector<EndpointDoc> docs = [] {
    std::vector<EndpointDoc> out;
    for (const auto& r : routes()) out.push_back(r.doc);
    return out;
  }();
  return docs;
}

Service::Service(Notifier& notifier, Dispatcher* dispatcher, Options options)
    : notifier_(notifier),
      dispatcher_(dispatcher),
      options_(std::move(options)),
      tokens_([&notifier] { return notifier.now(); }, options_.token_ttl),
      dummy_salt_(random_hex(16)),
      dummy_hash_(hash_password(random_hex(16), dummy_salt_)) {}

Service::~Service() { stop(); }

Response Service::handle(const Request& req) {
  try {
    bool path_known = false;
    for (const auto& route : routes()) {
      std::smatch m;
      if (!std::regex_match(req.path, m, route.pattern)) continue;
      path_known = true;
      if (route.doc.method != req.method) continue;
      Ctx ctx{req, {}, std::nullopt, std::nullopt};
      for (std::size_t i = 1; i < m.size(); ++i) ctx.params.push_back(m[i].str());
      if (route.doc.auth) {
        ctx.who = tokens_.lookup(bearer(req.authorization));
        if (!ctx.who) return error(401, "UNAUTHORIZED", "missing, unknown or expired token");
        const auto& roles = route.doc.roles;
        if (!roles.empty() && std::find(roles.begin(), roles.end(), ctx.who->role) == roles.end())
          return error(403, "FORBIDDEN_ROLE",
                       std::string(to_string(ctx.who->role)) + " may not call " + req.method + " " + route.doc.path);
      }
      return (this->*route.handler)(ctx);
    }
    if (path_known) return error(405, "METHOD_NOT_ALLOWED", req.method + " " + req.path);
    return error(404, "NOT_FOUND", "no endpoint " + req.path);
  } catch (const Error& e) {
    return error(status_for(e.code()), e.code(), e.detail().empty() ? e.code() : e.detail());
  } catch (const std::exception& e) {
    spdlog::error("{} {}: {}", req.method, req.path, e.what());
    return error(500, "INTERNAL", "internal error");
  }
}

// ------------------------------------------------------------------ handlers

Response Service::login(Ctx& ctx) {
  auto staff_id = required_string(ctx.body(), "staff_id");
  auto password = required_string(ctx.body(), "password");
  auto staff = notifier_.registry().staff(staff_id);
  // Unknown ids pay for a hash too, so timing does not reveal which ids exist.
  bool ok = staff ? verify_password(password, staff->password_hash, staff->salt)
                  : (verify_password(password, dummy_hash_, dummy_salt_) && false);
  if (!ok) return error(401, "BAD_CREDENTIALS", "invalid staff id or password");
  auto t = tokens_.mint(staff->staff_id, staff->role);
  return {200,
          {{"token", t.token},
           {"staff_id", t.staff_id},
           {"role", to_string(t.role)},
           {"expires_at", format_iso8601(t.expires_at)}}};
}

Response Service::logout(Ctx& ctx) {
  tokens_.revoke(ctx.user().token);
  return {200, {{"ok", true}}};
}

Response Service::me(Ctx& ctx) {
  auto staff = notifier_.registry().staff(ctx.user().staff_id);
  return {200,
          {{"staff_id", ctx.user().staff_id},
           {"name", staff ? staff->name : ""},
           {"role", to_string(ctx.user().role)},
           {"expires_at", format_iso8601(ctx.user().expires_at)}}};
}

Response Service::students(Ctx& ctx) {
  auto& reg = notifier_.registry();
  auto course = ctx.query("course");
  auto lecturer = ctx.query("lecturer");
  if (course && lecturer) throw Error("BAD_FIELD", "give course or lecturer, not both");
  const auto& self = ctx.user();
  if (lecturer && *lecturer == "me") lecturer = self.staff_id;

  std::vector<Student> list;
  if (self.role == Role::kLecturer) {
    if (lecturer && *lecturer != self.staff_id) throw Error("FORBIDDEN_ROLE", "lecturers see only their own students");
    if (course) {
      if (!reg.teaches(self.staff_id, *course)) throw Error("NOT_YOUR_COURSE", *course);
      list = reg.students_for_course(*course);
    } else {
      list = reg.students_for_lecturer(self.staff_id);
    }
  } else if (course) {
    list = reg.students_for_course(*course);
  } else if (lecturer) {
    list = reg.students_for_lecturer(*lecturer);
  } else {
    list = reg.students();
  }
  json out = json::array();
  for (const auto& s : list) out.push_back(to_json(s));
  return {200, {{"students", out}}};
}

Response Service::courses(Ctx& ctx) {
  auto& reg = notifier_.registry();
  const auto& self = ctx.user();
  auto rows = self.role == Role::kLecturer ? reg.timetable_for(self.staff_id) : reg.timetable();
  std::map<std::string, std::size_t> counts;
  for (const auto& e : reg.enrollments()) ++counts[e.course_code];
  json out = json::array();
  for (const auto& t : rows) {
    out.push_back({{"course_code", t.course_code},
                   {"lecturer_id", t.lecturer_id},
                   {"day_of_week", to_string(t.day)},
                   {"start_time", format_hhmm(t.start_minute)},
                   {"end_time", format_hhmm(t.end_minute)},
                   {"room", t.room},
                   {"students", counts[t.course_code]}});
  }
  return {200, {{"courses", out}}};
}

Response Service::announce(Ctx& ctx) {
  const auto& body = ctx.body();
  auto text = required_string(body, "body");
  auto course = optional_string(body, "course_code");
  bool has_ids = body.contains("student_ids");
  if (course.has_value() == has_ids) throw Error("BAD_FIELD", "give exactly one of student_ids or course_code");

  auto& reg = notifier_.registry();
  std::vector<std::string> ids;
  if (course) {
    if (!reg.teaches(ctx.user().staff_id, *course)) throw Error("NOT_YOUR_COURSE", *course);
    for (const auto& s : reg.students_for_course(*course)) ids.push_back(s.student_id);
  } else {
    ids = string_list(body, "student_ids");
  }
  auto batch = notifier_.announce(ctx.user().staff_id, ids, text);
  if (dispatcher_) dispatcher_->enqueue(batch.batch_id);
  return {201, to_json(batch, true)};
}

Date Service::as_of_param(const Ctx& ctx) const {
  auto q = ctx.query("as_of");
  return q ? parse_date_field(*q, "as_of") : notifier_.today();
}

Response Service::scan_fees(Ctx& ctx) {
  auto as_of = as_of_param(ctx);
  auto& reg = notifier_.registry();
  json items = json::array();
  for (const auto& r : notifier_.scan_fees(as_of)) {
    auto s = reg.student(r.fee.student_id);
    items.push_back({{"invoice_id", r.fee.invoice_id},
                     {"student_id", r.fee.student_id},
                     {"name", s ? s->name : ""},
                     {"amount_due", r.fee.amount_due.str()},
                     {"amount_paid", r.fee.amount_paid.str()},
                     {"balance", r.balance.str()},
                     {"due_date", r.fee.due_date.str()},
                     {"days_overdue", r.days_overdue}});
  }
  return {200, {{"as_of", as_of.str()}, {"items", items}}};
}

Response Service::scan_loans(Ctx& ctx) {
  auto as_of = as_of_param(ctx);
  auto& reg = notifier_.registry();
  json items = json::array();
  for (const auto& r : notifier_.scan_loans(as_of)) {
    auto s = reg.student(r.loan.student_id);
    items.push_back({{"loan_id", r.loan.loan_id},
                     {"student_id", r.loan.student_id},
                     {"name", s ? s->name : ""},
                     {"book_title", r.loan.book_title},
                     {"barcode", r.loan.barcode},
                     {"due_date", r.loan.due_date.str()},
                     {"days_overdue", r.days_overdue},
                     {"fine", r.fine.str()}});
  }
  return {200, {{"as_of", as_of.str()}, {"items", items}}};
}

Response Service::create_batch(Ctx& ctx) {
  const auto& body = ctx.body();
  auto kind_text = required_string(body, "kind");
  auto kind = parse_batch_kind(kind_text);
  if (!kind || *kind == BatchKind::kLecturerAnnounce)
    throw Error("BAD_FIELD", "kind must be FEES_MANUAL, FEES_AUTORUN or LIBRARY_AUTORUN");
  if (*kind == BatchKind::kLibraryAutorun)
    require_role(ctx.user().role, {Role::kLibrary, Role::kAdmin}, "create library batches");
  else
    require_role(ctx.user().role, {Role::kRecords, Role::kAdmin}, "create fee batches");
  auto refs = string_list(body, "item_refs");
  auto policy = notifier_.config().default_policy;
  if (auto p = optional_string(body, "channel_policy")) {
    auto parsed = parse_channel_policy(*p);
    if (!parsed) throw Error("BAD_FIELD", "channel_policy must be SMS_FIRST, EMAIL_FIRST or BOTH");
    policy = *parsed;
  }
  auto as_of = notifier_.today();
  if (auto d = optional_string(body, "as_of")) as_of = parse_date_field(*d, "as_of");
  auto batch = notifier_.batch_from_refs(*kind, refs, policy, ctx.user().staff_id, as_of);
  return {201, to_json(batch, true)};
}

Response Service::list_batches(Ctx& ctx) {
  std::optional<BatchState> state;
  if (auto s = ctx.query("state")) {
    state = parse_batch_state(*s);
    if (!state) throw Error("BAD_FIELD", "unknown state " + *s);
  }
  std::optional<std::string> owner;
  if (ctx.user().role == Role::kLecturer) owner = ctx.user().staff_id;
  json out = json::array();
  for (const auto& b : notifier_.batches(state, owner)) {
    auto j = to_json(b, false);
    j["report"] = to_json(notifier_.report(b.batch_id));
    out.push_back(std::move(j));
  }
  return {200, {{"batches", out}}};
}

Batch Service::visible_batch(Ctx& ctx) {
  auto id = id_param(ctx.params.at(0));
  auto b = notifier_.batch(id);
  if (!b || (ctx.user().role == Role::kLecturer && b->created_by != ctx.user().staff_id))
    throw Error("NOT_FOUND", "no batch " + std::to_string(id));
  return *b;
}

Response Service::get_batch(Ctx& ctx) { return {200, to_json(visible_batch(ctx), true)}; }

Response Service::decide(Ctx& ctx, Decision decision) {
  auto id = id_param(ctx.params.at(0));
  auto batch = notifier_.decide_batch(id, ctx.user().staff_id, decision);
  if (batch.state == BatchState::kApproved && dispatcher_) dispatcher_->enqueue(id);
  return {200, to_json(batch, true)};
}

Response Service::approve(Ctx& ctx) { return decide(ctx, Decision::kApprove); }
Response Service::reject(Ctx& ctx) { return decide(ctx, Decision::kReject); }

Response Service::trigger(Ctx& ctx) {
  auto kind = parse_autorun_kind(ctx.params.at(0));
  if (!kind) throw Error("NOT_FOUND", "no autorun " + ctx.params.at(0));
  if (*kind == AutorunKind::kFees)
    require_role(ctx.user().role, {Role::kRecords, Role::kAdmin}, "run the fees autorun");
  else
    require_role(ctx.user().role, {Role::kLibrary, Role::kAdmin}, "run the library autorun");
  auto now = notifier_.now();
  if (auto q = ctx.query("as_of")) {
    const auto& tz = notifier_.config().tz;
    now = tz.to_utc(parse_date_field(*q, "as_of"), tz.local_minutes(now));
  }
  auto batch = notifier_.autorun_tick(*kind, now);
  if (!batch) return {200, {{"batch", nullptr}, {"message", "nothing to send"}}};
  return {201, {{"batch", to_json(*batch, true)}}};
}

Response Service::report(Ctx& ctx) {
  auto b = visible_batch(ctx);
  json messages = json::array();
  for (const auto& m : b.messages) messages.push_back(to_json(m));
  return {200,
          {{"batch_id", b.batch_id},
           {"state", to_string(b.state)},
           {"report", to_json(DispatchReport::of(b.messages))},
           {"messages", messages}}};
}

// ------------------------------------------------------------------ docs

json Service::openapi() {
  json paths = json::object();
  for (const auto& e : endpoints()) {
    json op = {{"summary", e.summary}};
    json roles = json::array();
    for (auto r : e.roles) roles.push_back(to_string(r));
    op["x-roles"] = roles;
    op["x-mutating"] = e.mutating;
    op["security"] = e.auth ? json::array({{{"bearer", json::array()}}}) : json::array();
    json params = json::array();
    std::smatch m;
    std::string rest = e.path;
    static const std::regex param(R"(\{([a-z_]+)\})");
    while (std::regex_search(rest, m, param)) {
      params.push_back({{"name", m[1].str()}, {"in", "path"}, {"required", true}, {"schema", {{"type", "string"}}}});
      rest = m.suffix();
    }
    if (!params.empty()) op["parameters"] = params;
    json responses = {{"200", {{"description", "OK"}}}};
    if (e.mutating && e.path != "/api/login" && e.path != "/api/logout")
      responses["201"] = {{"description", "Created"}};
    if (e.auth) {
      responses["401"] = {{"description", "Missing, unknown or expired token"}};
      responses["403"] = {{"description", "FORBIDDEN_ROLE"}};
    } else {
      responses["401"] = {{"description", "BAD_CREDENTIALS"}};
    }
    responses["400"] = {{"description", "Malformed request"}};
    if (e.path.find("{id}") != std::string::npos) responses["404"] = {{"description", "No such batch"}};
    if (e.path.find("approve") != std::string::npos || e.path.find("reject") != std::string::npos ||
        e.path.find("trigger") != std::string::npos)
      responses["409"] = {{"description", "WRONG_STATE or TICK_IN_PROGRESS"}};
    op["responses"] = responses;
    std::string method = e.method == "GET" ? "get" : "post";
    paths[e.path][method] = op;
  }
  return {{"openapi", "3.0.3"},
          {"info",
           {{"title", "Announcer staff API"},
            {"version", "1.0.0"},
            {"description", "Errors are {code, message}. Authenticate with Authorization: Bearer <token>."}}},
          {"components", {{"securitySchemes", {{"bearer", {{"type", "http"}, {"scheme", "bearer"}}}}}}},
          {"paths", paths}};
}

// ------------------------------------------------------------------ transport

struct Service::Http {
  httplib::Server server;
  std::thread thread;
};

std::uint16_t Service::start(const std::string& host, std::uint16_t port) {
  if (http_) throw Error("LISTEN_FAILED", "already started");
  http_ = std::make_unique<Http>();
  auto& srv = http_->server;
  auto fn = [this](const httplib::Request& r, httplib::Response& res) {
    Request q{r.method, r.path, {}, r.get_header_value("Authorization"), r.body};
    for (const auto& [k, v] : r.params) q.query.emplace(k, v);
    auto out = handle(q);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  srv.Get("/api/.*", fn);
  srv.Post("/api/.*", fn);
  srv.set_payload_max_length(1 << 20);
  // httplib's default adds SO_REUSEPORT, which would let a second server share the port.
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  if (!options_.console_dir.empty() && !srv.set_mount_point("/", options_.console_dir))
    spdlog::warn("console_dir {} is not a directory; not serving it", options_.console_dir);
  int bound = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) {
    http_.reset();
    throw Error("LISTEN_FAILED", host + ":" + std::to_string(port));
  }
  http_->thread = std::thread([this] { http_->server.listen_after_bind(); });
  srv.wait_until_ready();
  spdlog::info("api listening on {}:{}", host, bound);
  return static_cast<std::uint16_t>(bound);
}

void Service::stop() {
  if (!http_) return;
  http_->server.stop();
  if (http_->thread.joinable()) http_->thread.join();
  http_.reset();
}

}  // namespace announcer::api
