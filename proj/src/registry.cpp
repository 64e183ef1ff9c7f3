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

#include "announcer/registry.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "announcer/credentials.hpp"
#include "announcer/csv.hpp"
#include "announcer/error.hpp"

namespace announcer {
namespace {

class FieldError : public Error {
 public:
  FieldError(std::string code, std::string column, const std::string& message)
      : Error(std::move(code), column.empty() ? message : "column " + column + ": " + message),
        column_(std::move(column)),
        message_(message) {}
  const std::string& column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::string column_;
  std::string message_;
};

[[noreturn]] void bad_field(const std::string& column, const std::string& message) {
  throw FieldError("BAD_FIELD", column, message);
}

[[noreturn]] void dangling(const std::string& column, const std::string& value) {
  throw FieldError("DANGLING_REFERENCE", column, "unknown " + column + " '" + value + "'");
}

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto b = static_cast<unsigned char>(s[i]);
    int len = b < 0x80 ? 1 : (b & 0xE0) == 0xC0 ? 2 : (b & 0xF0) == 0xE0 ? 3 : (b & 0xF8) == 0xF0 ? 4 : 0;
    if (len == 0 || (len == 2 && b < 0xC2) || i + len > s.size()) return false;
    for (int k = 1; k < len; ++k)
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
    i += len;
  }
  return true;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void require_nonempty(const std::string& column, const std::string& value) {
  if (value.empty()) bad_field(column, "must not be empty");
}

Date require_date(const std::string& column, const std::string& value) {
  auto d = Date::parse(value);
  if (!d) bad_field(column, "expected YYYY-MM-DD, got '" + value + "'");
  return *d;
}

Money require_money(const std::string& column, const std::string& value) {
  auto m = Money::parse(value);
  if (!m) bad_field(column, "expected a non-negative amount with at most 2 decimals, got '" + value + "'");
  return *m;
}

Student read_student(const Statement& st) {
  return Student{st.text(0), st.text(1), st.text(2), st.text(3), st.text(4)};
}

StaffUser read_staff(const Statement& st) {
  return StaffUser{st.text(0), st.text(1), parse_role(st.text(2)).value_or(Role::kLecturer), st.text(3),
                   st.text(4)};
}

TimetableEntry read_timetable(const Statement& st) {
  return TimetableEntry{st.text(0),
                        st.text(1),
                        static_cast<Weekday>(st.int64(2)),
                        static_cast<int>(st.int64(3)),
                        static_cast<int>(st.int64(4)),
                        st.text(5)};
}

FeeRecord read_fee(const Statement& st) {
  return FeeRecord{st.text(0), st.text(1), Money::cents(st.int64(2)), Money::cents(st.int64(3)),
                   *Date::parse(st.text(4))};
}

LoanRecord read_loan(const Statement& st) {
  std::optional<Date> returned;
  if (auto r = st.optional_text(5)) returned = Date::parse(*r);
  return LoanRecord{st.text(0), st.text(1), st.text(2), st.text(3), *Date::parse(st.text(4)), returned};
}

constexpr const char* kStudentCols = "student_id, name, phone, email, program";
constexpr const char* kStaffCols = "staff_id, name, role, password_hash, salt";
constexpr const char* kTimetableCols = "course_code, lecturer_id, day_of_week, start_minute, end_minute, room";
constexpr const char* kFeeCols = "invoice_id, student_id, amount_due_cents, amount_paid_cents, due_date";
constexpr const char* kLoanCols = "loan_id, student_id, book_title, barcode, due_date, returned_date";

}  // namespace

const char* to_string(Role role) {
  switch (role) {
    case Role::kLecturer: return "LECTURER";
    case Role::kRecords: return "RECORDS";
    case Role::kLibrary: return "LIBRARY";
    case Role::kAdmin: return "ADMIN";
  }
  return "LECTURER";
}

std::optional<Role> parse_role(std::string_view text) {
  auto u = upper(text);
  if (u == "LECTURER") return Role::kLecturer;
  if (u == "RECORDS") return Role::kRecords;
  if (u == "LIBRARY") return Role::kLibrary;
  if (u == "ADMIN") return Role::kAdmin;
  return std::nullopt;
}

const char* to_string(Weekday day) {
  static constexpr const char* kNames[] = {"MON", "TUE", "WED", "THU", "FRI", "SAT", "SUN"};
  return kNames[static_cast<int>(day)];
}

std::optional<Weekday> parse_weekday(std::string_view text) {
  auto u = upper(text);
  for (int i = 0; i < 7; ++i)
    if (u == to_string(static_cast<Weekday>(i))) return static_cast<Weekday>(i);
  return std::nullopt;
}

std::optional<ImportKind> parse_import_kind(std::string_view text) {
  auto u = upper(text);
  if (u == "STUDENTS") return ImportKind::kStudents;
  if (u == "STAFF") return ImportKind::kStaff;
  if (u == "TIMETABLE") return ImportKind::kTimetable;
  if (u == "ENROLLMENTS") return ImportKind::kEnrollments;
  if (u == "FEES") return ImportKind::kFees;
  if (u == "LOANS") return ImportKind::kLoans;
  return std::nullopt;
}

const char* to_string(ImportKind kind) {
  switch (kind) {
    case ImportKind::kStudents: return "STUDENTS";
    case ImportKind::kStaff: return "STAFF";
    case ImportKind::kTimetable: return "TIMETABLE";
    case ImportKind::kEnrollments: return "ENROLLMENTS";
    case ImportKind::kFees: return "FEES";
    case ImportKind::kLoans: return "LOANS";
  }
  return "";
}

const char* csv_header(ImportKind kind) {
  switch (kind) {
    case ImportKind::kStudents: return "student_id,name,phone,email,program";
    case ImportKind::kStaff: return "staff_id,name,role,password";
    case ImportKind::kTimetable: return "course_code,lecturer_id,day_of_week,start_time,end_time,room";
    case ImportKind::kEnrollments: return "course_code,student_id";
    case ImportKind::kFees: return "invoice_id,student_id,amount_due,amount_paid,due_date";
    case ImportKind::kLoans: return "loan_id,student_id,book_title,barcode,due_date,returned_date";
  }
  return "";
}

bool is_e164(std::string_view phone) {
  if (phone.size() < 9 || phone.size() > 16 || phone[0] != '+') return false;
  return std::all_of(phone.begin() + 1, phone.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string normalize_phone(std::string_view raw, std::string_view default_country) {
  std::string s;
  for (char c : raw)
    if (c != ' ' && c != '-' && c != '(' && c != ')') s += c;
  std::string out;
  if (!s.empty() && s[0] == '+') {
    out = s;
  } else if (!s.empty() && s[0] == '0') {
    out = std::string(default_country) + s.substr(1);
  } else {
    out = "+" + s;
  }
  if (!is_e164(out)) throw Error("UNPARSEABLE_PHONE", "'" + std::string(raw) + "'");
  return out;
}

Registry::Registry(std::shared_ptr<Database> db, std::string default_country)
    : db_(std::move(db)), default_country_(std::move(default_country)) {
  create_schema();
}

void Registry::create_schema() {
  db_->write([&] {
    db_->exec(R"sql(
      CREATE TABLE IF NOT EXISTS students (
        student_id TEXT PRIMARY KEY, name TEXT NOT NULL, phone TEXT NOT NULL,
        email TEXT NOT NULL, program TEXT NOT NULL);
      CREATE TABLE IF NOT EXISTS staff (
        staff_id TEXT PRIMARY KEY, name TEXT NOT NULL, role TEXT NOT NULL,
        password_hash TEXT NOT NULL, salt TEXT NOT NULL);
      CREATE TABLE IF NOT EXISTS timetable (
        course_code TEXT NOT NULL, lecturer_id TEXT NOT NULL, day_of_week INTEGER NOT NULL,
        start_minute INTEGER NOT NULL, end_minute INTEGER NOT NULL, room TEXT NOT NULL,
        PRIMARY KEY (course_code, day_of_week, start_minute));
      CREATE TABLE IF NOT EXISTS enrollments (
        course_code TEXT NOT NULL, student_id TEXT NOT NULL,
        PRIMARY KEY (course_code, student_id));
      CREATE TABLE IF NOT EXISTS fees (
        invoice_id TEXT PRIMARY KEY, student_id TEXT NOT NULL,
        amount_due_cents INTEGER NOT NULL, amount_paid_cents INTEGER NOT NULL, due_date TEXT NOT NULL);
      CREATE TABLE IF NOT EXISTS loans (
        loan_id TEXT PRIMARY KEY, student_id TEXT NOT NULL, book_title TEXT NOT NULL,
        barcode TEXT NOT NULL, due_date TEXT NOT NULL, returned_date TEXT);
      CREATE INDEX IF NOT EXISTS timetable_by_lecturer ON timetable (lecturer_id);
    )sql");
  });
}

ImportReport Registry::import_csv(ImportKind kind, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IO_ERROR", "cannot open " + path.string());
  return import_csv(kind, in);
}

ImportReport Registry::import_csv(ImportKind kind, std::istream& in) {
  CsvReader reader(in);
  auto header = reader.next();
  std::string expected = csv_header(kind);
  std::string got;
  if (header) {
    for (std::size_t i = 0; i < header->fields.size(); ++i) got += (i ? "," : "") + header->fields[i];
  }
  if (got != expected) throw Error("MISSING_HEADER", "expected '" + expected + "', got '" + got + "'");

  const std::size_t columns = header->fields.size();
  ImportReport report;
  db_->write([&] {
    while (auto rec = reader.next()) {
      if (rec->fields.size() == 1 && rec->fields[0].empty()) continue;  // blank line
      try {
        if (rec->unterminated_quote) bad_field("", "unterminated quoted field");
        if (rec->fields.size() != columns)
          bad_field("", "expected " + std::to_string(columns) + " fields, got " + std::to_string(rec->fields.size()));
        for (std::size_t i = 0; i < columns; ++i)
          if (!valid_utf8(rec->fields[i])) bad_field(header->fields[i], "not valid UTF-8");
        apply_row(kind, rec->fields);
        ++report.accepted;
      } catch (const FieldError& e) {
        report.rejected.push_back({rec->line, e.code(), e.column(), e.message()});
      } catch (const Error& e) {
        if (e.code() == "DB_ERROR") throw;
        report.rejected.push_back({rec->line, "BAD_FIELD", "", e.what()});
      }
    }
  });
  return report;
}

void Registry::apply_row(ImportKind kind, const std::vector<std::string>& f) {
  switch (kind) {
    case ImportKind::kStudents:
      upsert_student(Student{f[0], f[1], f[2], f[3], f[4]});
      break;
    case ImportKind::kStaff: {
      auto role = parse_role(f[2]);
      if (!role) bad_field("role", "expected LECTURER, RECORDS, LIBRARY or ADMIN");
      upsert_staff(f[0], f[1], *role, f[3]);
      break;
    }
    case ImportKind::kTimetable: {
      auto day = parse_weekday(f[2]);
      if (!day) bad_field("day_of_week", "expected MON..SUN, got '" + f[2] + "'");
      auto start = parse_hhmm(f[3]);
      if (!start) bad_field("start_time", "expected HH:MM");
      auto end = parse_hhmm(f[4]);
      if (!end) bad_field("end_time", "expected HH:MM");
      upsert_timetable(TimetableEntry{f[0], f[1], *day, *start, *end, f[5]});
      break;
    }
    case ImportKind::kEnrollments:
      upsert_enrollment(Enrollment{f[0], f[1]});
      break;
    case ImportKind::kFees:
      upsert_fee(FeeRecord{f[0], f[1], require_money("amount_due", f[2]), require_money("amount_paid", f[3]),
                           require_date("due_date", f[4])});
      break;
    case ImportKind::kLoans: {
      std::optional<Date> returned;
      if (!f[5].empty()) returned = require_date("returned_date", f[5]);
      upsert_loan(LoanRecord{f[0], f[1], f[2], f[3], require_date("due_date", f[4]), returned});
      break;
    }
  }
}

void Registry::upsert_student(Student s) {
  require_nonempty("student_id", s.student_id);
  if (!s.phone.empty()) {
    try {
      s.phone = normalize_phone(s.phone, default_country_);
    } catch (const Error&) {
      bad_field("phone", "unparseable phone '" + s.phone + "'");
    }
  }
  if (!s.email.empty() && std::count(s.email.begin(), s.email.end(), '@') != 1)
    bad_field("email", "must contain exactly one '@'");
  db_->write([&] {
    db_->prepare(R"sql(INSERT INTO students (student_id, name, phone, email, program) VALUES (?, ?, ?, ?, ?)
                       ON CONFLICT (student_id) DO UPDATE SET name = excluded.name, phone = excluded.phone,
                       email = excluded.email, program = excluded.program)sql")
        .bind_all(s.student_id, s.name, s.phone, s.email, s.program)
        .run();
  });
}

void Registry::upsert_staff(const std::string& staff_id, const std::string& name, Role role,
                            const std::string& password) {
  require_nonempty("staff_id", staff_id);
  require_nonempty("password", password);
  db_->write([&] {
    // Keep the existing salt and hash when the password is unchanged, so
    // re-importing the same export leaves stored values untouched.
    auto existing = staff(staff_id);
    std::string salt, hash;
    if (existing && verify_password(password, existing->password_hash, existing->salt)) {
      salt = existing->salt;
      hash = existing->password_hash;
    } else {
      salt = random_hex(16);
      hash = hash_password(password, salt);
    }
    db_->prepare(R"sql(INSERT INTO staff (staff_id, name, role, password_hash, salt) VALUES (?, ?, ?, ?, ?)
                       ON CONFLICT (staff_id) DO UPDATE SET name = excluded.name, role = excluded.role,
                       password_hash = excluded.password_hash, salt = excluded.salt)sql")
        .bind_all(staff_id, name, std::string(to_string(role)), hash, salt)
        .run();
  });
}

void Registry::upsert_timetable(const TimetableEntry& e) {
  require_nonempty("course_code", e.course_code);
  if (e.start_minute >= e.end_minute) bad_field("end_time", "must be after start_time");
  db_->write([&] {
    if (!staff(e.lecturer_id)) dangling("lecturer_id", e.lecturer_id);
    db_->prepare(R"sql(INSERT INTO timetable (course_code, lecturer_id, day_of_week, start_minute, end_minute, room)
                       VALUES (?, ?, ?, ?, ?, ?)
                       ON CONFLICT (course_code, day_of_week, start_minute) DO UPDATE SET
                       lecturer_id = excluded.lecturer_id, end_minute = excluded.end_minute, room = excluded.room)sql")
        .bind_all(e.course_code, e.lecturer_id, static_cast<int>(e.day), e.start_minute, e.end_minute, e.room)
        .run();
  });
}

void Registry::upsert_enrollment(const Enrollment& e) {
  require_nonempty("course_code", e.course_code);
  db_->write([&] {
    if (!student(e.student_id)) dangling("student_id", e.student_id);
    db_->prepare("INSERT OR IGNORE INTO enrollments (course_code, student_id) VALUES (?, ?)")
        .bind_all(e.course_code, e.student_id)
        .run();
  });
}

void Registry::upsert_fee(const FeeRecord& f) {
  require_nonempty("invoice_id", f.invoice_id);
  if (f.amount_due.cents() < 0) bad_field("amount_due", "must be >= 0");
  if (f.amount_paid.cents() < 0) bad_field("amount_paid", "must be >= 0");
  db_->write([&] {
    if (!student(f.student_id)) dangling("student_id", f.student_id);
    db_->prepare(R"sql(INSERT INTO fees (invoice_id, student_id, amount_due_cents, amount_paid_cents, due_date)
                       VALUES (?, ?, ?, ?, ?)
                       ON CONFLICT (invoice_id) DO UPDATE SET student_id = excluded.student_id,
                       amount_due_cents = excluded.amount_due_cents,
                       amount_paid_cents = excluded.amount_paid_cents, due_date = excluded.due_date)sql")
        .bind_all(f.invoice_id, f.student_id, f.amount_due.cents(), f.amount_paid.cents(), f.due_date.str())
        .run();
  });
}

void Registry::upsert_loan(const LoanRecord& l) {
  require_nonempty("loan_id", l.loan_id);
  db_->write([&] {
    if (!student(l.student_id)) dangling("student_id", l.student_id);
    std::optional<std::string> returned;
    if (l.returned_date) returned = l.returned_date->str();
    db_->prepare(R"sql(INSERT INTO loans (loan_id, student_id, book_title, barcode, due_date, returned_date)
                       VALUES (?, ?, ?, ?, ?, ?)
                       ON CONFLICT (loan_id) DO UPDATE SET student_id = excluded.student_id,
                       book_title = excluded.book_title, barcode = excluded.barcode,
                       due_date = excluded.due_date, returned_date = excluded.returned_date)sql")
        .bind_all(l.loan_id, l.student_id, l.book_title, l.barcode, l.due_date.str(), returned)
        .run();
  });
}

std::optional<Student> Registry::student(std::string_view id) const {
  return db_->read([&]() -> std::optional<Student> {
    auto st = db_->prepare(std::string("SELECT ") + kStudentCols + " FROM students WHERE student_id = ?");
    st.bind(1, id);
    if (st.step()) return read_student(st);
    return std::nullopt;
  });
}

std::vector<Student> Registry::students() const {
  return db_->read([&] {
    std::vector<Student> out;
    auto st = db_->prepare(std::string("SELECT ") + kStudentCols + " FROM students ORDER BY student_id");
    while (st.step()) out.push_back(read_student(st));
    return out;
  });
}

std::optional<StaffUser> Registry::staff(std::string_view id) const {
  return db_->read([&]() -> std::optional<StaffUser> {
    auto st = db_->prepare(std::string("SELECT ") + kStaffCols + " FROM staff WHERE staff_id = ?");
    st.bind(1, id);
    if (st.step()) return read_staff(st);
    return std::nullopt;
  });
}

std::vector<StaffUser> Registry::all_staff() const {
  return db_->read([&] {
    std::vector<StaffUser> out;
    auto st = db_->prepare(std::string("SELECT ") + kStaffCols + " FROM staff ORDER BY staff_id");
    while (st.step()) out.push_back(read_staff(st));
    return out;
  });
}

std::vector<TimetableEntry> Registry::timetable() const {
  return db_->read([&] {
    std::vector<TimetableEntry> out;
    auto st = db_->prepare(std::string("SELECT ") + kTimetableCols +
                           " FROM timetable ORDER BY course_code, day_of_week, start_minute");
    while (st.step()) out.push_back(read_timetable(st));
    return out;
  });
}

std::vector<TimetableEntry> Registry::timetable_for(std::string_view lecturer_id) const {
  return db_->read([&] {
    std::vector<TimetableEntry> out;
    auto st = db_->prepare(std::string("SELECT ") + kTimetableCols +
                           " FROM timetable WHERE lecturer_id = ? ORDER BY day_of_week, start_minute");
    st.bind(1, lecturer_id);
    while (st.step()) out.push_back(read_timetable(st));
    return out;
  });
}

std::vector<Enrollment> Registry::enrollments() const {
  return db_->read([&] {
    std::vector<Enrollment> out;
    auto st = db_->prepare("SELECT course_code, student_id FROM enrollments ORDER BY course_code, student_id");
    while (st.step()) out.push_back(Enrollment{st.text(0), st.text(1)});
    return out;
  });
}

std::vector<FeeRecord> Registry::fees() const {
  return db_->read([&] {
    std::vector<FeeRecord> out;
    auto st = db_->prepare(std::string("SELECT ") + kFeeCols + " FROM fees ORDER BY student_id, invoice_id");
    while (st.step()) out.push_back(read_fee(st));
    return out;
  });
}

std::optional<FeeRecord> Registry::fee(std::string_view invoice_id) const {
  return db_->read([&]() -> std::optional<FeeRecord> {
    auto st = db_->prepare(std::string("SELECT ") + kFeeCols + " FROM fees WHERE invoice_id = ?");
    st.bind(1, invoice_id);
    if (st.step()) return read_fee(st);
    return std::nullopt;
  });
}

std::vector<LoanRecord> Registry::loans() const {
  return db_->read([&] {
    std::vector<LoanRecord> out;
    auto st = db_->prepare(std::string("SELECT ") + kLoanCols + " FROM loans ORDER BY student_id, loan_id");
    while (st.step()) out.push_back(read_loan(st));
    return out;
  });
}

std::optional<LoanRecord> Registry::loan(std::string_view loan_id) const {
  return db_->read([&]() -> std::optional<LoanRecord> {
    auto st = db_->prepare(std::string("SELECT ") + kLoanCols + " FROM loans WHERE loan_id = ?");
    st.bind(1, loan_id);
    if (st.step()) return read_loan(st);
    return std::nullopt;
  });
}

std::vector<Student> Registry::students_for_lecturer(std::string_view lecturer_id) const {
  return db_->read([&] {
    if (!staff(lecturer_id)) throw Error("UNKNOWN_STAFF", std::string(lecturer_id));
    std::vector<Student> out;
    auto st = db_->prepare(R"sql(
        SELECT DISTINCT s.student_id, s.name, s.phone, s.email, s.program
        FROM timetable t
        JOIN enrollments e ON e.course_code = t.course_code
        JOIN students s ON s.student_id = e.student_id
        WHERE t.lecturer_id = ?
        ORDER BY s.student_id)sql");
    st.bind(1, lecturer_id);
    while (st.step()) out.push_back(read_student(st));
    return out;
  });
}

std::vector<Student> Registry::students_for_course(std::string_view course_code) const {
  return db_->read([&] {
    auto known = db_->prepare(R"sql(
        SELECT EXISTS (SELECT 1 FROM timetable WHERE course_code = ?1)
            OR EXISTS (SELECT 1 FROM enrollments WHERE course_code = ?1))sql");
    known.bind(1, course_code);
    known.step();
    if (known.int64(0) == 0) throw Error("UNKNOWN_COURSE", std::string(course_code));
    std::vector<Student> out;
    auto st = db_->prepare(R"sql(
        SELECT s.student_id, s.name, s.phone, s.email, s.program
        FROM enrollments e JOIN students s ON s.student_id = e.student_id
        WHERE e.course_code = ?
        ORDER BY s.student_id)sql");
    st.bind(1, course_code);
    while (st.step()) out.push_back(read_student(st));
    return out;
  });
}

bool Registry::teaches(std::string_view lecturer_id, std::string_view course_code) const {
  return db_->read([&] {
    auto st = db_->prepare("SELECT 1 FROM timetable WHERE lecturer_id = ? AND course_code = ? LIMIT 1");
    st.bind(1, lecturer_id).bind(2, course_code);
    return st.step();
  });
}

}  // namespace announcer
