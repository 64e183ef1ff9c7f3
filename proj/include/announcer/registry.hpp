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

#pragma once

// The institutional registry: students, staff, timetables, enrollments, the
// fee ledger and library loans, populated from CSV exports.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "announcer/civil.hpp"
#include "announcer/database.hpp"

namespace announcer {

struct Student {
  std::string student_id;
  std::string name;
  std::string phone;  ///< E.164 or empty
  std::string email;  ///< empty or exactly one '@'
  std::string program;
  bool operator==(const Student&) const = default;
};

enum class Role { kLecturer, kRecords, kLibrary, kAdmin };

const char* to_string(Role role);
std::optional<Role> parse_role(std::string_view text);  ///< case-insensitive

struct StaffUser {
  std::string staff_id;
  std::string name;
  Role role = Role::kLecturer;
  std::string password_hash;
  std::string salt;
};

enum class Weekday { kMon, kTue, kWed, kThu, kFri, kSat, kSun };

const char* to_string(Weekday day);
std::optional<Weekday> parse_weekday(std::string_view text);

struct TimetableEntry {
  std::string course_code;
  std::string lecturer_id;
  Weekday day = Weekday::kMon;
  int start_minute = 0;
  int end_minute = 0;
  std::string room;
  bool operator==(const TimetableEntry&) const = default;
};

struct Enrollment {
  std::string course_code;
  std::string student_id;
  bool operator==(const Enrollment&) const = default;
};

struct FeeRecord {
  std::string invoice_id;
  std::string student_id;
  Money amount_due;
  Money amount_paid;
  Date due_date;

  Money balance() const { return amount_due - amount_paid; }
  bool operator==(const FeeRecord&) const = default;
};

struct LoanRecord {
  std::string loan_id;
  std::string student_id;
  std::string book_title;
  std::string barcode;
  Date due_date;
  std::optional<Date> returned_date;
  bool operator==(const LoanRecord&) const = default;
};

enum class ImportKind { kStudents, kStaff, kTimetable, kEnrollments, kFees, kLoans };

std::optional<ImportKind> parse_import_kind(std::string_view text);  ///< "students", "FEES", ...
const char* to_string(ImportKind kind);
/// Exact lowercase header row expected for `kind`.
const char* csv_header(ImportKind kind);

struct ImportRejection {
  std::size_t line = 0;
  std::string code;    ///< BAD_FIELD or DANGLING_REFERENCE
  std::string column;  ///< offending column, empty for whole-row problems
  std::string message;
};

struct ImportReport {
  std::size_t accepted = 0;
  std::vector<ImportRejection> rejected;
};

/// Strips spaces, dashes and parentheses. "+..." is kept after a digit check;
/// a leading "0" becomes `default_country`; bare digits are taken to already
/// include a country code. Throws Error("UNPARSEABLE_PHONE").
std::string normalize_phone(std::string_view raw, std::string_view default_country);

/// True if `phone` is "+" followed by 8 to 15 digits.
bool is_e164(std::string_view phone);

class Registry {
 public:
  Registry(std::shared_ptr<Database> db, std::string default_country = "+60");

  /// Throws Error("MISSING_HEADER") if the first row is not the exact header,
  /// Error("IO_ERROR") if the file cannot be read. Row problems are reported,
  /// not thrown.
  ImportReport import_csv(ImportKind kind, const std::filesystem::path& path);
  ImportReport import_csv(ImportKind kind, std::istream& in);

  // Validated single-row writes; throw Error("BAD_FIELD") / ("DANGLING_REFERENCE").
  void upsert_student(Student s);
  void upsert_staff(const std::string& staff_id, const std::string& name, Role role,
                    const std::string& password);
  void upsert_timetable(const TimetableEntry& e);
  void upsert_enrollment(const Enrollment& e);
  void upsert_fee(const FeeRecord& f);
  void upsert_loan(const LoanRecord& l);

  std::optional<Student> student(std::string_view id) const;
  std::vector<Student> students() const;
  std::optional<StaffUser> staff(std::string_view id) const;
  std::vector<StaffUser> all_staff() const;
  std::vector<TimetableEntry> timetable() const;
  std::vector<TimetableEntry> timetable_for(std::string_view lecturer_id) const;
  std::vector<Enrollment> enrollments() const;
  std::vector<FeeRecord> fees() const;
  std::optional<FeeRecord> fee(std::string_view invoice_id) const;
  std::vector<LoanRecord> loans() const;
  std::optional<LoanRecord> loan(std::string_view loan_id) const;

  /// Union of students enrolled in the lecturer's timetabled courses, sorted
  /// by student_id. Throws Error("UNKNOWN_STAFF").
  std::vector<Student> students_for_lecturer(std::string_view lecturer_id) const;
  /// Throws Error("UNKNOWN_COURSE") if the course is in neither the timetable
  /// nor the enrollments.
  std::vector<Student> students_for_course(std::string_view course_code) const;
  bool teaches(std::string_view lecturer_id, std::string_view course_code) const;

  const std::string& default_country() const { return default_country_; }
  Database& database() { return *db_; }
  std::shared_ptr<Database> shared_database() const { return db_; }

 private:
  void create_schema();
  void apply_row(ImportKind kind, const std::vector<std::string>& fields);

  std::shared_ptr<Database> db_;
  std::string default_country_;
};

}  // namespace announcer
