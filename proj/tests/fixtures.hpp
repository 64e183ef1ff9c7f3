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

// A small campus: 50 students, 3 courses, 5 staff, 20 invoices (12 overdue on
// 2010-03-01) and 12 loans (8 overdue on 2010-03-01). Expected values are
// spelled out here by hand rather than derived from the code under test.

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "announcer/error.hpp"
#include "announcer/gateway.hpp"

namespace announcer::testing {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "announcer-XXXXXX").string();
    path = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

inline std::string pad3(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", i);
  return buf;
}

inline std::string pad2(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", i);
  return buf;
}

struct Campus {
  static constexpr const char* kAsOf = "2010-03-01";

  static std::string student_id(int i) { return "S" + pad3(i); }
  static std::string name(int i) { return "Student " + pad2(i); }
  /// Normalized phone; students 49 and 50 have none.
  static std::string phone(int i) { return i >= 49 ? "" : "+60123450" + pad3(i); }
  static std::string email(int i) { return i == 50 ? "" : "s" + pad3(i) + "@student.example"; }

  static std::string students_csv() {
    std::string s = "student_id,name,phone,email,program\n";
    for (int i = 1; i <= 50; ++i) {
      std::string raw_phone = i >= 49 ? "" : "012-345 0" + pad3(i);  // national format on purpose
      s += student_id(i) + "," + name(i) + "," + raw_phone + "," + email(i) + "," + (i % 2 ? "IT" : "CS") + "\n";
    }
    return s;
  }

  static std::string staff_csv() {
    return "staff_id,name,role,password\n"
           "L1,Dr Lee,LECTURER,lee-pass\n"
           "L2,Dr Tan,LECTURER,tan-pass\n"
           "R1,Records Rita,RECORDS,rita-pass\n"
           "B1,Librarian Ben,LIBRARY,ben-pass\n"
           "A1,Admin Ann,ADMIN,ann-pass\n";
  }

  static std::string timetable_csv() {
    return "course_code,lecturer_id,day_of_week,start_time,end_time,room\n"
           "C1,L1,MON,09:00,11:00,R101\n"
           "C2,L1,WED,14:00,16:00,R102\n"
           "C3,L2,FRI,08:00,10:00,R201\n";
  }

  /// C1: S001-S020, C2: S015-S030, C3: S031-S050.
  static std::string enrollments_csv() {
    std::string s = "course_code,student_id\n";
    for (int i = 1; i <= 20; ++i) s += "C1," + student_id(i) + "\n";
    for (int i = 15; i <= 30; ++i) s += "C2," + student_id(i) + "\n";
    for (int i = 31; i <= 50; ++i) s += "C3," + student_id(i) + "\n";
    return s;
  }

  struct Fee {
    int student;
    std::string invoice;
    std::string due, paid, due_date;
  };

  /// Overdue on 2010-03-01: one invoice each for S001..S012.
  static std::vector<Fee> overdue_fees() {
    std::vector<Fee> out;
    for (int i = 1; i <= 12; ++i) {
      int due_cents = 10000 + i * 2550;
      std::string paid = i % 3 == 0 ? "50.00" : "0";
      out.push_back({i, "INV-1" + pad3(i), std::to_string(due_cents / 100) + "." + pad2(due_cents % 100), paid,
                     "2010-02-" + pad2(i + 1)});
    }
    return out;
  }

  /// Balance of overdue_fees()[i-1], computed by hand: 100.00 + 25.50 i, less 50.00 when i % 3 == 0.
  static std::string overdue_balance(int i) {
    int cents = 10000 + i * 2550 - (i % 3 == 0 ? 5000 : 0);
    return std::to_string(cents / 100) + "." + pad2(cents % 100);
  }

  static std::string fees_csv() {
    std::string s = "invoice_id,student_id,amount_due,amount_paid,due_date\n";
    for (const auto& f : overdue_fees())
      s += f.invoice + "," + student_id(f.student) + "," + f.due + "," + f.paid + "," + f.due_date + "\n";
    s += "INV-2001,S013,300.00,300.00,2010-01-15\n";  // settled
    s += "INV-2002,S014,200.00,0,2010-03-01\n";       // due today, not yet overdue
    s += "INV-2003,S015,150.00,0,2010-04-01\n";       // future
    s += "INV-2004,S016,100.00,120.00,2010-01-10\n";  // overpaid
    for (int i = 17; i <= 20; ++i) s += "INV-20" + pad2(i - 12) + "," + student_id(i) + ",80.00,0,2010-05-01\n";
    return s;
  }

  struct Loan {
    int student;
    std::string loan_id, title, due_date, fine;
  };

  /// Overdue on 2010-03-01: S021..S028. Fines at 0.50/day capped at 50.00.
  static std::vector<Loan> overdue_loans() {
    return {
        {21, "LN-1001", "Data Networks", "2010-02-27", "1.00"},         // 2 days
        {22, "LN-1002", "Operating Systems", "2010-02-19", "5.00"},     // 10 days
        {23, "LN-1003", "Discrete Mathematics", "2010-02-01", "14.00"}, // 28 days
        {24, "LN-1004", "Compiler Design", "2010-01-30", "15.00"},      // 30 days
        {25, "LN-1005", "Digital Logic", "2009-12-31", "30.00"},        // 60 days
        {26, "LN-1006", "Signals and Systems", "2009-11-21", "50.00"},  // 100 days, exactly the cap
        {27, "LN-1007", "Linear Algebra", "2009-08-13", "50.00"},       // 200 days, capped
        {28, "LN-1008", "Database Systems", "2010-02-28", "0.50"},      // 1 day
    };
  }

  static std::string loans_csv() {
    std::string s = "loan_id,student_id,book_title,barcode,due_date,returned_date\n";
    int n = 0;
    for (const auto& l : overdue_loans())
      s += l.loan_id + "," + student_id(l.student) + "," + l.title + ",BC" + std::to_string(7000 + ++n) + "," +
           l.due_date + ",\n";
    s += "LN-2001,S029,Calculus,BC8001,2010-01-10,2010-02-20\n";  // returned late
    s += "LN-2002,S030,Physics,BC8002,2010-03-01,\n";             // due today
    s += "LN-2003,S031,Chemistry,BC8003,2010-03-20,\n";           // future
    s += "LN-2004,S032,Biology,BC8004,2010-02-01,2010-01-25\n";   // returned early
    return s;
  }

  /// Default FEE_REMINDER body for overdue_fees()[i-1], spelled out.
  static std::string fee_body(int i) {
    return "Dear " + name(i) + ", your fee balance of RM" + overdue_balance(i) + " was due on " +
           overdue_fees()[i - 1].due_date + ". Please settle it at the records office.";
  }

  static std::string loan_body(const Loan& l) {
    return "Dear " + name(l.student) + ", \"" + l.title + "\" was due on " + l.due_date + ". Fine to date: RM" +
           l.fine + ". Please return it to the library.";
  }

  /// Writes every CSV into `dir`; returns kind name -> path, in import order.
  static std::vector<std::pair<std::string, std::filesystem::path>> write_csvs(const std::filesystem::path& dir) {
    std::vector<std::pair<std::string, std::string>> files = {
        {"students", students_csv()}, {"staff", staff_csv()}, {"timetable", timetable_csv()},
        {"enrollments", enrollments_csv()}, {"fees", fees_csv()}, {"loans", loans_csv()}};
    std::vector<std::pair<std::string, std::filesystem::path>> out;
    for (auto& [kind, text] : files) {
      auto p = dir / (kind + ".csv");
      std::ofstream(p) << text;
      out.emplace_back(kind, p);
    }
    return out;
  }
};

/// SmsSender that records submissions instead of talking SMPP.
class RecordingSender : public gateway::SmsSender {
 public:
  gateway::SubmitOutcome submit(const std::string& dest, const std::string& text) override {
    std::lock_guard lock(mu_);
    if (crash_after_ >= 0 && static_cast<int>(sent_.size()) >= crash_after_) throw std::runtime_error("power cut");
    if (!fail_code_.empty()) throw Error(fail_code_, "scripted failure");
    sent_.emplace_back(dest, text);
    return {"R" + std::to_string(sent_.size()), 1};
  }
  std::vector<std::pair<std::string, std::string>> sent() {
    std::lock_guard lock(mu_);
    return sent_;
  }
  void crash_after(int n) {
    std::lock_guard lock(mu_);
    crash_after_ = n;
  }
  void fail_with(std::string code) {
    std::lock_guard lock(mu_);
    fail_code_ = std::move(code);
  }

 private:
  std::mutex mu_;
  std::vector<std::pair<std::string, std::string>> sent_;
  int crash_after_ = -1;
  std::string fail_code_;
};

}  // namespace announcer::testing
