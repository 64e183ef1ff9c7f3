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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "announcer/error.hpp"

namespace announcer {
namespace {

std::string code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

class RegistryTest : public ::testing::Test {
 protected:
  Registry reg{std::make_shared<Database>(":memory:"), "+60"};

  ImportReport import(ImportKind kind, const std::string& csv) {
    std::istringstream in(csv);
    return reg.import_csv(kind, in);
  }

  void load_two_course_fixture() {
    import(ImportKind::kStaff, "staff_id,name,role,password\nL1,Dr Lee,LECTURER,pw1\nL2,Dr Tan,LECTURER,pw2\n");
    import(ImportKind::kStudents,
           "student_id,name,phone,email,program\n"
           "S1,Ali,0123456789,ali@uni.edu,IT\n"
           "S2,Bala,0123456780,bala@uni.edu,IT\n"
           "S3,Chen,0123456781,chen@uni.edu,CS\n"
           "S4,Devi,,devi@uni.edu,CS\n");
    import(ImportKind::kTimetable,
           "course_code,lecturer_id,day_of_week,start_time,end_time,room\n"
           "C1,L1,MON,09:00,11:00,R1\n"
           "C2,L1,WED,14:00,16:00,R2\n"
           "C3,L2,FRI,08:00,10:00,R3\n");
    import(ImportKind::kEnrollments, "course_code,student_id\nC1,S1\nC1,S2\nC2,S2\nC2,S3\nC4,S4\n");
  }
};

TEST(NormalizePhone, NationalFormatGetsCountryPrefix) {
  EXPECT_EQ(normalize_phone("012-345 6789", "+60"), "+60123456789");
}

TEST(NormalizePhone, AlreadyNormalizedIsIdentity) {
  EXPECT_EQ(normalize_phone("+60123456789", "+60"), "+60123456789");
}

TEST(NormalizePhone, Rejects) {
  EXPECT_EQ(code_of([] { normalize_phone("12ab", "+60"); }), "UNPARSEABLE_PHONE");
  EXPECT_EQ(code_of([] { normalize_phone("+6012", "+60"); }), "UNPARSEABLE_PHONE");           // too short
  EXPECT_EQ(code_of([] { normalize_phone("+6012345678901234", "+60"); }), "UNPARSEABLE_PHONE");  // 16 digits
  EXPECT_EQ(normalize_phone("(03) 8317-8888", "+60"), "+60383178888");
}

TEST_F(RegistryTest, CleanStudentImport) {
  auto r = import(ImportKind::kStudents,
                  "student_id,name,phone,email,program\n"
                  "S1,Ali,+60123456789,ali@uni.edu,IT\n"
                  "S2,\"Bala, Jr\",012-345 6780,,IT\n"
                  "S3,Chen,,chen@uni.edu,CS\n");
  EXPECT_EQ(r.accepted, 3u);
  EXPECT_TRUE(r.rejected.empty());
  EXPECT_EQ(reg.student("S2")->name, "Bala, Jr");
  EXPECT_EQ(reg.student("S2")->phone, "+60123456780");
}

TEST_F(RegistryTest, BadPhoneRejectsOnlyThatLine) {
  auto r = import(ImportKind::kStudents,
                  "student_id,name,phone,email,program\n"
                  "S1,Ali,+60123456789,,IT\n"
                  "S2,Bala,abc,,IT\n"
                  "S3,Chen,,,CS\n");
  EXPECT_EQ(r.accepted, 2u);
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].line, 3u);
  EXPECT_EQ(r.rejected[0].code, "BAD_FIELD");
  EXPECT_EQ(r.rejected[0].column, "phone");
  EXPECT_FALSE(reg.student("S2").has_value());
}

TEST_F(RegistryTest, EmailNeedsExactlyOneAt) {
  auto r = import(ImportKind::kStudents,
                  "student_id,name,phone,email,program\nS1,A,,a@@b,IT\nS2,B,,nobody,IT\n,C,,,IT\n");
  EXPECT_EQ(r.accepted, 0u);
  ASSERT_EQ(r.rejected.size(), 3u);
  EXPECT_EQ(r.rejected[2].column, "student_id");
}

TEST_F(RegistryTest, DanglingEnrollment) {
  load_two_course_fixture();
  auto r = import(ImportKind::kEnrollments, "course_code,student_id\nC1,S999\nC1,S3\n");
  EXPECT_EQ(r.accepted, 1u);
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].code, "DANGLING_REFERENCE");
  EXPECT_EQ(r.rejected[0].line, 2u);
}

TEST_F(RegistryTest, MissingHeader) {
  EXPECT_EQ(code_of([&] { import(ImportKind::kStudents, "id,name\nS1,A\n"); }), "MISSING_HEADER");
  EXPECT_EQ(code_of([&] { import(ImportKind::kFees, ""); }), "MISSING_HEADER");
  EXPECT_EQ(code_of([&] { reg.import_csv(ImportKind::kFees, std::filesystem::path("/nonexistent.csv")); }),
            "IO_ERROR");
}

TEST_F(RegistryTest, HeaderWithBomAndCrlf) {
  auto r = import(ImportKind::kEnrollments, "\xEF\xBB\xBF" "course_code,student_id\r\n");
  EXPECT_EQ(r.accepted, 0u);
}

TEST_F(RegistryTest, WrongFieldCountAndInvalidUtf8) {
  auto r = import(ImportKind::kStudents, "student_id,name,phone,email,program\nS1,A\nS2,\xC3\x28,,,IT\n");
  ASSERT_EQ(r.rejected.size(), 2u);
  EXPECT_EQ(r.rejected[1].column, "name");
}

TEST_F(RegistryTest, FeeAndLoanValidation) {
  load_two_course_fixture();
  auto f = import(ImportKind::kFees,
                  "invoice_id,student_id,amount_due,amount_paid,due_date\n"
                  "I1,S1,250.00,0,2010-02-15\n"
                  "I2,S1,-5,0,2010-02-15\n"
                  "I3,S1,10.123,0,2010-02-15\n"
                  "I4,S1,10,0,2010-02-30\n"
                  "I5,S9,10,0,2010-02-01\n");
  EXPECT_EQ(f.accepted, 1u);
  ASSERT_EQ(f.rejected.size(), 4u);
  EXPECT_EQ(f.rejected[0].column, "amount_due");
  EXPECT_EQ(f.rejected[2].column, "due_date");
  EXPECT_EQ(f.rejected[3].code, "DANGLING_REFERENCE");
  EXPECT_EQ(reg.fee("I1")->balance(), Money::cents(25000));

  auto l = import(ImportKind::kLoans,
                  "loan_id,student_id,book_title,barcode,due_date,returned_date\n"
                  "B1,S2,\"Networks, 5th ed\",BC1,2010-02-01,\n"
                  "B2,S2,Algorithms,BC2,2010-02-01,2010-03-10\n");
  EXPECT_EQ(l.accepted, 2u);
  EXPECT_FALSE(reg.loan("B1")->returned_date.has_value());
  EXPECT_EQ(reg.loan("B2")->returned_date, Date::parse("2010-03-10"));
}

TEST_F(RegistryTest, TimetableValidation) {
  load_two_course_fixture();
  auto r = import(ImportKind::kTimetable,
                  "course_code,lecturer_id,day_of_week,start_time,end_time,room\n"
                  "C9,L1,MON,11:00,10:00,R\n"
                  "C9,L1,XYZ,09:00,10:00,R\n"
                  "C9,L1,TUE,9am,10:00,R\n"
                  "C9,NOBODY,TUE,09:00,10:00,R\n");
  EXPECT_EQ(r.accepted, 0u);
  ASSERT_EQ(r.rejected.size(), 4u);
  EXPECT_EQ(r.rejected[0].column, "end_time");
  EXPECT_EQ(r.rejected[1].column, "day_of_week");
  EXPECT_EQ(r.rejected[2].column, "start_time");
  EXPECT_EQ(r.rejected[3].code, "DANGLING_REFERENCE");
}

TEST_F(RegistryTest, StaffPasswordIsHashedNotStored) {
  import(ImportKind::kStaff, "staff_id,name,role,password\nR1,Rita,records,hunter2\n");
  auto s = reg.staff("R1");
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->role, Role::kRecords);
  EXPECT_EQ(s->password_hash.find("hunter2"), std::string::npos);
  EXPECT_EQ(s->salt.size(), 32u);
  auto bad = import(ImportKind::kStaff, "staff_id,name,role,password\nX,X,JANITOR,pw\nY,Y,ADMIN,\n");
  EXPECT_EQ(bad.rejected.size(), 2u);
}

TEST_F(RegistryTest, ReimportIsIdempotent) {
  const std::string students =
      "student_id,name,phone,email,program\nS1,Ali,0123456789,ali@uni.edu,IT\nS2,Bala,,b@uni.edu,IT\n";
  const std::string staff = "staff_id,name,role,password\nL1,Dr Lee,LECTURER,pw1\n";
  import(ImportKind::kStudents, students);
  import(ImportKind::kStaff, staff);
  auto s1 = reg.students();
  auto st1 = reg.staff("L1");
  auto r = import(ImportKind::kStudents, students);
  import(ImportKind::kStaff, staff);
  EXPECT_EQ(r.accepted, 2u);
  EXPECT_EQ(reg.students(), s1);
  EXPECT_EQ(reg.staff("L1")->password_hash, st1->password_hash);
  EXPECT_EQ(reg.staff("L1")->salt, st1->salt);
}

TEST_F(RegistryTest, UpsertReplacesByPrimaryKey) {
  import(ImportKind::kStudents, "student_id,name,phone,email,program\nS1,Ali,,,IT\n");
  import(ImportKind::kStudents, "student_id,name,phone,email,program\nS1,Ali Hassan,,,CS\n");
  EXPECT_EQ(reg.students().size(), 1u);
  EXPECT_EQ(reg.student("S1")->program, "CS");
}

TEST_F(RegistryTest, StudentsForLecturerIsSortedUnion) {
  load_two_course_fixture();
  auto got = reg.students_for_lecturer("L1");
  std::vector<std::string> ids;
  for (const auto& s : got) ids.push_back(s.student_id);
  EXPECT_EQ(ids, (std::vector<std::string>{"S1", "S2", "S3"}));
}

TEST_F(RegistryTest, LecturerWithoutTimetableAndUnknownStaff) {
  load_two_course_fixture();
  import(ImportKind::kStaff, "staff_id,name,role,password\nL3,Dr New,LECTURER,pw\n");
  EXPECT_TRUE(reg.students_for_lecturer("L3").empty());
  EXPECT_EQ(code_of([&] { reg.students_for_lecturer("NOPE"); }), "UNKNOWN_STAFF");
}

TEST_F(RegistryTest, StudentsForCourse) {
  load_two_course_fixture();
  auto c1 = reg.students_for_course("C1");
  ASSERT_EQ(c1.size(), 2u);
  EXPECT_EQ(c1[0].student_id, "S1");
  EXPECT_EQ(c1[1].student_id, "S2");
  EXPECT_TRUE(reg.students_for_course("C3").empty());  // timetabled, no enrollments
  EXPECT_EQ(reg.students_for_course("C4").size(), 1u);  // enrolled, not timetabled
  EXPECT_EQ(code_of([&] { reg.students_for_course("C99"); }), "UNKNOWN_COURSE");
  EXPECT_TRUE(reg.teaches("L1", "C2"));
  EXPECT_FALSE(reg.teaches("L2", "C2"));
}

// Independent nested-loop scan over TimetableEntry x Enrollment x Student.
std::vector<std::string> brute_force_roster(const Registry& reg, const std::string& lecturer) {
  std::set<std::string> ids;
  for (const auto& t : reg.timetable()) {
    if (t.lecturer_id != lecturer) continue;
    for (const auto& e : reg.enrollments()) {
      if (e.course_code != t.course_code) continue;
      for (const auto& s : reg.students())
        if (s.student_id == e.student_id) ids.insert(s.student_id);
    }
  }
  return {ids.begin(), ids.end()};
}

TEST_F(RegistryTest, RosterMatchesNestedLoopOracleOnRandomFixtures) {
  std::mt19937 rng(5);
  for (int l = 0; l < 5; ++l)
    reg.upsert_staff("L" + std::to_string(l), "Lect", Role::kLecturer, "pw");
  for (int s = 0; s < 60; ++s)
    reg.upsert_student(Student{"S" + std::to_string(100 + s), "N", "", "", "P"});
  std::uniform_int_distribution<int> lect(0, 4), course(0, 11), student(0, 59), day(0, 6), hour(7, 18);
  for (int i = 0; i < 30; ++i) {
    int h = hour(rng);
    reg.upsert_timetable(TimetableEntry{"C" + std::to_string(course(rng)), "L" + std::to_string(lect(rng)),
                                        static_cast<Weekday>(day(rng)), h * 60, h * 60 + 90, "R"});
  }
  for (int i = 0; i < 150; ++i)
    reg.upsert_enrollment(Enrollment{"C" + std::to_string(course(rng)), "S" + std::to_string(100 + student(rng))});
  for (int l = 0; l < 5; ++l) {
    auto lecturer = "L" + std::to_string(l);
    std::vector<std::string> got;
    for (const auto& s : reg.students_for_lecturer(lecturer)) got.push_back(s.student_id);
    EXPECT_EQ(got, brute_force_roster(reg, lecturer)) << lecturer;
  }
}

TEST_F(RegistryTest, StoredStudentsSatisfyInvariants) {
  import(ImportKind::kStudents,
         "student_id,name,phone,email,program\nS1,A,0123456789,a@b,IT\nS2,B,x,a@b,IT\nS3,C,,q@@r,IT\n"
         "S4,D,+441234567890,,IT\n");
  for (const auto& s : reg.students()) {
    EXPECT_FALSE(s.student_id.empty());
    EXPECT_TRUE(s.phone.empty() || is_e164(s.phone)) << s.phone;
    EXPECT_TRUE(s.email.empty() || std::count(s.email.begin(), s.email.end(), '@') == 1);
  }
}

TEST(RegistryFile, SurvivesReopen) {
  auto path = std::filesystem::temp_directory_path() / "announcer_registry_reopen.db";
  std::filesystem::remove(path);
  {
    Registry reg(std::make_shared<Database>(path.string()));
    reg.upsert_student(Student{"S1", "Ali", "+60123456789", "", "IT"});
  }
  Registry reg(std::make_shared<Database>(path.string()));
  EXPECT_EQ(reg.student("S1")->name, "Ali");
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace announcer
