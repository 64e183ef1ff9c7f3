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

#include "announcer/scans.hpp"

#include <algorithm>
#include <tuple>

namespace announcer {

Money FinePolicy::fine_for(int days_overdue) const {
  auto fine = rate_per_day * days_overdue;
  return fine > cap ? cap : fine;
}

std::vector<OverdueFee> scan_overdue_fees(const std::vector<FeeRecord>& fees, Date as_of) {
  std::vector<OverdueFee> out;
  for (const auto& f : fees) {
    if (f.balance() > Money{} && f.due_date < as_of) out.push_back({f, f.balance(), as_of.days_since(f.due_date)});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.fee.student_id, a.fee.invoice_id) < std::tie(b.fee.student_id, b.fee.invoice_id);
  });
  return out;
}

std::vector<OverdueLoan> scan_overdue_loans(const std::vector<LoanRecord>& loans, Date as_of,
                                            const FinePolicy& policy) {
  std::vector<OverdueLoan> out;
  for (const auto& l : loans) {
    if (l.returned_date || !(l.due_date < as_of)) continue;
    int days = as_of.days_since(l.due_date);
    out.push_back({l, days, policy.fine_for(days)});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.loan.student_id, a.loan.loan_id) < std::tie(b.loan.student_id, b.loan.loan_id);
  });
  return out;
}

}  // namespace announcer
