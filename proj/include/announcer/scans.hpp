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

// Overdue scans over the fee ledger and library loans.

#include <vector>

#include "announcer/registry.hpp"

namespace announcer {

struct OverdueFee {
  FeeRecord fee;
  Money balance;
  int days_overdue = 0;
};

struct OverdueLoan {
  LoanRecord loan;
  int days_overdue = 0;
  Money fine;
};

struct FinePolicy {
  Money rate_per_day = Money::cents(50);
  Money cap = Money::cents(5000);

  Money fine_for(int days_overdue) const;
};

/// Records with a positive balance and due_date strictly before `as_of`,
/// sorted by (student_id, invoice_id).
std::vector<OverdueFee> scan_overdue_fees(const std::vector<FeeRecord>& fees, Date as_of);
/// Unreturned loans with due_date strictly before `as_of`, sorted by
/// (student_id, loan_id).
std::vector<OverdueLoan> scan_overdue_loans(const std::vector<LoanRecord>& loans, Date as_of, const FinePolicy& policy);

}  // namespace announcer
