/*
 * Copyright 2026 The sortbo Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef SORTBO_LEDGER_IO_HPP
#define SORTBO_LEDGER_IO_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sortbo/optimizer.hpp"

namespace sortbo {

inline constexpr int kLedgerSchemaVersion = 1;

class LedgerFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// One JSON object per entry, tagged with "kind" (record, proposal or
/// failure) and "schema_version".
std::string to_json_line(const LedgerEntry& entry);
LedgerEntry parse_json_line(const std::string& line);

void write_ledger(std::ostream& out, const std::vector<LedgerEntry>& entries);
/// Writes `path` from scratch.
void write_ledger_file(const std::string& path, const std::vector<LedgerEntry>& entries);

/// Blank lines are skipped. Throws LedgerFormatError with the line number.
std::vector<LedgerEntry> read_ledger(std::istream& in);
std::vector<LedgerEntry> read_ledger_file(const std::string& path);

std::vector<ExperimentRecord> records_of(const std::vector<LedgerEntry>& entries);

/// Aggregate fields of each record, one row per record.
void write_ledger_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
/// Inverse of write_ledger_csv. Interval detail is not part of the table, so
/// the returned records have no intervals.
std::vector<ExperimentRecord> read_ledger_csv(std::istream& in);

/// Rows (t, var) of a variance study.
void write_variance_csv(std::ostream& out, const std::vector<std::pair<double, double>>& series);

}  // namespace sortbo

#endif  // SORTBO_LEDGER_IO_HPP
