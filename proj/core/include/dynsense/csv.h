// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DYNSENSE_CSV_H_
#define DYNSENSE_CSV_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace dynsense {

// Shortest decimal form that round-trips to the same binary64 value.
std::string format_number(double value);
std::string format_number(std::int64_t value);
inline std::string format_number(int value) { return format_number(static_cast<std::int64_t>(value)); }

class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  // Throws InvalidArgument when the row width differs from the header.
  void add_row(std::vector<std::string> row);

  // Index of a header column; throws InvalidArgument if absent.
  int column(const std::string& name) const;
  double number(size_t row, const std::string& name) const;

  void write(std::ostream& out) const;
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace dynsense

#endif  // DYNSENSE_CSV_H_
