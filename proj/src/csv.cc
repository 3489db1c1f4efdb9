//
// Copyright 2026 The StablePriv Authors
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
//

#include "stablepriv/csv.h"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace stablepriv {

namespace {

bool ParseDouble(absl::string_view token, double* out) {
  std::string buffer(absl::StripAsciiWhitespace(token));
  if (buffer.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(buffer.c_str(), &end);
  if (errno != 0 || end != buffer.c_str() + buffer.size()) return false;
  *out = value;
  return true;
}

absl::StatusOr<std::vector<double>> ParseRow(absl::string_view line,
                                             int64_t line_number) {
  std::vector<double> values;
  for (absl::string_view token : absl::StrSplit(line, ',')) {
    double value;
    if (!ParseDouble(token, &value)) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "line %d: cannot parse \"%s\" as a number", line_number, token));
    }
    values.push_back(value);
  }
  return values;
}

absl::StatusOr<std::string> SlurpFile(absl::string_view path) {
  std::ifstream in{std::string(path)};
  if (!in) {
    return absl::NotFoundError(
        absl::StrFormat("cannot open \"%s\"", path));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Splits content into lines, dropping a trailing empty line. When the
// first line fails to parse as numbers but later lines exist, it is
// treated as the single permitted header.
std::vector<std::string> SplitLines(absl::string_view content) {
  std::vector<std::string> lines = absl::StrSplit(content, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

bool LooksNumeric(absl::string_view line) {
  double ignored;
  std::vector<absl::string_view> tokens = absl::StrSplit(line, ',');
  return !tokens.empty() && ParseDouble(tokens[0], &ignored);
}

}  // namespace

absl::StatusOr<Dataset> ParseLabeledCsv(absl::string_view content) {
  const std::vector<std::string> lines = SplitLines(content);
  Dataset dataset;
  size_t width = 0;
  for (size_t i = 0; i < lines.size(); ++i) {
    const int64_t line_number = static_cast<int64_t>(i) + 1;
    if (lines[i].empty()) continue;
    if (i == 0 && !LooksNumeric(lines[i])) continue;  // header
    auto row = ParseRow(lines[i], line_number);
    if (!row.ok()) return row.status();
    if (row->size() < 2) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "line %d: need at least one feature and a label", line_number));
    }
    if (width == 0) {
      width = row->size();
    } else if (row->size() != width) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "line %d: row has %d columns, expected %d", line_number,
          row->size(), width));
    }
    const double label = row->back();
    if (label != 0.0 && label != 1.0) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "line %d: label must be 0 or 1, got %g", line_number, label));
    }
    row->pop_back();
    dataset.examples.push_back(
        {*std::move(row), static_cast<int>(label)});
  }
  return dataset;
}

absl::StatusOr<std::vector<std::vector<double>>> ParseFeatureCsv(
    absl::string_view content) {
  const std::vector<std::string> lines = SplitLines(content);
  std::vector<std::vector<double>> rows;
  size_t width = 0;
  for (size_t i = 0; i < lines.size(); ++i) {
    const int64_t line_number = static_cast<int64_t>(i) + 1;
    if (lines[i].empty()) continue;
    if (i == 0 && !LooksNumeric(lines[i])) continue;  // header
    auto row = ParseRow(lines[i], line_number);
    if (!row.ok()) return row.status();
    if (width == 0) {
      width = row->size();
    } else if (row->size() != width) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "line %d: row has %d columns, expected %d", line_number,
          row->size(), width));
    }
    rows.push_back(*std::move(row));
  }
  return rows;
}

absl::StatusOr<Dataset> ReadLabeledCsv(absl::string_view path) {
  auto content = SlurpFile(path);
  if (!content.ok()) return content.status();
  return ParseLabeledCsv(*content);
}

absl::StatusOr<std::vector<std::vector<double>>> ReadFeatureCsv(
    absl::string_view path) {
  auto content = SlurpFile(path);
  if (!content.ok()) return content.status();
  return ParseFeatureCsv(*content);
}

absl::Status WriteLabeledCsv(const Dataset& dataset, absl::string_view path) {
  std::ofstream out{std::string(path)};
  if (!out) {
    return absl::NotFoundError(
        absl::StrFormat("cannot open \"%s\" for writing", path));
  }
  for (const auto& example : dataset.examples) {
    for (const double feature : example.features) {
      out << absl::StrFormat("%.17g", feature) << ',';
    }
    out << example.label << '\n';
  }
  return absl::OkStatus();
}

}  // namespace stablepriv
