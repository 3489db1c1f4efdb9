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

#ifndef STABLEPRIV_CSV_H_
#define STABLEPRIV_CSV_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "stablepriv/types.h"

namespace stablepriv {

// Reads a labeled dataset: comma-separated reals per row with the {0,1}
// label in the last column, optional single header line. Errors carry the
// 1-based line number.
absl::StatusOr<Dataset> ReadLabeledCsv(absl::string_view path);

// Reads unlabeled query rows: one feature vector per line, no label column.
absl::StatusOr<std::vector<std::vector<double>>> ReadFeatureCsv(
    absl::string_view path);

// Writes a labeled dataset in the ingestion format.
absl::Status WriteLabeledCsv(const Dataset& dataset, absl::string_view path);

// Parsers for in-memory content, shared with the file entry points.
absl::StatusOr<Dataset> ParseLabeledCsv(absl::string_view content);
absl::StatusOr<std::vector<std::vector<double>>> ParseFeatureCsv(
    absl::string_view content);

}  // namespace stablepriv

#endif  // STABLEPRIV_CSV_H_
