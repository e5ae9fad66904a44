//
// Copyright 2026 The nleguard Authors
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

#ifndef NLEGUARD_EVAL_H_
#define NLEGUARD_EVAL_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "nleguard/attack.h"
#include "nleguard/dataset.h"

namespace nleguard {

// Parses RFC 4180 CSV (quoted fields, doubled quotes, embedded newlines).
absl::StatusOr<std::vector<std::vector<std::string>>> ParseCsv(std::string_view text);

// e-SNLI CSV. Column names are matched case-insensitively; the e-SNLI
// release names (pairID, gold_label, Sentence1, Sentence2, Explanation_1)
// are accepted alongside id/label/premise/hypothesis/explanation. Rows with
// an empty premise or hypothesis are skipped and counted.
absl::StatusOr<LoadResult> LoadEsnli(const std::string& path);

// Cos-E records as JSONL or a JSON array. Either flat
//   {"id", "question", "choices": [3], "answer", "explanation"}
// or the CommonsenseQA layout with question.stem, question.choices[].text
// and answerKey. Records whose answer is not one of the choices are skipped.
absl::StatusOr<LoadResult> LoadCose(const std::string& path);

// Dispatches on "esnli", "cose" or "canonical".
absl::StatusOr<LoadResult> LoadDataset(const std::string& path,
                                       std::string_view format);

struct AnnotationRecord {
  std::string instance_id;
  std::vector<std::string> votes;  // no | weak_no | weak_yes | yes
};

absl::StatusOr<std::vector<AnnotationRecord>> LoadAnnotations(const std::string& path);

// Mean over all votes of no=0, weak_no=1/3, weak_yes=2/3, yes=1.
absl::StatusOr<double> EvilScore(std::span<const AnnotationRecord> annotations);

struct DefenseReport {
  double defended_ratio = 0;
  double newly_introduced_ratio = 0;
  // False when the corresponding denominator is zero (ratio reported as 0).
  bool defended_defined = false;
  bool newly_introduced_defined = false;
  std::vector<std::string> base_attacked;      // sorted ids
  std::vector<std::string> defended_attacked;  // sorted ids
  std::vector<std::string> defended_ids;       // attacked in base only
  std::vector<std::string> newly_introduced_ids;
  // Inconsistent (instance, candidate) pair counts of each run.
  size_t base_pairs = 0;
  size_t defended_pairs = 0;
};

// Both reports must cover the same instance ids.
absl::StatusOr<DefenseReport> CompareRuns(const AttackReport& base,
                                          const AttackReport& defended);

nlohmann::json ToJson(const DefenseReport& report);

}  // namespace nleguard

#endif  // NLEGUARD_EVAL_H_
