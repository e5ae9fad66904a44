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

#ifndef NLEGUARD_DATASET_H_
#define NLEGUARD_DATASET_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"

namespace nleguard {

enum class Task { kNli, kCqa };

std::string_view TaskName(Task task);
std::optional<Task> ParseTask(std::string_view name);

// One dataset example: a fixed context part and the variable part the attack
// rewrites. For CQA the context is "question answer" and the variable part
// is the two distractor choices joined by ", ".
struct Instance {
  std::string id;
  std::string context;
  std::string variable;
  std::string gold_label;
  std::string reference_nle;
  Task task = Task::kNli;
  std::vector<std::string> choices;  // CQA only, original order
  std::string answer;                // CQA only

  friend bool operator==(const Instance&, const Instance&) = default;
};

// CQA question text: the context without its trailing " <answer>".
std::string QuestionOf(const Instance& instance);

// What the model reads for the variable part: the hypothesis for NLI, the
// answer choices joined by ", " for CQA.
std::string ModelVariableOf(const Instance& instance);

// What the model reads for the fixed part: the premise for NLI, the question
// for CQA.
std::string ModelContextOf(const Instance& instance);

struct LoadResult {
  std::vector<Instance> instances;
  size_t rows = 0;
  size_t skipped = 0;
};

// Fails when more than `max_rate` of the rows were skipped.
absl::Status CheckSkipBudget(const LoadResult& result, double max_rate);

nlohmann::json ToJson(const Instance& instance);
absl::StatusOr<Instance> InstanceFromJson(const nlohmann::json& j);

// Canonical JSONL, one instance per line:
//   {"id", "context", "variable", "gold_label", "reference_nle",
//    "task": "nli"|"cqa", and for cqa "choices": [3 texts], "answer"}
// Rows that fail to parse, lack a context or repeat an id are skipped.
absl::StatusOr<LoadResult> LoadCanonical(const std::string& path);

}  // namespace nleguard

#endif  // NLEGUARD_DATASET_H_
