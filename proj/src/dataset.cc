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

#include "nleguard/dataset.h"

#include <fstream>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "nleguard/text.h"

namespace nleguard {

using nlohmann::json;

std::string_view TaskName(Task task) { return task == Task::kCqa ? "cqa" : "nli"; }

std::optional<Task> ParseTask(std::string_view name) {
  if (name == "nli") return Task::kNli;
  if (name == "cqa") return Task::kCqa;
  return std::nullopt;
}

std::string QuestionOf(const Instance& instance) {
  std::string suffix = absl::StrCat(" ", instance.answer);
  if (!instance.answer.empty() && absl::EndsWith(instance.context, suffix)) {
    return instance.context.substr(0, instance.context.size() - suffix.size());
  }
  return instance.context;
}

std::string ModelVariableOf(const Instance& instance) {
  if (instance.task == Task::kNli) return instance.variable;
  if (!instance.choices.empty()) return absl::StrJoin(instance.choices, ", ");
  return absl::StrCat(instance.answer, ", ", instance.variable);
}

std::string ModelContextOf(const Instance& instance) {
  return instance.task == Task::kCqa ? QuestionOf(instance) : instance.context;
}

absl::Status CheckSkipBudget(const LoadResult& result, double max_rate) {
  if (result.rows == 0) return absl::OkStatus();
  double rate = static_cast<double>(result.skipped) / static_cast<double>(result.rows);
  if (rate > max_rate) {
    return absl::FailedPreconditionError(
        absl::StrCat(result.skipped, " of ", result.rows,
                     " rows were malformed, above the budget of ", max_rate));
  }
  return absl::OkStatus();
}

json ToJson(const Instance& instance) {
  json j = {{"id", instance.id},
            {"context", instance.context},
            {"variable", instance.variable},
            {"gold_label", instance.gold_label},
            {"reference_nle", instance.reference_nle},
            {"task", TaskName(instance.task)}};
  if (instance.task == Task::kCqa) {
    j["choices"] = instance.choices;
    j["answer"] = instance.answer;
  }
  return j;
}

absl::StatusOr<Instance> InstanceFromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("instance is not a JSON object");
  Instance inst;
  try {
    auto text = [&j](const char* key, bool required) -> std::string {
      auto it = j.find(key);
      if (it == j.end() || it->is_null()) {
        if (required) throw std::invalid_argument(absl::StrCat("missing \"", key, "\""));
        return "";
      }
      return it->get<std::string>();
    };
    inst.id = text("id", true);
    inst.context = text("context", true);
    inst.variable = text("variable", false);
    inst.gold_label = text("gold_label", false);
    inst.reference_nle = text("reference_nle", false);
    std::string task = text("task", false);
    std::optional<Task> parsed = task.empty() ? Task::kNli : ParseTask(task);
    if (!parsed) throw std::invalid_argument(absl::StrCat("unknown task \"", task, "\""));
    inst.task = *parsed;
    if (inst.task == Task::kCqa) {
      if (j.contains("choices")) inst.choices = j.at("choices").get<std::vector<std::string>>();
      inst.answer = text("answer", true);
    }
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(e.what());
  }
  return inst;
}

absl::StatusOr<LoadResult> LoadCanonical(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open dataset ", path));
  LoadResult result;
  absl::flat_hash_set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    ++result.rows;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    absl::StatusOr<Instance> inst =
        j.is_discarded() ? absl::InvalidArgumentError("bad JSON") : InstanceFromJson(j);
    if (!inst.ok() || Trim(inst->context).empty() || !ids.insert(inst->id).second) {
      ++result.skipped;
      continue;
    }
    result.instances.push_back(*std::move(inst));
  }
  return result;
}

}  // namespace nleguard
