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

#include "nleguard/attack.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <thread>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"

namespace nleguard {
namespace {

using nlohmann::json;

constexpr std::string_view kSummaryFile = "summary.json";
constexpr std::string_view kRecordsFile = "records.jsonl";

struct InstanceOutcome {
  std::vector<AttackRecord> records;
  size_t calls = 0;
  size_t errors = 0;
};

std::vector<std::string> SplitChoices(std::string_view text, std::string_view delimiter) {
  std::vector<std::string> out;
  for (std::string_view piece : SplitOn(text, delimiter)) {
    out.emplace_back(Trim(piece));
  }
  return out;
}

class InstanceAttack {
 public:
  InstanceAttack(const Instance& instance, const ModelClient& model,
                 const ModelClient& reverse, const KnowledgeBase& kb,
                 const Tagger& tagger, const AttackConfig& config)
      : instance_(instance),
        model_(model),
        reverse_(reverse),
        kb_(kb),
        tagger_(tagger),
        config_(config),
        stopwords_(config.stopwords ? *config.stopwords : DefaultStopwords()) {
    model_context_ = ModelContextOf(instance);
    if (config.context_suffix) model_context_ += config.context_suffix(instance);
  }

  InstanceOutcome Run() {
    InstanceOutcome out;
    ++out.calls;
    absl::StatusOr<Prediction> original =
        model_.Predict(model_context_, ModelVariableOf(instance_));
    if (!original.ok()) {
      ++out.errors;
      return out;
    }
    absl::StatusOr<CandidateSet> candidates =
        GenerateCandidates(original->nle, kb_, tagger_, config_.candidates);
    // An empty explanation proposes nothing.
    if (!candidates.ok()) return out;

    for (const Candidate& c : candidates->candidates) {
      AttackRecord record = Realize(original->nle, c, *candidates);
      ++out.calls;
      if (record.errored) ++out.errors;
      out.records.push_back(std::move(record));
    }
    return out;
  }

 private:
  AttackRecord Realize(const std::string& original_nle, const Candidate& c,
                       const CandidateSet& candidates) {
    AttackRecord r;
    r.instance_id = instance_.id;
    r.original_nle = original_nle;
    r.candidate = c.text;
    r.rule = c.rule;
    r.triplet = c.triplet;

    absl::StatusOr<std::string> variable = reverse_.Reverse(instance_.context, c.text);
    if (!variable.ok()) {
      r.errored = true;
      r.error = std::string(variable.status().message());
      return r;
    }
    r.adversarial_variable = *variable;

    std::string model_variable = *variable;
    if (instance_.task == Task::kCqa) {
      std::vector<std::string> distractors =
          SplitChoices(*variable, config_.cose_delimiter);
      if (distractors.size() != 2 ||
          CoseNaturalnessFilter(distractors, instance_.answer, stopwords_)) {
        r.filtered_reason = FilterReason::kUnnaturalCose;
        return r;
      }
      model_variable = absl::StrCat(instance_.answer, ", ",
                                    absl::StrJoin(distractors, ", "));
    }

    absl::StatusOr<Prediction> adversarial = model_.Predict(model_context_, model_variable);
    if (!adversarial.ok()) {
      r.errored = true;
      r.error = std::string(adversarial.status().message());
      return r;
    }
    r.adversarial_label = adversarial->label;
    r.adversarial_nle = adversarial->nle;
    if (FilterDoubleNegation(original_nle, r.adversarial_nle)) {
      r.filtered_reason = FilterReason::kDoubleNegation;
      return r;
    }
    r.inconsistent = CheckInconsistency(r.adversarial_nle, candidates);
    return r;
  }

  const Instance& instance_;
  const ModelClient& model_;
  const ModelClient& reverse_;
  const KnowledgeBase& kb_;
  const Tagger& tagger_;
  const AttackConfig& config_;
  const WordSet& stopwords_;
  std::string model_context_;
};

std::string_view Field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw std::invalid_argument(absl::StrCat("missing string field \"", key, "\""));
  }
  return it->get_ref<const std::string&>();
}

}  // namespace

std::string_view FilterReasonName(FilterReason reason) {
  switch (reason) {
    case FilterReason::kNone: return "NONE";
    case FilterReason::kDoubleNegation: return "DOUBLE_NEGATION";
    case FilterReason::kUnnaturalCose: return "UNNATURAL_COSE";
  }
  return "NONE";
}

std::optional<FilterReason> ParseFilterReason(std::string_view name) {
  for (FilterReason r : {FilterReason::kNone, FilterReason::kDoubleNegation,
                         FilterReason::kUnnaturalCose}) {
    if (FilterReasonName(r) == name) return r;
  }
  return std::nullopt;
}

bool CheckInconsistency(std::string_view adversarial_nle,
                        const CandidateSet& candidates) {
  std::string target = Normalize(adversarial_nle);
  return std::any_of(candidates.candidates.begin(), candidates.candidates.end(),
                     [&](const Candidate& c) { return Normalize(c.text) == target; });
}

bool FilterDoubleNegation(std::string_view original_nle,
                          std::string_view adversarial_nle) {
  return ContainsNegation(original_nle) && ContainsNegation(adversarial_nle);
}

bool CoseNaturalnessFilter(std::span<const std::string> choices,
                           std::string_view correct_answer,
                           const WordSet& stopwords) {
  std::string answer = Normalize(correct_answer);
  for (const std::string& choice : choices) {
    std::string c = Normalize(choice);
    if (c == answer || stopwords.contains(c)) return true;
  }
  return false;
}

absl::StatusOr<Metrics> ComputeMetrics(std::span<const AttackRecord> records,
                                       size_t n_test) {
  if (n_test == 0) {
    return absl::InvalidArgumentError("metrics need a non-empty test set");
  }
  Metrics m;
  absl::flat_hash_set<std::string_view> successful;
  for (const AttackRecord& r : records) {
    if (r.errored || r.filtered_reason != FilterReason::kNone) continue;
    ++m.n_proposed;
    if (r.inconsistent) {
      ++m.n_inconsistent;
      successful.insert(r.instance_id);
    }
  }
  m.n_success = successful.size();
  m.s_r = static_cast<double>(m.n_success) / static_cast<double>(n_test);
  m.h_r = m.n_proposed == 0 ? 0.0
                            : static_cast<double>(m.n_inconsistent) /
                                  static_cast<double>(m.n_proposed);
  return m;
}

absl::StatusOr<AttackReport> RunAttack(std::span<const Instance> dataset,
                                       const ModelClient& model,
                                       const ModelClient& reverse,
                                       const KnowledgeBase& kb,
                                       const Tagger& tagger,
                                       const AttackConfig& config) {
  if (dataset.empty()) return absl::InvalidArgumentError("dataset is empty");
  if (!model.Healthy()) return absl::UnavailableError("model endpoint is unavailable");
  if (!reverse.Healthy()) {
    return absl::UnavailableError("reverse-explainer endpoint is unavailable");
  }

  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return dataset[a].id < dataset[b].id; });
  for (size_t i = 1; i < order.size(); ++i) {
    if (dataset[order[i]].id == dataset[order[i - 1]].id) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate instance id \"", dataset[order[i]].id, "\""));
    }
  }

  std::vector<InstanceOutcome> outcomes(dataset.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t k; (k = next.fetch_add(1)) < order.size();) {
      const Instance& instance = dataset[order[k]];
      outcomes[k] = InstanceAttack(instance, model, reverse, kb, tagger, config).Run();
    }
  };
  size_t threads = std::clamp<size_t>(config.parallelism, 1, order.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  AttackReport report;
  size_t calls = 0;
  for (size_t k = 0; k < order.size(); ++k) {
    report.instance_ids.push_back(dataset[order[k]].id);
    calls += outcomes[k].calls;
    report.errors += outcomes[k].errors;
    for (AttackRecord& r : outcomes[k].records) report.records.push_back(std::move(r));
  }
  if (static_cast<double>(report.errors) >
      config.max_error_rate * static_cast<double>(calls)) {
    return absl::UnavailableError(absl::StrCat(
        report.errors, " of ", calls, " model calls failed, above the error budget of ",
        config.max_error_rate));
  }

  absl::StatusOr<Metrics> m = ComputeMetrics(report.records, dataset.size());
  if (!m.ok()) return m.status();
  report.n_test = dataset.size();
  report.n_proposed = m->n_proposed;
  report.n_inconsistent = m->n_inconsistent;
  report.n_success = m->n_success;
  report.s_r = m->s_r;
  report.h_r = m->h_r;
  report.naturalness_multiplier = config.naturalness_multiplier;
  return report;
}

json ToJson(const AttackRecord& r) {
  json j = {{"instance_id", r.instance_id},
            {"original_nle", r.original_nle},
            {"candidate", r.candidate},
            {"rule", RuleName(r.rule)},
            {"adversarial_variable", r.adversarial_variable},
            {"adversarial_nle", r.adversarial_nle},
            {"adversarial_label", r.adversarial_label},
            {"inconsistent", r.inconsistent},
            {"filtered_reason", FilterReasonName(r.filtered_reason)},
            {"errored", r.errored}};
  if (r.errored) j["error"] = r.error;
  if (r.triplet) {
    j["triplet"] = {r.triplet->subject, r.triplet->relation, r.triplet->object,
                    r.triplet->weight};
  }
  return j;
}

absl::StatusOr<AttackRecord> RecordFromJson(const json& j) {
  AttackRecord r;
  try {
    r.instance_id = Field(j, "instance_id");
    r.original_nle = Field(j, "original_nle");
    r.candidate = Field(j, "candidate");
    std::optional<Rule> rule = ParseRule(Field(j, "rule"));
    std::optional<FilterReason> reason = ParseFilterReason(Field(j, "filtered_reason"));
    if (!rule || !reason) return absl::InvalidArgumentError("unknown rule or filter reason");
    r.rule = *rule;
    r.filtered_reason = *reason;
    r.adversarial_variable = Field(j, "adversarial_variable");
    r.adversarial_nle = Field(j, "adversarial_nle");
    r.adversarial_label = Field(j, "adversarial_label");
    r.inconsistent = j.at("inconsistent").get<bool>();
    r.errored = j.at("errored").get<bool>();
    if (j.contains("error")) r.error = Field(j, "error");
    if (j.contains("triplet")) {
      const json& t = j.at("triplet");
      r.triplet = Triplet{t.at(0).get<std::string>(), t.at(1).get<std::string>(),
                          t.at(2).get<std::string>(), t.at(3).get<double>()};
    }
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("bad attack record: ", e.what()));
  }
  if (r.inconsistent && r.filtered_reason != FilterReason::kNone) {
    return absl::InvalidArgumentError("record is both inconsistent and filtered");
  }
  return r;
}

json SummaryJson(const AttackReport& report) {
  json j = {{"n_test", report.n_test},
            {"n_proposed", report.n_proposed},
            {"n_inconsistent", report.n_inconsistent},
            {"n_success", report.n_success},
            {"s_r", report.s_r},
            {"h_r", report.h_r},
            {"errors", report.errors},
            {"instance_ids", report.instance_ids}};
  if (report.naturalness_multiplier) {
    double m = *report.naturalness_multiplier;
    j["naturalness_multiplier"] = m;
    j["n_inconsistent_adjusted"] = static_cast<double>(report.n_inconsistent) * m;
    j["h_r_adjusted"] = report.h_r * m;
  }
  return j;
}

absl::Status WriteReport(const AttackReport& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return absl::PermissionDeniedError(absl::StrCat("cannot create ", dir));
  std::filesystem::path base(dir);
  {
    std::ofstream out(base / kSummaryFile, std::ios::binary | std::ios::trunc);
    out << SummaryJson(report).dump(2) << "\n";
    if (!out) return absl::DataLossError(absl::StrCat("cannot write summary in ", dir));
  }
  std::ofstream out(base / kRecordsFile, std::ios::binary | std::ios::trunc);
  for (const AttackRecord& r : report.records) out << ToJson(r).dump() << "\n";
  if (!out) return absl::DataLossError(absl::StrCat("cannot write records in ", dir));
  return absl::OkStatus();
}

absl::StatusOr<AttackReport> ReadReport(const std::string& dir) {
  std::filesystem::path base(dir);
  std::ifstream summary_in(base / kSummaryFile, std::ios::binary);
  if (!summary_in) {
    return absl::NotFoundError(absl::StrCat("no ", ToAbsl(kSummaryFile), " in ", dir));
  }
  json summary = json::parse(summary_in, nullptr, /*allow_exceptions=*/false);
  if (summary.is_discarded() || !summary.is_object()) {
    return absl::InvalidArgumentError(absl::StrCat(dir, ": unreadable summary"));
  }
  AttackReport report;
  try {
    report.n_test = summary.at("n_test").get<size_t>();
    report.n_proposed = summary.at("n_proposed").get<size_t>();
    report.n_inconsistent = summary.at("n_inconsistent").get<size_t>();
    report.n_success = summary.at("n_success").get<size_t>();
    report.s_r = summary.at("s_r").get<double>();
    report.h_r = summary.at("h_r").get<double>();
    report.errors = summary.at("errors").get<size_t>();
    report.instance_ids = summary.at("instance_ids").get<std::vector<std::string>>();
    if (summary.contains("naturalness_multiplier")) {
      report.naturalness_multiplier = summary.at("naturalness_multiplier").get<double>();
    }
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat(dir, ": bad summary: ", e.what()));
  }
  std::ifstream records_in(base / kRecordsFile, std::ios::binary);
  if (!records_in) {
    return absl::NotFoundError(absl::StrCat("no ", ToAbsl(kRecordsFile), " in ", dir));
  }
  std::string line;
  while (std::getline(records_in, line)) {
    if (Trim(line).empty()) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) return absl::InvalidArgumentError(absl::StrCat(dir, ": bad record line"));
    absl::StatusOr<AttackRecord> r = RecordFromJson(j);
    if (!r.ok()) return r.status();
    report.records.push_back(*std::move(r));
  }
  return report;
}

}  // namespace nleguard
