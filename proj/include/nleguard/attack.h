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

#ifndef NLEGUARD_ATTACK_H_
#define NLEGUARD_ATTACK_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "nleguard/dataset.h"
#include "nleguard/kb.h"
#include "nleguard/modelclient.h"
#include "nleguard/tagger.h"
#include "nleguard/text.h"
#include "nleguard/textrules.h"

namespace nleguard {

enum class FilterReason { kNone, kDoubleNegation, kUnnaturalCose };

std::string_view FilterReasonName(FilterReason reason);
std::optional<FilterReason> ParseFilterReason(std::string_view name);

// Outcome of realizing one candidate statement against the model.
struct AttackRecord {
  std::string instance_id;
  std::string original_nle;
  std::string candidate;
  Rule rule = Rule::kNegAdd;
  std::string adversarial_variable;
  std::string adversarial_nle;
  std::string adversarial_label;
  bool inconsistent = false;
  FilterReason filtered_reason = FilterReason::kNone;
  // A model or reverse-explainer call failed; such records count nowhere.
  bool errored = false;
  std::string error;
  std::optional<Triplet> triplet;

  friend bool operator==(const AttackRecord&, const AttackRecord&) = default;
};

struct Metrics {
  double s_r = 0;
  double h_r = 0;
  size_t n_success = 0;       // N_c
  size_t n_inconsistent = 0;  // |I_s|
  size_t n_proposed = 0;      // |I_e|, without filtered or errored records
};

struct AttackReport {
  std::vector<AttackRecord> records;  // sorted by instance id
  std::vector<std::string> instance_ids;  // every attacked id, sorted
  size_t n_test = 0;
  size_t n_proposed = 0;
  size_t n_inconsistent = 0;
  size_t n_success = 0;
  double s_r = 0;
  double h_r = 0;
  size_t errors = 0;
  std::optional<double> naturalness_multiplier;
};

struct AttackConfig {
  CandidateConfig candidates;
  size_t parallelism = 8;
  // Fraction of failed model calls tolerated before the run fails.
  double max_error_rate = 0.01;
  // Separates the two distractors in CQA reverse-explainer output.
  std::string cose_delimiter = ", ";
  const WordSet* stopwords = nullptr;  // DefaultStopwords() when null
  // Optional factor applied to detected counts in the summary to account for
  // unnatural adversarial inputs judged offline.
  std::optional<double> naturalness_multiplier;
  // Text appended to the context the model sees (knowledge grounding). The
  // reverse explainer always sees the plain context.
  std::function<std::string(const Instance&)> context_suffix;
};

// True iff normalize(adversarial_nle) equals a candidate's normalized text.
bool CheckInconsistency(std::string_view adversarial_nle,
                        const CandidateSet& candidates);

// True (filter out) when both explanations contain a negation.
bool FilterDoubleNegation(std::string_view original_nle,
                          std::string_view adversarial_nle);

// True (filter out) when a generated choice is a stopword or repeats the
// correct answer.
bool CoseNaturalnessFilter(std::span<const std::string> choices,
                           std::string_view correct_answer,
                           const WordSet& stopwords);

// S_r = N_c / n_test and H_r = |I_s| / |I_e| (0 when |I_e| = 0).
absl::StatusOr<Metrics> ComputeMetrics(std::span<const AttackRecord> records,
                                       size_t n_test);

// Runs the attack over `dataset`. Instances are processed concurrently up to
// `config.parallelism`; the report does not depend on scheduling.
absl::StatusOr<AttackReport> RunAttack(std::span<const Instance> dataset,
                                       const ModelClient& model,
                                       const ModelClient& reverse,
                                       const KnowledgeBase& kb,
                                       const Tagger& tagger,
                                       const AttackConfig& config = {});

nlohmann::json ToJson(const AttackRecord& record);
absl::StatusOr<AttackRecord> RecordFromJson(const nlohmann::json& j);
nlohmann::json SummaryJson(const AttackReport& report);

// Writes summary.json and records.jsonl into `dir`.
absl::Status WriteReport(const AttackReport& report, const std::string& dir);
// Reads what WriteReport wrote.
absl::StatusOr<AttackReport> ReadReport(const std::string& dir);

}  // namespace nleguard

#endif  // NLEGUARD_ATTACK_H_
