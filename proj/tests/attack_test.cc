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
#include <functional>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace nleguard {
namespace {

using ::testing::HasSubstr;

constexpr char kPremise[] = "A man is riding his dirt bike through the air in the desert.";
constexpr char kHypothesis[] = "A man is on a motorbike";

// Model whose answers are computed by callbacks; records what it was asked.
class ScriptedModel : public ModelClient {
 public:
  using PredictFn = std::function<absl::StatusOr<Prediction>(std::string_view, std::string_view)>;
  using ReverseFn = std::function<absl::StatusOr<std::string>(std::string_view, std::string_view)>;

  ScriptedModel(PredictFn predict, ReverseFn reverse, bool healthy = true)
      : predict_(std::move(predict)), reverse_(std::move(reverse)), healthy_(healthy) {}

  absl::StatusOr<Prediction> Predict(std::string_view context,
                                     std::string_view variable) const override {
    {
      std::lock_guard<std::mutex> lock(mu_);
      predict_calls_.emplace_back(std::string(context), std::string(variable));
    }
    return predict_(context, variable);
  }
  absl::StatusOr<std::string> Reverse(std::string_view context,
                                      std::string_view nle) const override {
    {
      std::lock_guard<std::mutex> lock(mu_);
      reverse_calls_.emplace_back(std::string(context), std::string(nle));
    }
    return reverse_(context, nle);
  }
  bool Healthy() const override { return healthy_; }

  std::vector<std::pair<std::string, std::string>> predict_calls() const {
    std::lock_guard<std::mutex> lock(mu_);
    return predict_calls_;
  }
  std::vector<std::pair<std::string, std::string>> reverse_calls() const {
    std::lock_guard<std::mutex> lock(mu_);
    return reverse_calls_;
  }

 private:
  PredictFn predict_;
  ReverseFn reverse_;
  bool healthy_;
  mutable std::mutex mu_;
  mutable std::vector<std::pair<std::string, std::string>> predict_calls_;
  mutable std::vector<std::pair<std::string, std::string>> reverse_calls_;
};

ScriptedModel::ReverseFn EchoNle() {
  return [](std::string_view, std::string_view nle) -> absl::StatusOr<std::string> {
    return std::string(nle);
  };
}

Instance Nli(std::string id, std::string context, std::string variable) {
  Instance i;
  i.id = std::move(id);
  i.context = std::move(context);
  i.variable = std::move(variable);
  i.gold_label = "entailment";
  return i;
}

CandidateSet Candidates(std::initializer_list<const char*> texts) {
  CandidateSet set;
  for (const char* t : texts) set.candidates.push_back({t, Rule::kNegAdd});
  return set;
}

AttackRecord Record(std::string id, bool inconsistent,
                    FilterReason reason = FilterReason::kNone, bool errored = false) {
  AttackRecord r;
  r.instance_id = std::move(id);
  r.inconsistent = inconsistent;
  r.filtered_reason = reason;
  r.errored = errored;
  return r;
}

class AttackTest : public ::testing::Test {
 protected:
  KnowledgeBase kb_ = testing::MakeKb(testing::ExampleTriplets());
  const Tagger& tagger_ = LexiconTagger::Default();
};

TEST(CheckInconsistencyTest, Examples) {
  CandidateSet set = Candidates({"A dirt bike is not a motorbike."});
  EXPECT_TRUE(CheckInconsistency("a dirt bike is not a motorbike", set));
  EXPECT_FALSE(CheckInconsistency("A dirt bike is a motorbike.", set));
  EXPECT_FALSE(CheckInconsistency("A dirt bike is not a motorcycle.", set));
  EXPECT_FALSE(CheckInconsistency("anything", CandidateSet{}));
}

TEST(FilterDoubleNegationTest, AllDoublyNegatedPairsAreFiltered) {
  const std::pair<const char*, const char*> pairs[] = {
      {"Not all men are teaching science.", "Not all men are teaching biology."},
      {"A dog is not a car.", "A dog is not a bike."},
      {"The boy is not necessarily looking at another boy.",
       "The boy is not necessarily looking at another female."},
      {"A child is not a man.", "A child is not a wife."},
      {"A bird is not a squirrel.", "A bird is not a moose."},
      {"A group of dogs is not a woman.", "A group of dogs is not a person."},
  };
  for (const auto& [a, b] : pairs) EXPECT_TRUE(FilterDoubleNegation(a, b)) << a;
}

TEST(FilterDoubleNegationTest, SinglyNegatedPairsAreKept) {
  EXPECT_FALSE(FilterDoubleNegation("A dog is an animal.", "A dog is not an animal."));
  EXPECT_FALSE(FilterDoubleNegation("A dog is not a car.", "A dog is a car."));
  EXPECT_FALSE(FilterDoubleNegation("A dirt bike is a motorbike.", "It is a motorbike."));
}

TEST(CoseNaturalnessFilterTest, Examples) {
  const WordSet& stop = DefaultStopwords();
  std::vector<std::string> a = {"the", "heat"};
  std::vector<std::string> b = {"heat", "light"};
  std::vector<std::string> c = {"resentment", "fear"};
  std::vector<std::string> d = {"Light.", "heat"};
  EXPECT_TRUE(CoseNaturalnessFilter(a, "light", stop));
  EXPECT_TRUE(CoseNaturalnessFilter(b, "light", stop));
  EXPECT_FALSE(CoseNaturalnessFilter(c, "hope", stop));
  EXPECT_TRUE(CoseNaturalnessFilter(d, "light", stop));
}

TEST(ComputeMetricsTest, Examples) {
  std::vector<AttackRecord> none = {Record("a", false), Record("b", false)};
  absl::StatusOr<Metrics> m = ComputeMetrics(none, 2);
  ASSERT_TRUE(m.ok());
  EXPECT_EQ(m->s_r, 0.0);
  EXPECT_EQ(m->h_r, 0.0);
  EXPECT_EQ(m->n_success, 0u);

  std::vector<AttackRecord> all = {Record("a", true), Record("a", true), Record("b", true)};
  m = ComputeMetrics(all, 2);
  ASSERT_TRUE(m.ok());
  EXPECT_EQ(m->s_r, 1.0);
  EXPECT_EQ(m->h_r, 1.0);

  std::vector<AttackRecord> hundred;
  for (int i = 0; i < 100; ++i) hundred.push_back(Record("x" + std::to_string(i % 7), i < 3));
  m = ComputeMetrics(hundred, 10);
  ASSERT_TRUE(m.ok());
  EXPECT_EQ(m->n_inconsistent, 3u);
  EXPECT_EQ(m->n_proposed, 100u);
  EXPECT_DOUBLE_EQ(m->h_r, 0.03);
  EXPECT_DOUBLE_EQ(m->s_r, 0.3);

  EXPECT_EQ(ComputeMetrics(none, 0).status().code(), absl::StatusCode::kInvalidArgument);
}

TEST(ComputeMetricsTest, FilteredAndErroredRecordsCountNowhere) {
  std::vector<AttackRecord> records = {
      Record("a", true), Record("a", false, FilterReason::kDoubleNegation),
      Record("b", false, FilterReason::kUnnaturalCose), Record("c", false, FilterReason::kNone, true),
      Record("d", false)};
  absl::StatusOr<Metrics> m = ComputeMetrics(records, 4);
  ASSERT_TRUE(m.ok());
  EXPECT_EQ(m->n_proposed, 2u);
  EXPECT_EQ(m->n_inconsistent, 1u);
  EXPECT_EQ(m->n_success, 1u);
  EXPECT_DOUBLE_EQ(m->h_r, 0.5);
  EXPECT_DOUBLE_EQ(m->s_r, 0.25);
}

std::vector<AttackRecord> RandomRecords(std::mt19937_64& rng, size_t n_test) {
  std::vector<AttackRecord> out;
  std::uniform_int_distribution<size_t> per(0, 6);
  for (size_t i = 0; i < n_test; ++i) {
    for (size_t k = per(rng); k > 0; --k) {
      FilterReason reason = FilterReason::kNone;
      bool errored = false;
      switch (rng() % 6) {
        case 0: reason = FilterReason::kDoubleNegation; break;
        case 1: reason = FilterReason::kUnnaturalCose; break;
        case 2: errored = true; break;
        default: break;
      }
      bool inconsistent = reason == FilterReason::kNone && !errored && rng() % 3 == 0;
      out.push_back(Record("id" + std::to_string(i), inconsistent, reason, errored));
    }
  }
  return out;
}

TEST(ComputeMetricsTest, ShuffleInvarianceAndMonotonicity) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    size_t n_test = 1 + rng() % 30;
    std::vector<AttackRecord> records = RandomRecords(rng, n_test);
    absl::StatusOr<Metrics> before = ComputeMetrics(records, n_test);
    ASSERT_TRUE(before.ok());
    std::shuffle(records.begin(), records.end(), rng);
    absl::StatusOr<Metrics> shuffled = ComputeMetrics(records, n_test);
    EXPECT_EQ(before->s_r, shuffled->s_r);
    EXPECT_EQ(before->h_r, shuffled->h_r);
    EXPECT_EQ(before->n_success, shuffled->n_success);

    records.push_back(Record("id" + std::to_string(rng() % n_test), true));
    absl::StatusOr<Metrics> more = ComputeMetrics(records, n_test);
    EXPECT_GE(more->s_r, before->s_r);
    EXPECT_GE(more->h_r, before->h_r);
    EXPECT_LE(more->s_r, 1.0);
    EXPECT_LE(more->h_r, 1.0);
  }
}

TEST_F(AttackTest, DirtBikeEndToEnd) {
  MockModelClient mock({MockFallback::kFixedLabel, "neutral"});
  mock.AddPrediction(kPremise, kHypothesis, {"entailment", "A dirt bike is a motorbike."});
  mock.AddReverse(kPremise, "A dirt bike is not a motorbike.", "The man is riding a motorbike.");
  mock.AddPrediction(kPremise, "The man is riding a motorbike.",
                     {"contradiction", "A dirt bike is not a motorbike."});
  std::vector<Instance> data = {Nli("dirt-bike", kPremise, kHypothesis)};
  absl::StatusOr<AttackReport> report = RunAttack(data, mock, mock, kb_, tagger_);
  ASSERT_TRUE(report.ok()) << report.status();
  auto hit = std::find_if(report->records.begin(), report->records.end(),
                          [](const AttackRecord& r) { return r.inconsistent; });
  ASSERT_NE(hit, report->records.end());
  EXPECT_EQ(hit->candidate, "A dirt bike is not a motorbike.");
  EXPECT_EQ(hit->rule, Rule::kNegAdd);
  EXPECT_EQ(hit->original_nle, "A dirt bike is a motorbike.");
  EXPECT_EQ(hit->adversarial_variable, "The man is riding a motorbike.");
  EXPECT_EQ(hit->adversarial_label, "contradiction");
  EXPECT_EQ(report->n_success, 1u);
  EXPECT_EQ(report->s_r, 1.0);
  EXPECT_EQ(report->n_inconsistent, 1u);
  EXPECT_EQ(report->n_proposed, report->records.size());
  EXPECT_DOUBLE_EQ(report->h_r, 1.0 / static_cast<double>(report->records.size()));
}

TEST_F(AttackTest, TwoOfTenInstancesSucceed) {
  const std::set<std::string> weak = {"ctx-3", "ctx-7"};
  ScriptedModel model(
      [&](std::string_view context, std::string_view variable) -> absl::StatusOr<Prediction> {
        if (variable == "h" || !weak.contains(std::string(context))) {
          return Prediction{"entailment", "A dog is an animal."};
        }
        return Prediction{"contradiction", "A dog is not an animal."};
      },
      EchoNle());
  std::vector<Instance> data;
  for (int i = 0; i < 10; ++i) data.push_back(Nli("i" + std::to_string(i), "ctx-" + std::to_string(i), "h"));
  absl::StatusOr<AttackReport> report = RunAttack(data, model, model, kb_, tagger_);
  ASSERT_TRUE(report.ok()) << report.status();

  absl::StatusOr<CandidateSet> cands = GenerateCandidates("A dog is an animal.", kb_, tagger_);
  ASSERT_TRUE(cands.ok());
  EXPECT_EQ(report->n_test, 10u);
  EXPECT_EQ(report->n_success, 2u);
  EXPECT_DOUBLE_EQ(report->s_r, 0.2);
  EXPECT_EQ(report->n_proposed, 10 * cands->size());
  // Every record of a weak instance lands on the negation candidate.
  EXPECT_EQ(report->n_inconsistent, 2 * cands->size());
  EXPECT_DOUBLE_EQ(report->h_r, 0.2);
  EXPECT_EQ(report->errors, 0u);
}

TEST_F(AttackTest, EchoingTheOriginalExplanationFindsNothing) {
  ScriptedModel model(
      [](std::string_view, std::string_view) -> absl::StatusOr<Prediction> {
        return Prediction{"entailment", "A dirt bike is a motorbike."};
      },
      EchoNle());
  std::vector<Instance> data;
  for (int i = 0; i < 5; ++i) data.push_back(Nli("i" + std::to_string(i), kPremise, kHypothesis));
  absl::StatusOr<AttackReport> report = RunAttack(data, model, model, kb_, tagger_);
  ASSERT_TRUE(report.ok());
  EXPECT_GT(report->n_proposed, 0u);
  EXPECT_EQ(report->s_r, 0.0);
  EXPECT_EQ(report->h_r, 0.0);
}

TEST_F(AttackTest, DoubleNegatedPairsAreFilteredInTheLoop) {
  ScriptedModel model(
      [](std::string_view, std::string_view variable) -> absl::StatusOr<Prediction> {
        if (variable == "h") return Prediction{"contradiction", "A bird is not a squirrel."};
        return Prediction{"contradiction", "A bird is not a moose."};
      },
      EchoNle());
  std::vector<Instance> data = {Nli("a", "A bird sits.", "h")};
  absl::StatusOr<AttackReport> report = RunAttack(data, model, model, kb_, tagger_);
  ASSERT_TRUE(report.ok());
  ASSERT_FALSE(report->records.empty());
  for (const AttackRecord& r : report->records) {
    EXPECT_EQ(r.filtered_reason, FilterReason::kDoubleNegation);
    EXPECT_FALSE(r.inconsistent);
  }
  EXPECT_EQ(report->n_proposed, 0u);
  EXPECT_EQ(report->h_r, 0.0);
}

TEST_F(AttackTest, ReverseFailuresAreErroredAndBudgeted) {
  ScriptedModel model(
      [](std::string_view, std::string_view) -> absl::StatusOr<Prediction> {
        return Prediction{"entailment", "A dog is an animal."};
      },
      [](std::string_view, std::string_view) -> absl::StatusOr<std::string> {
        return absl::UnavailableError("reverse down");
      });
  std::vector<Instance> data = {Nli("a", "c", "h")};
  absl::StatusOr<AttackReport> report = RunAttack(data, model, model, kb_, tagger_);
  EXPECT_EQ(report.status().code(), absl::StatusCode::kUnavailable);
  EXPECT_THAT(report.status().message(), HasSubstr("error budget"));

  AttackConfig lenient;
  lenient.max_error_rate = 1.0;
  report = RunAttack(data, model, model, kb_, tagger_, lenient);
  ASSERT_TRUE(report.ok());
  EXPECT_GT(report->errors, 0u);
  EXPECT_EQ(report->errors, report->records.size());
  EXPECT_EQ(report->n_proposed, 0u);
  for (const AttackRecord& r : report->records) {
    EXPECT_TRUE(r.errored);
    EXPECT_EQ(r.error, "reverse down");
  }
}

TEST_F(AttackTest, OriginalPredictionFailureCountsAsAnError) {
  ScriptedModel model(
      [](std::string_view, std::string_view) -> absl::StatusOr<Prediction> {
        return absl::UnavailableError("down");
      },
      EchoNle());
  std::vector<Instance> data = {Nli("a", "c", "h")};
  EXPECT_FALSE(RunAttack(data, model, model, kb_, tagger_).ok());
  AttackConfig lenient;
  lenient.max_error_rate = 1.0;
  absl::StatusOr<AttackReport> report = RunAttack(data, model, model, kb_, tagger_, lenient);
  ASSERT_TRUE(report.ok());
  EXPECT_EQ(report->errors, 1u);
  EXPECT_TRUE(report->records.empty());
  EXPECT_EQ(report->s_r, 0.0);
}

TEST_F(AttackTest, RejectsEmptyDatasetUnhealthyClientsAndDuplicateIds) {
  ScriptedModel healthy(
      [](std::string_view, std::string_view) -> absl::StatusOr<Prediction> {
        return Prediction{"x", "y"};
      },
      EchoNle());
  ScriptedModel sick(
      [](std::string_view, std::string_view) -> absl::StatusOr<Prediction> {
        ADD_FAILURE() << "called an unhealthy client";
        return Prediction{};
      },
      EchoNle(), /*healthy=*/false);
  std::vector<Instance> data = {Nli("a", "c", "h")};
  EXPECT_EQ(RunAttack({}, healthy, healthy, kb_, tagger_).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(RunAttack(data, sick, healthy, kb_, tagger_).status().code(),
            absl::StatusCode::kUnavailable);
  EXPECT_EQ(RunAttack(data, healthy, sick, kb_, tagger_).status().code(),
            absl::StatusCode::kUnavailable);
  std::vector<Instance> dup = {Nli("a", "c", "h"), Nli("a", "d", "h")};
  EXPECT_EQ(RunAttack(dup, healthy, healthy, kb_, tagger_).status().code(),
            absl::StatusCode::kInvalidArgument);
}

Instance SunQuestion() {
  Instance i;
  i.id = "sun";
  i.task = Task::kCqa;
  i.choices = {"heat", "light", "life on earth"};
  i.answer = "heat";
  i.context = "What does the sun give off? heat";
  i.variable = "light, life on earth";
  i.gold_label = "heat";
  return i;
}

TEST_F(AttackTest, CqaReattachesTheAnswerAndFiltersUnnaturalChoices) {
  std::vector<std::string> reverse_outputs = {"the, light", "light, heat", "one choice",
                                              "darkness, cold"};
  for (const std::string& out : reverse_outputs) {
    ScriptedModel model(
        [](std::string_view, std::string_view variable) -> absl::StatusOr<Prediction> {
          if (variable == "heat, light, life on earth") {
            return Prediction{"heat", "heat and light."};
          }
          return Prediction{"heat", "heat and darkness."};
        },
        [&](std::string_view, std::string_view) -> absl::StatusOr<std::string> { return out; });
    std::vector<Instance> data = {SunQuestion()};
    absl::StatusOr<AttackReport> report = RunAttack(data, model, model, kb_, tagger_);
    ASSERT_TRUE(report.ok()) << report.status();
    ASSERT_FALSE(report->records.empty());
    const bool natural = out == "darkness, cold";
    for (const AttackRecord& r : report->records) {
      EXPECT_EQ(r.filtered_reason,
                natural ? FilterReason::kNone : FilterReason::kUnnaturalCose)
          << out;
    }
    std::vector<std::pair<std::string, std::string>> calls = model.predict_calls();
    EXPECT_EQ(calls.front().first, "What does the sun give off?");
    if (natural) {
      EXPECT_EQ(calls.back().second, "heat, darkness, cold");
      EXPECT_EQ(report->n_success, 1u);
    } else {
      EXPECT_EQ(calls.size(), 1u);
    }
    for (const auto& [context, nle] : model.reverse_calls()) {
      EXPECT_EQ(context, "What does the sun give off? heat");
    }
  }
}

TEST_F(AttackTest, ContextSuffixReachesOnlyThePredictor) {
  ScriptedModel model(
      [](std::string_view, std::string_view) -> absl::StatusOr<Prediction> {
        return Prediction{"entailment", "A dog is an animal."};
      },
      EchoNle());
  AttackConfig config;
  config.context_suffix = [](const Instance& i) { return " Context: about " + i.id; };
  std::vector<Instance> data = {Nli("a", "c", "h")};
  ASSERT_TRUE(RunAttack(data, model, model, kb_, tagger_, config).ok());
  for (const auto& call : model.predict_calls()) EXPECT_EQ(call.first, "c Context: about a");
  for (const auto& call : model.reverse_calls()) EXPECT_EQ(call.first, "c");
}

std::string Serialize(const AttackReport& report) {
  std::string out = SummaryJson(report).dump();
  for (const AttackRecord& r : report.records) out += "\n" + ToJson(r).dump();
  return out;
}

// Half the contexts make the model contradict itself on negated inputs.
ScriptedModel Flaky() {
  return ScriptedModel(
      [](std::string_view context, std::string_view variable) -> absl::StatusOr<Prediction> {
        if (variable == "h") return Prediction{"entailment", "Hussars are professional riders."};
        if (context.size() % 2 == 0) return Prediction{"contradiction", std::string(variable)};
        return Prediction{"entailment", "Hussars are professional riders."};
      },
      EchoNle());
}

TEST_F(AttackTest, ReportIsIndependentOfSchedulingAndInputOrder) {
  std::mt19937_64 rng(3);
  std::vector<Instance> data;
  for (int i = 0; i < 40; ++i) {
    data.push_back(Nli("n" + std::to_string(rng() % 100000), std::string(1 + rng() % 9, 'c'), "h"));
  }
  std::sort(data.begin(), data.end(), [](auto& a, auto& b) { return a.id < b.id; });
  data.erase(std::unique(data.begin(), data.end(), [](auto& a, auto& b) { return a.id == b.id; }),
             data.end());
  ScriptedModel model = Flaky();
  AttackConfig serial;
  serial.parallelism = 1;
  absl::StatusOr<AttackReport> a = RunAttack(data, model, model, kb_, tagger_, serial);
  ASSERT_TRUE(a.ok());
  std::shuffle(data.begin(), data.end(), rng);
  AttackConfig wide;
  wide.parallelism = 8;
  absl::StatusOr<AttackReport> b = RunAttack(data, model, model, kb_, tagger_, wide);
  ASSERT_TRUE(b.ok());
  EXPECT_EQ(Serialize(*a), Serialize(*b));
  EXPECT_GT(a->n_success, 0u);
  EXPECT_TRUE(std::is_sorted(a->instance_ids.begin(), a->instance_ids.end()));
}

TEST_F(AttackTest, ReportRoundTripsAndMembershipIsRecheckable) {
  std::vector<Instance> data;
  for (int i = 0; i < 12; ++i) data.push_back(Nli("r" + std::to_string(i), std::string(i + 1, 'x'), "h"));
  ScriptedModel model = Flaky();
  AttackConfig config;
  config.naturalness_multiplier = 0.815;
  absl::StatusOr<AttackReport> report = RunAttack(data, model, model, kb_, tagger_, config);
  ASSERT_TRUE(report.ok());
  ASSERT_GT(report->n_inconsistent, 0u);

  testing::TempDir dir;
  ASSERT_TRUE(WriteReport(*report, dir.File("run")).ok());
  absl::StatusOr<AttackReport> back = ReadReport(dir.File("run"));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(Serialize(*report), Serialize(*back));
  EXPECT_EQ(back->records, report->records);
  EXPECT_EQ(back->naturalness_multiplier, 0.815);

  nlohmann::json summary = nlohmann::json::parse(testing::ReadAll(dir.File("run/summary.json")));
  EXPECT_DOUBLE_EQ(summary["h_r_adjusted"].get<double>(), report->h_r * 0.815);

  // Only the serialized records and the KB are used below.
  for (const AttackRecord& r : back->records) {
    if (!r.inconsistent) continue;
    EXPECT_EQ(r.filtered_reason, FilterReason::kNone);
    absl::StatusOr<CandidateSet> c = GenerateCandidates(r.original_nle, kb_, tagger_);
    ASSERT_TRUE(c.ok());
    EXPECT_TRUE(CheckInconsistency(r.adversarial_nle, *c)) << r.adversarial_nle;
  }

  ASSERT_TRUE(WriteReport(*report, dir.File("again")).ok());
  EXPECT_EQ(testing::ReadAll(dir.File("run/records.jsonl")),
            testing::ReadAll(dir.File("again/records.jsonl")));
  EXPECT_EQ(testing::ReadAll(dir.File("run/summary.json")),
            testing::ReadAll(dir.File("again/summary.json")));
}

TEST(RecordJsonTest, RejectsInconsistentFilteredRecords) {
  AttackRecord r = Record("a", true);
  r.triplet = Triplet{"professional", "Antonym", "amateur", 2.0};
  absl::StatusOr<AttackRecord> back = RecordFromJson(ToJson(r));
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(*back, r);
  nlohmann::json bad = ToJson(r);
  bad["filtered_reason"] = "DOUBLE_NEGATION";
  EXPECT_FALSE(RecordFromJson(bad).ok());
  bad["filtered_reason"] = "SOMETHING";
  EXPECT_FALSE(RecordFromJson(bad).ok());
  EXPECT_FALSE(RecordFromJson(nlohmann::json::object()).ok());
  EXPECT_EQ(ReadReport("/nonexistent/dir").status().code(), absl::StatusCode::kNotFound);
}

}  // namespace
}  // namespace nleguard
