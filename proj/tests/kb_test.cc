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

#include "nleguard/kb.h"

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace nleguard {
namespace {

using ::testing::Contains;
using ::testing::ElementsAre;
using ::testing::IsEmpty;
using ::testing::Not;
using testing::ConceptNetLine;
using testing::MakeKb;

// Reference ordering written independently of the library comparator.
bool OracleBefore(const Triplet& a, const Triplet& b) {
  return std::make_tuple(-a.weight, a.relation, a.object, a.subject) <
         std::make_tuple(-b.weight, b.relation, b.object, b.subject);
}

std::vector<Triplet> OracleScan(const std::vector<Triplet>& all,
                                const std::function<bool(const Triplet&)>& keep) {
  std::vector<Triplet> out;
  for (const Triplet& t : all) {
    if (keep(t)) out.push_back(t);
  }
  std::sort(out.begin(), out.end(), OracleBefore);
  return out;
}

TEST(ParseConceptNetLineTest, EnglishAssertion) {
  ParsedAssertion p = ParseConceptNetLine(ConceptNetLine("dirt bike", "IsA", "motorcycle", 2.0));
  ASSERT_EQ(p.kind, ParsedAssertion::Kind::kTriplet);
  EXPECT_EQ(p.triplet, (Triplet{"dirt bike", "IsA", "motorcycle", 2.0}));
}

TEST(ParseConceptNetLineTest, NonEnglishAndMalformed) {
  EXPECT_EQ(ParseConceptNetLine(ConceptNetLine("hund", "IsA", "tier", 1.0, "de")).kind,
            ParsedAssertion::Kind::kNonEnglish);
  EXPECT_EQ(ParseConceptNetLine("only\ttwo").kind, ParsedAssertion::Kind::kMalformed);
  EXPECT_EQ(ParseConceptNetLine("/a/x\t/r/IsA\t/c/en/a\t/c/en/b\tnot json").kind,
            ParsedAssertion::Kind::kMalformed);
  EXPECT_EQ(ParseConceptNetLine("/a/x\t/r/IsA\t/c/en/a\t/c/en/b\t{\"w\": 1}").kind,
            ParsedAssertion::Kind::kMalformed);
  EXPECT_EQ(ParseConceptNetLine("/a/x\tIsA\t/c/en/a\t/c/en/b\t{\"weight\": 1}").kind,
            ParsedAssertion::Kind::kMalformed);
}

TEST(ParseConceptNetLineTest, NormalizesTerms) {
  ParsedAssertion p =
      ParseConceptNetLine("/a/x\t/r/Antonym\t/c/en/Dirt_Bike/n/wn\t/c/en/foot/n\t{\"weight\": 0.5}");
  ASSERT_EQ(p.kind, ParsedAssertion::Kind::kTriplet);
  EXPECT_EQ(p.triplet.subject, "dirt bike");
  EXPECT_EQ(p.triplet.object, "foot");
  EXPECT_EQ(p.triplet.relation, "Antonym");
  EXPECT_DOUBLE_EQ(p.triplet.weight, 0.5);
}

TEST(IngestTest, KeepsEnglishAllowlistedAndDropsBlocked) {
  testing::TempDir dir;
  std::string dump = ConceptNetLine("dirt bike", "IsA", "motorcycle", 2.0) + "\n" +
                     ConceptNetLine("man", "Antonym", "person", 1.0) + "\n" +
                     ConceptNetLine("hund", "IsA", "tier", 1.0, "fr") + "\n" +
                     ConceptNetLine("dog", "CapableOf", "bark", 1.0) + "\n" +
                     "garbage line\n";
  IngestSummary summary;
  absl::StatusOr<KnowledgeBase> kb = Ingest(dir.Write("dump.csv", dump), IngestConfig{}, &summary);
  ASSERT_TRUE(kb.ok()) << kb.status();
  EXPECT_EQ(kb->size(), 1u);
  EXPECT_THAT(kb->BySubject("dirt bike"),
              ElementsAre(Triplet{"dirt bike", "IsA", "motorcycle", 2.0}));
  EXPECT_THAT(kb->BySubject("man"), IsEmpty());
  EXPECT_THAT(kb->ByObject("person"), IsEmpty());
  EXPECT_THAT(kb->Antonyms("man"), IsEmpty());
  EXPECT_EQ(summary.lines, 5u);
  EXPECT_EQ(summary.kept, 1u);
  EXPECT_EQ(summary.blocked, 1u);
  EXPECT_EQ(summary.non_english, 1u);
  EXPECT_EQ(summary.dropped_relation, 1u);
  EXPECT_EQ(summary.malformed, 1u);
}

TEST(IngestTest, EmptyFileGivesEmptyKb) {
  testing::TempDir dir;
  absl::StatusOr<KnowledgeBase> kb = Ingest(dir.Write("empty.csv", ""), IngestConfig{});
  ASSERT_TRUE(kb.ok());
  EXPECT_TRUE(kb->empty());
  EXPECT_EQ(kb->vocabulary_size(), 0u);
  EXPECT_THAT(kb->BySubject("anything"), IsEmpty());
  EXPECT_THAT(kb->TripletsForEntity("anything"), IsEmpty());
  EXPECT_THAT(kb->UnrelatedNouns("anything"), IsEmpty());
}

TEST(IngestTest, MissingFileIsAnError) {
  testing::TempDir dir;
  absl::StatusOr<KnowledgeBase> kb = Ingest(dir.File("nope.csv"), IngestConfig{});
  EXPECT_EQ(kb.status().code(), absl::StatusCode::kNotFound);
}

TEST(KnowledgeBaseTest, Antonyms) {
  KnowledgeBase kb = MakeKb(testing::ExampleTriplets());
  EXPECT_THAT(kb.Antonyms("light"), ElementsAre("dark", "darkness"));
  EXPECT_THAT(kb.Antonyms("man"), Not(Contains("person")));
  EXPECT_THAT(kb.Antonyms("zzzz-unknown"), IsEmpty());
}

TEST(KnowledgeBaseTest, UnrelatedNounsMergeDistinctFromAndAntonym) {
  KnowledgeBase kb = MakeKb({{"dog", "DistinctFrom", "cat", 1.0},
                             {"dog", "Antonym", "cat", 2.0},
                             {"dog", "Antonym", "plant", 0.5},
                             {"dog", "IsA", "animal", 4.0},
                             {"human", "Antonym", "plant", 1.0}});
  EXPECT_THAT(kb.UnrelatedNouns("dog"), ElementsAre("cat", "plant"));
  EXPECT_THAT(kb.UnrelatedNouns("human"), ElementsAre("plant"));
  EXPECT_THAT(kb.UnrelatedNouns("unknown"), IsEmpty());
  std::vector<Triplet> behind = kb.UnrelatedNounTriplets("dog");
  ASSERT_EQ(behind.size(), 2u);
  EXPECT_EQ(behind[0], (Triplet{"dog", "Antonym", "cat", 2.0}));
}

TEST(KnowledgeBaseTest, TripletsForEntityCoversSubjectAndObject) {
  KnowledgeBase kb = MakeKb({{"heat", "IsA", "energy", 2.0},
                             {"light", "IsA", "energy", 1.0},
                             {"sun", "HasA", "light", 3.0}});
  EXPECT_THAT(kb.TripletsForEntity("heat"), ElementsAre(Triplet{"heat", "IsA", "energy", 2.0}));
  EXPECT_THAT(kb.TripletsForEntity("energy"),
              ElementsAre(Triplet{"heat", "IsA", "energy", 2.0},
                          Triplet{"light", "IsA", "energy", 1.0}));
  EXPECT_THAT(kb.TripletsForEntity("light"),
              ElementsAre(Triplet{"sun", "HasA", "light", 3.0},
                          Triplet{"light", "IsA", "energy", 1.0}));
  EXPECT_THAT(kb.TripletsForEntity("absent"), IsEmpty());
}

TEST(KnowledgeBaseTest, VocabularyIsSubjectTerms) {
  KnowledgeBase kb = MakeKb({{"heat", "IsA", "energy", 2.0}});
  EXPECT_TRUE(kb.InVocabulary("heat"));
  EXPECT_FALSE(kb.InVocabulary("energy"));
  EXPECT_EQ(kb.vocabulary_size(), 1u);
}

TEST(KnowledgeBaseTest, StableOrderByWeightThenRelationThenObject) {
  KnowledgeBase kb = MakeKb({{"a", "IsA", "z", 1.0},
                             {"a", "Antonym", "y", 1.0},
                             {"a", "Antonym", "b", 1.0},
                             {"a", "HasA", "c", 5.0}});
  EXPECT_THAT(kb.BySubject("a"), ElementsAre(Triplet{"a", "HasA", "c", 5.0},
                                              Triplet{"a", "Antonym", "b", 1.0},
                                              Triplet{"a", "Antonym", "y", 1.0},
                                              Triplet{"a", "IsA", "z", 1.0}));
}

TEST(KnowledgeBaseTest, RejectsInvalidTriplets) {
  IngestSummary summary;
  KnowledgeBase kb = KnowledgeBase::Build({{"", "IsA", "x", 1.0},
                                           {"a\tb", "IsA", "x", 1.0},
                                           {"a", "IsA", "x", -1.0},
                                           {"a", "Causes", "x", 1.0},
                                           {"a", "IsA", "x", 1.0}},
                                          IngestConfig{}, &summary);
  EXPECT_EQ(kb.size(), 1u);
  EXPECT_EQ(summary.malformed, 3u);
  EXPECT_EQ(summary.dropped_relation, 1u);
}

TEST(BlocklistTest, DefaultHoldsTheSevenEntriesSymmetrically) {
  Blocklist list = Blocklist::Default();
  EXPECT_EQ(list.size(), 14u);
  for (const Triplet& t : testing::BlockedTriplets()) {
    EXPECT_TRUE(list.Contains(t.subject, t.relation, t.object)) << ToString(t);
    EXPECT_TRUE(list.Contains(t.object, t.relation, t.subject)) << ToString(t);
  }
  EXPECT_FALSE(list.Contains("man", "IsA", "person"));
}

TEST(BlocklistTest, AsymmetricWhenConfigured) {
  Blocklist list = Blocklist::Default(/*symmetric=*/false);
  EXPECT_EQ(list.size(), 7u);
  EXPECT_TRUE(list.Contains("man", "Antonym", "person"));
  EXPECT_FALSE(list.Contains("person", "Antonym", "man"));

  IngestConfig config;
  config.blocklist = list;
  KnowledgeBase kb = KnowledgeBase::Build(
      {{"man", "Antonym", "person", 1}, {"person", "Antonym", "man", 1}}, config);
  EXPECT_THAT(kb.Antonyms("person"), ElementsAre("man"));
  EXPECT_THAT(kb.Antonyms("man"), IsEmpty());
}

TEST(BlocklistTest, TextFormat) {
  Blocklist list;
  ASSERT_TRUE(list.AddFromText("# comment\nDog\tAntonym\tCat\n\n").ok());
  EXPECT_TRUE(list.Contains("dog", "Antonym", "cat"));
  EXPECT_TRUE(list.Contains("cat", "Antonym", "dog"));
  EXPECT_EQ(list.AddFromText("dog\tAntonym").code(), absl::StatusCode::kInvalidArgument);
}

TEST(SnapshotTest, RoundTripPreservesEverything) {
  testing::TempDir dir;
  KnowledgeBase kb = MakeKb(testing::ExampleTriplets());
  std::string path = dir.File("kb.snapshot");
  ASSERT_TRUE(kb.SaveSnapshot(path).ok());
  absl::StatusOr<KnowledgeBase> loaded = LoadKnowledgeBase(path, IngestConfig{});
  ASSERT_TRUE(loaded.ok()) << loaded.status();
  EXPECT_EQ(loaded->AllTriplets(), kb.AllTriplets());

  std::string again = dir.File("again.snapshot");
  ASSERT_TRUE(loaded->SaveSnapshot(again).ok());
  EXPECT_EQ(testing::ReadAll(path), testing::ReadAll(again));
}

TEST(SnapshotTest, RejectsCorruptFiles) {
  testing::TempDir dir;
  EXPECT_EQ(KnowledgeBase::LoadSnapshot(dir.Write("a", "hello\n")).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(
      KnowledgeBase::LoadSnapshot(dir.Write("b", "#nleguard-kb-snapshot v1\n2\na\tIsA\tb\t1\n"))
          .ok());
  EXPECT_FALSE(
      KnowledgeBase::LoadSnapshot(dir.Write("c", "#nleguard-kb-snapshot v1\n1\na\tIsA\tb\n")).ok());
}

// Property checks over random KBs.

const std::vector<std::string> kTerms = {"man",   "person", "woman", "people", "flower",
                                         "plant", "dog",    "cat",   "children", "men",
                                         "humans", "politician", "light", "dark", "heat"};
const std::vector<std::string> kRelations = {"IsA", "Antonym", "DistinctFrom", "HasA",
                                             "RelatedTo"};

TEST(KnowledgeBasePropertyTest, IndexesMatchBruteForceScan) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 60; ++round) {
    std::vector<Triplet> raw = testing::RandomTriplets(rng, 80, kTerms, kRelations);
    KnowledgeBase kb = MakeKb(raw);
    std::vector<Triplet> kept;
    for (const Triplet& t : raw) {
      if (!testing::IsBlocked(t)) kept.push_back(t);
    }
    EXPECT_EQ(kb.AllTriplets(), OracleScan(kept, [](const Triplet&) { return true; }));
    for (const std::string& e : kTerms) {
      EXPECT_EQ(kb.TripletsForEntity(e), OracleScan(kept, [&](const Triplet& t) {
                  return t.subject == e || t.object == e;
                })) << e;
      EXPECT_EQ(kb.BySubject(e),
                OracleScan(kept, [&](const Triplet& t) { return t.subject == e; }));
      EXPECT_EQ(kb.ByObject(e),
                OracleScan(kept, [&](const Triplet& t) { return t.object == e; }));
      for (const std::string& r : kRelations) {
        EXPECT_EQ(kb.BySubjectRelation(e, r), OracleScan(kept, [&](const Triplet& t) {
                    return t.subject == e && t.relation == r;
                  }));
      }
      std::vector<std::string> unrelated;
      for (const Triplet& t : OracleScan(kept, [&](const Triplet& t) {
             return t.subject == e && (t.relation == "Antonym" || t.relation == "DistinctFrom");
           })) {
        if (std::find(unrelated.begin(), unrelated.end(), t.object) == unrelated.end()) {
          unrelated.push_back(t.object);
        }
      }
      std::vector<std::string> got;
      for (std::string_view v : kb.UnrelatedNouns(e)) got.emplace_back(v);
      EXPECT_EQ(got, unrelated) << e;
    }
  }
}

TEST(KnowledgeBasePropertyTest, NoQueryReturnsABlockedTriplet) {
  std::mt19937_64 rng(12);
  std::vector<Triplet> raw = testing::RandomTriplets(rng, 3000, kTerms, kRelations);
  for (const Triplet& b : testing::BlockedTriplets()) {
    raw.push_back(b);
    raw.push_back({b.object, b.relation, b.subject, 9.0});
  }
  KnowledgeBase kb = MakeKb(raw);
  for (const Triplet& t : kb.AllTriplets()) EXPECT_FALSE(testing::IsBlocked(t)) << ToString(t);
  for (const std::string& e : kTerms) {
    for (const Triplet& t : kb.TripletsForEntity(e)) EXPECT_FALSE(testing::IsBlocked(t));
    for (const Triplet& t : kb.UnrelatedNounTriplets(e)) EXPECT_FALSE(testing::IsBlocked(t));
  }
}

TEST(KnowledgeBasePropertyTest, IngestIsDeterministic) {
  testing::TempDir dir;
  std::mt19937_64 rng(13);
  std::string dump;
  for (const Triplet& t : testing::RandomTriplets(rng, 500, kTerms, kRelations)) {
    dump += ConceptNetLine(t.subject, t.relation, t.object, t.weight) + "\n";
  }
  std::string path = dir.Write("dump.csv", dump);
  absl::StatusOr<KnowledgeBase> a = Ingest(path, IngestConfig{});
  absl::StatusOr<KnowledgeBase> b = Ingest(path, IngestConfig{});
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(a->AllTriplets(), b->AllTriplets());
  for (const std::string& e : kTerms) {
    EXPECT_EQ(a->TripletsForEntity(e), b->TripletsForEntity(e));
    EXPECT_EQ(a->Antonyms(e), b->Antonyms(e));
  }
}

}  // namespace
}  // namespace nleguard
