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

#ifndef NLEGUARD_KB_H_
#define NLEGUARD_KB_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace nleguard {

inline constexpr std::string_view kIsA = "IsA";
inline constexpr std::string_view kAntonym = "Antonym";
inline constexpr std::string_view kDistinctFrom = "DistinctFrom";

// One knowledge-base assertion. Terms are normalized: lowercase, words
// separated by single spaces.
struct Triplet {
  std::string subject;
  std::string relation;
  std::string object;
  double weight = 0.0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

// Identity of an assertion, ignoring its weight.
using TripletKey = std::tuple<std::string, std::string, std::string>;
inline TripletKey KeyOf(const Triplet& t) { return {t.subject, t.relation, t.object}; }

// The order every lookup returns: weight descending, then relation, object
// and subject ascending.
bool StableLess(const Triplet& a, const Triplet& b);

// "{subject, relation, object}"
std::string ToString(const Triplet& t);

// Lowercases, maps '_' to ' ', and collapses whitespace.
std::string NormalizeTerm(std::string_view term);

// (subject, relation, object) assertions that are never indexed.
class Blocklist {
 public:
  // When symmetric, blocking (a, R, b) also blocks (b, R, a).
  explicit Blocklist(bool symmetric = true) : symmetric_(symmetric) {}

  // The curated noisy-antonym list shipped with the library.
  static Blocklist Default(bool symmetric = true);

  void Add(std::string_view subject, std::string_view relation,
           std::string_view object);

  // `subject<TAB>relation<TAB>object` lines; blank lines and `#` comments are
  // ignored.
  absl::Status AddFromText(std::string_view text);
  absl::Status AddFromFile(const std::string& path);

  bool Contains(std::string_view subject, std::string_view relation,
                std::string_view object) const;

  size_t size() const { return entries_.size(); }
  bool symmetric() const { return symmetric_; }

 private:
  bool symmetric_;
  absl::flat_hash_set<std::string> entries_;
};

std::set<std::string, std::less<>> DefaultRelations();

struct IngestConfig {
  std::set<std::string, std::less<>> relations = DefaultRelations();
  Blocklist blocklist = Blocklist::Default();
};

struct IngestSummary {
  size_t lines = 0;
  size_t kept = 0;
  size_t malformed = 0;
  size_t non_english = 0;
  size_t dropped_relation = 0;
  size_t blocked = 0;
};

// Immutable, indexed triplet store. Safe for concurrent readers.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  // Drops invalid triplets (empty terms, tabs/newlines, negative or
  // non-finite weight), relations outside the allowlist and blocked
  // triplets. Counts land in `summary` when given.
  static KnowledgeBase Build(std::vector<Triplet> triplets,
                             const IngestConfig& config,
                             IngestSummary* summary = nullptr);

  size_t size() const { return triplets_.size(); }
  bool empty() const { return triplets_.empty(); }

  // All triplets in stable order.
  std::vector<Triplet> AllTriplets() const;

  // True when `term` is the subject of at least one triplet.
  bool InVocabulary(std::string_view term) const;
  size_t vocabulary_size() const { return vocabulary_size_; }

  std::vector<std::string_view> Antonyms(std::string_view term) const;

  // Objects of DistinctFrom and Antonym triplets with subject `term`,
  // deduplicated.
  std::vector<std::string_view> UnrelatedNouns(std::string_view term) const;

  // The triplets behind UnrelatedNouns: first (stable-order) triplet per
  // distinct object.
  std::vector<Triplet> UnrelatedNounTriplets(std::string_view term) const;

  // Triplets whose subject or object equals `entity`.
  std::vector<Triplet> TripletsForEntity(std::string_view entity) const;

  std::vector<Triplet> BySubject(std::string_view term) const;
  std::vector<Triplet> ByObject(std::string_view term) const;
  std::vector<Triplet> BySubjectRelation(std::string_view term,
                                         std::string_view relation) const;

  // Line-based snapshot with a versioned magic header.
  absl::Status SaveSnapshot(const std::string& path) const;
  static absl::StatusOr<KnowledgeBase> LoadSnapshot(
      const std::string& path, const Blocklist& blocklist = Blocklist::Default());

 private:
  using TermId = uint32_t;
  using RelationId = uint16_t;

  struct Stored {
    TermId subject;
    TermId object;
    RelationId relation;
    double weight;
  };

  struct Range {
    uint32_t begin = 0;
    uint32_t end = 0;
  };

  std::optional<TermId> FindTerm(std::string_view term) const;
  std::optional<RelationId> FindRelation(std::string_view relation) const;
  Triplet Materialize(uint32_t index) const;
  std::vector<Triplet> Materialize(const std::vector<uint32_t>& indices) const;
  bool StableLessIndex(uint32_t a, uint32_t b) const;
  Range SubjectRelationRange(TermId term, RelationId relation) const;
  std::vector<uint32_t> UnrelatedIndices(std::string_view term) const;

  std::vector<std::string> terms_;
  absl::flat_hash_map<std::string, TermId> term_ids_;
  std::vector<uint32_t> term_rank_;
  std::vector<std::string> relations_;
  std::vector<uint32_t> relation_rank_;

  std::vector<Stored> triplets_;
  // CSR indices keyed by term id, each bucket in stable order.
  std::vector<uint32_t> subject_offsets_;
  std::vector<uint32_t> subject_index_;
  std::vector<uint32_t> object_offsets_;
  std::vector<uint32_t> object_index_;
  // Buckets of subject_index_ sorted by relation rank, then stable order.
  std::vector<uint32_t> subject_relation_index_;
  absl::flat_hash_map<uint64_t, Range> subject_relation_ranges_;
  size_t vocabulary_size_ = 0;
};

// Result of parsing one ConceptNet assertion line.
struct ParsedAssertion {
  enum class Kind { kTriplet, kNonEnglish, kMalformed };
  Kind kind = Kind::kMalformed;
  Triplet triplet;
};

// Tab-separated: assertion URI, relation URI, start URI, end URI, JSON
// metadata with a "weight" field.
ParsedAssertion ParseConceptNetLine(std::string_view line);

// Reads a ConceptNet assertions dump. Malformed lines are skipped and
// counted; an unreadable file is an error.
absl::StatusOr<KnowledgeBase> Ingest(const std::string& dump_path,
                                     const IngestConfig& config,
                                     IngestSummary* summary = nullptr);

// Loads a snapshot when the file starts with the snapshot magic, otherwise
// ingests it as a ConceptNet dump.
absl::StatusOr<KnowledgeBase> LoadKnowledgeBase(const std::string& path,
                                                const IngestConfig& config,
                                                IngestSummary* summary = nullptr);

}  // namespace nleguard

#endif  // NLEGUARD_KB_H_
