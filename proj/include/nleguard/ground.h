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

#ifndef NLEGUARD_GROUND_H_
#define NLEGUARD_GROUND_H_

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "nleguard/dataset.h"
#include "nleguard/kb.h"
#include "nleguard/text.h"

namespace nleguard {

// Separator between a model input and its verbalized knowledge.
inline constexpr std::string_view kContextMarker = " Context: ";
inline constexpr std::string_view kKnowledgeJoiner = "; ";

// Per-relation triplet counts over the triplets extracted for one entity.
struct RelationCounts {
  std::map<std::string, size_t> counts;  // N_r
  size_t total = 0;                      // N = sum of N_r
  size_t k = 0;                          // K, triplets containing the entity
};

RelationCounts CountRelations(std::span<const Triplet> triplets);

struct ScoredTriplet {
  Triplet triplet;
  double score = 0;  // w * N / N_r
};

// Scores every triplet with s = w * N / N_r. Fails on empty input or on a
// triplet that does not mention `entity`.
absl::StatusOr<std::vector<ScoredTriplet>> ScoreTriplets(
    std::string_view entity, std::span<const Triplet> triplets);

// Position of the winner: highest score, then highest weight, then smallest
// (relation, object, subject). Scores and weights within a relative 1e-12
// count as ties. `scored` must be non-empty.
size_t BestScored(std::span<const ScoredTriplet> scored);

// Longest-match (up to three words), left-to-right, non-overlapping n-grams
// of the context found in the KB vocabulary; all-stopword n-grams are
// skipped. Deduplicated in order of first appearance.
std::vector<std::string> ExtractEntities(std::string_view context,
                                         const KnowledgeBase& kb,
                                         const WordSet& stopwords);

// One best triplet per extracted entity of the instance context, in entity
// order, without repeating a triplet.
std::vector<Triplet> SelectKnowledge(const Instance& instance,
                                     const KnowledgeBase& kb,
                                     const WordSet& stopwords);

// relation -> phrase, e.g. IsA -> "is a".
class TemplateTable {
 public:
  TemplateTable() = default;
  static const TemplateTable& Default();
  // The bundled table overridden by `relation<TAB>phrase` lines from `path`.
  static absl::StatusOr<TemplateTable> FromFile(const std::string& path);

  absl::Status AddFromText(std::string_view text);
  void Set(std::string_view relation, std::string_view phrase);
  const std::string* Find(std::string_view relation) const;

 private:
  absl::flat_hash_map<std::string, std::string> phrases_;
};

// "subject phrase object"; kNotFound naming the relation when it has no
// template.
absl::StatusOr<std::string> Verbalize(const Triplet& triplet,
                                      const TemplateTable& templates);

struct GroundedInstance {
  Instance base;
  std::vector<Triplet> selected;
  std::string knowledge;      // verbalizations joined by "; "
  std::string grounded_text;  // input, or input + " Context: " + knowledge
};

// Input text the model reads: the context followed by the variable part.
std::string InputTextOf(const Instance& instance);

absl::StatusOr<GroundedInstance> GroundInstance(const Instance& instance,
                                                const KnowledgeBase& kb,
                                                const WordSet& stopwords,
                                                const TemplateTable& templates);

// Inverse of grounding: the text before the last " Context: " marker.
std::string StripGrounding(std::string_view grounded_text);

nlohmann::json ToJson(const GroundedInstance& grounded);

struct Overlap {
  double ratio = 0;
  bool defined = false;  // false when the grounding set is empty
  size_t shared = 0;
  size_t grounding = 0;
};

// |attack ∩ grounding| / |grounding|.
Overlap KnowledgeOverlap(const std::set<TripletKey>& attack_triplets,
                         const std::set<TripletKey>& grounding_triplets);

}  // namespace nleguard

#endif  // NLEGUARD_GROUND_H_
