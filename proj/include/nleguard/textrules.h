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

#ifndef NLEGUARD_TEXTRULES_H_
#define NLEGUARD_TEXTRULES_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/container/flat_hash_set.h"
#include "absl/status/statusor.h"
#include "nleguard/kb.h"
#include "nleguard/tagger.h"

namespace nleguard {

enum class Rule { kNegAdd, kNegRemove, kAntonymSwap, kNounSwap };

std::string_view RuleName(Rule rule);
std::optional<Rule> ParseRule(std::string_view name);

// A statement meant to contradict a source explanation. The source tokens
// [span_begin, span_end) are replaced by the whitespace tokens of
// `replacement` (an empty span is an insertion, an empty replacement a
// deletion).
struct Candidate {
  std::string text;
  Rule rule = Rule::kNegAdd;
  size_t span_begin = 0;
  size_t span_end = 0;
  std::string replacement;
  // KB assertion behind antonym and noun swaps.
  std::optional<Triplet> triplet;
};

struct CandidateSet {
  std::string source_nle;
  std::vector<Candidate> candidates;

  bool empty() const { return candidates.empty(); }
  size_t size() const { return candidates.size(); }
};

struct CandidateConfig {
  size_t max_candidates_per_nle = 64;
};

// True when any token is not/never/no/cannot or ends in "n't"
// (case-insensitive).
bool ContainsNegation(std::string_view sentence);

// Removes the first not/n't, or adds one following the `<A> is/are <B>` and
// `<A> has/have <noun B>` templates. At most one candidate.
std::vector<Candidate> Negate(const TaggedSentence& tagged);

// One candidate per (ADJ/ADV token, KB antonym), ordered by token then
// antonym order.
std::vector<Candidate> AntonymSwap(const TaggedSentence& tagged,
                                   const KnowledgeBase& kb);

// Replaces a sentence-final noun with each unrelated noun from the KB.
std::vector<Candidate> NounSwap(const TaggedSentence& tagged,
                                const KnowledgeBase& kb);

// Negation, antonym and noun candidates, deduplicated on Normalize() (first
// rule wins), never equal to the source, truncated to the configured cap.
absl::StatusOr<CandidateSet> GenerateCandidates(std::string_view nle,
                                                const KnowledgeBase& kb,
                                                const Tagger& tagger,
                                                const CandidateConfig& config = {});

}  // namespace nleguard

#endif  // NLEGUARD_TEXTRULES_H_
