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

#include "nleguard/ground.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "nleguard/resources.h"

namespace nleguard {
namespace {

constexpr double kTieTolerance = 1e-12;

// -1, 0, 1 with values within a relative kTieTolerance counted as equal.
int CompareWithTolerance(double a, double b) {
  double scale = std::max(std::abs(a), std::abs(b));
  if (std::abs(a - b) <= kTieTolerance * scale) return 0;
  return a < b ? -1 : 1;
}

// True when `a` should be selected over `b`.
bool Better(const ScoredTriplet& a, const ScoredTriplet& b) {
  if (int c = CompareWithTolerance(a.score, b.score); c != 0) return c > 0;
  if (int c = CompareWithTolerance(a.triplet.weight, b.triplet.weight); c != 0) return c > 0;
  if (a.triplet.relation != b.triplet.relation) return a.triplet.relation < b.triplet.relation;
  if (a.triplet.object != b.triplet.object) return a.triplet.object < b.triplet.object;
  return a.triplet.subject < b.triplet.subject;
}

}  // namespace

RelationCounts CountRelations(std::span<const Triplet> triplets) {
  RelationCounts rc;
  for (const Triplet& t : triplets) ++rc.counts[t.relation];
  rc.total = triplets.size();
  rc.k = triplets.size();
  return rc;
}

absl::StatusOr<std::vector<ScoredTriplet>> ScoreTriplets(
    std::string_view entity, std::span<const Triplet> triplets) {
  if (triplets.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("no triplets to score for entity \"", ToAbsl(entity), "\""));
  }
  for (const Triplet& t : triplets) {
    if (t.subject != entity && t.object != entity) {
      return absl::InvalidArgumentError(
          absl::StrCat(ToString(t), " does not contain entity \"", ToAbsl(entity), "\""));
    }
  }
  RelationCounts rc = CountRelations(triplets);
  std::vector<ScoredTriplet> scored;
  scored.reserve(triplets.size());
  for (const Triplet& t : triplets) {
    double n = static_cast<double>(rc.total);
    double n_r = static_cast<double>(rc.counts.at(t.relation));
    scored.push_back({t, t.weight * n / n_r});
  }
  return scored;
}

size_t BestScored(std::span<const ScoredTriplet> scored) {
  size_t best = 0;
  for (size_t i = 1; i < scored.size(); ++i) {
    if (Better(scored[i], scored[best])) best = i;
  }
  return best;
}

std::vector<std::string> ExtractEntities(std::string_view context,
                                         const KnowledgeBase& kb,
                                         const WordSet& stopwords) {
  std::vector<std::string> surfaces = SplitWhitespace(context);
  std::vector<std::string> words;
  std::vector<bool> breaks_after;  // punctuation ends a phrase
  for (const std::string& s : surfaces) {
    std::string w = AsciiLower(WordOf(s));
    if (w.empty()) {
      if (!breaks_after.empty()) breaks_after.back() = true;
      continue;
    }
    WordBounds b = FindWordBounds(s);
    if (b.begin != 0 && !breaks_after.empty()) breaks_after.back() = true;
    words.push_back(std::move(w));
    breaks_after.push_back(b.end != s.size());
  }

  std::vector<std::string> entities;
  absl::flat_hash_set<std::string> seen;
  for (size_t i = 0; i < words.size();) {
    size_t matched = 0;
    for (size_t n = std::min<size_t>(3, words.size() - i); n >= 1; --n) {
      bool crosses = false;
      for (size_t j = i; j + 1 < i + n; ++j) crosses |= breaks_after[j];
      if (crosses) continue;
      bool all_stop = true;
      for (size_t j = i; j < i + n; ++j) all_stop &= stopwords.contains(words[j]);
      if (all_stop) continue;
      std::string gram = absl::StrJoin(words.begin() + i, words.begin() + i + n, " ");
      if (kb.InVocabulary(gram)) {
        if (seen.insert(gram).second) entities.push_back(std::move(gram));
        matched = n;
        break;
      }
    }
    i += matched == 0 ? 1 : matched;
  }
  return entities;
}

std::vector<Triplet> SelectKnowledge(const Instance& instance,
                                     const KnowledgeBase& kb,
                                     const WordSet& stopwords) {
  std::vector<Triplet> selected;
  std::set<TripletKey> taken;
  for (const std::string& entity : ExtractEntities(instance.context, kb, stopwords)) {
    std::vector<Triplet> triplets = kb.TripletsForEntity(entity);
    absl::StatusOr<std::vector<ScoredTriplet>> scored = ScoreTriplets(entity, triplets);
    if (!scored.ok()) continue;  // no triplets for this entity
    const Triplet& best = (*scored)[BestScored(*scored)].triplet;
    if (taken.insert(KeyOf(best)).second) selected.push_back(best);
  }
  return selected;
}

const TemplateTable& TemplateTable::Default() {
  static const TemplateTable* table = [] {
    auto* t = new TemplateTable();
    t->AddFromText(resources::Templates()).IgnoreError();
    return t;
  }();
  return *table;
}

absl::StatusOr<TemplateTable> TemplateTable::FromFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open templates ", path));
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  TemplateTable table = Default();
  if (absl::Status s = table.AddFromText(text); !s.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": ", s.message()));
  }
  return table;
}

absl::Status TemplateTable::AddFromText(std::string_view text) {
  int line_no = 0;
  for (std::string_view line : SplitOn(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty() || Trim(line).front() == '#') continue;
    std::vector<std::string_view> cols = SplitOn(line, '\t', 1);
    if (cols.size() != 2 || Trim(cols[0]).empty() || Trim(cols[1]).empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("template line ", line_no, ": expected relation<TAB>phrase"));
    }
    Set(Trim(cols[0]), Trim(cols[1]));
  }
  return absl::OkStatus();
}

void TemplateTable::Set(std::string_view relation, std::string_view phrase) {
  phrases_[std::string(relation)] = std::string(phrase);
}

const std::string* TemplateTable::Find(std::string_view relation) const {
  auto it = phrases_.find(ToAbsl(relation));
  return it == phrases_.end() ? nullptr : &it->second;
}

absl::StatusOr<std::string> Verbalize(const Triplet& triplet,
                                      const TemplateTable& templates) {
  const std::string* phrase = templates.Find(triplet.relation);
  if (phrase == nullptr) {
    return absl::NotFoundError(
        absl::StrCat("no verbalization template for relation ", triplet.relation));
  }
  return absl::StrCat(triplet.subject, " ", *phrase, " ", triplet.object);
}

std::string InputTextOf(const Instance& instance) {
  std::string variable = ModelVariableOf(instance);
  if (variable.empty()) return instance.context;
  return absl::StrCat(instance.context, " ", variable);
}

absl::StatusOr<GroundedInstance> GroundInstance(const Instance& instance,
                                                const KnowledgeBase& kb,
                                                const WordSet& stopwords,
                                                const TemplateTable& templates) {
  GroundedInstance g;
  g.base = instance;
  g.selected = SelectKnowledge(instance, kb, stopwords);
  std::vector<std::string> phrases;
  for (const Triplet& t : g.selected) {
    absl::StatusOr<std::string> v = Verbalize(t, templates);
    if (!v.ok()) return v.status();
    phrases.push_back(*std::move(v));
  }
  g.knowledge = absl::StrJoin(phrases, ToAbsl(kKnowledgeJoiner));
  g.grounded_text = InputTextOf(instance);
  if (!phrases.empty()) absl::StrAppend(&g.grounded_text, ToAbsl(kContextMarker), g.knowledge);
  return g;
}

std::string StripGrounding(std::string_view grounded_text) {
  size_t pos = grounded_text.rfind(kContextMarker);
  return std::string(pos == std::string_view::npos ? grounded_text
                                                   : grounded_text.substr(0, pos));
}

nlohmann::json ToJson(const GroundedInstance& g) {
  nlohmann::json j = ToJson(g.base);
  j["grounded_text"] = g.grounded_text;
  nlohmann::json triplets = nlohmann::json::array();
  for (const Triplet& t : g.selected) {
    triplets.push_back({t.subject, t.relation, t.object, t.weight});
  }
  j["selected_triplets"] = std::move(triplets);
  return j;
}

Overlap KnowledgeOverlap(const std::set<TripletKey>& attack_triplets,
                         const std::set<TripletKey>& grounding_triplets) {
  Overlap o;
  o.grounding = grounding_triplets.size();
  for (const TripletKey& k : grounding_triplets) o.shared += attack_triplets.count(k);
  o.defined = o.grounding > 0;
  o.ratio = o.defined ? static_cast<double>(o.shared) / static_cast<double>(o.grounding) : 0.0;
  return o;
}

}  // namespace nleguard
