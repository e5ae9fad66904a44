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
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "nleguard/resources.h"
#include "nleguard/text.h"
#include "json.hpp"

namespace nleguard {
namespace {

constexpr std::string_view kSnapshotMagic = "#nleguard-kb-snapshot";
constexpr int kSnapshotVersion = 1;
constexpr std::string_view kEnglishPrefix = "/c/en/";

std::string BlockKey(std::string_view s, std::string_view r,
                     std::string_view o) {
  return absl::StrCat(ToAbsl(s), "\t", ToAbsl(r), "\t", ToAbsl(o));
}

bool ValidTerm(std::string_view term) {
  return !term.empty() && term.find_first_of("\t\n\r") == std::string_view::npos;
}

// "/c/en/dirt_bike/n" -> "dirt bike"; nullopt for other languages.
std::optional<std::string> EnglishTerm(std::string_view uri) {
  if (uri.substr(0, kEnglishPrefix.size()) != kEnglishPrefix) {
    return std::nullopt;
  }
  uri.remove_prefix(kEnglishPrefix.size());
  uri = uri.substr(0, uri.find('/'));
  return NormalizeTerm(uri);
}

std::string FormatWeight(double w) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), w);
  return std::string(buf, end);
}

uint64_t SubjectRelationKey(uint32_t term, uint16_t relation) {
  return (static_cast<uint64_t>(term) << 16) | relation;
}

}  // namespace

bool StableLess(const Triplet& a, const Triplet& b) {
  if (a.weight != b.weight) return a.weight > b.weight;
  if (a.relation != b.relation) return a.relation < b.relation;
  if (a.object != b.object) return a.object < b.object;
  return a.subject < b.subject;
}

std::string ToString(const Triplet& t) {
  return absl::StrCat("{", t.subject, ", ", t.relation, ", ", t.object, "}");
}

std::string NormalizeTerm(std::string_view term) {
  std::string spaced(term);
  std::replace(spaced.begin(), spaced.end(), '_', ' ');
  return AsciiLower(JoinWithSpaces(SplitWhitespace(spaced)));
}

Blocklist Blocklist::Default(bool symmetric) {
  Blocklist list(symmetric);
  // The bundled file is known-good.
  list.AddFromText(resources::Blocklist()).IgnoreError();
  return list;
}

void Blocklist::Add(std::string_view subject, std::string_view relation,
                    std::string_view object) {
  std::string s = NormalizeTerm(subject);
  std::string o = NormalizeTerm(object);
  entries_.insert(BlockKey(s, relation, o));
  if (symmetric_) entries_.insert(BlockKey(o, relation, s));
}

absl::Status Blocklist::AddFromText(std::string_view text) {
  int line_no = 0;
  for (std::string_view line : SplitOn(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty() || Trim(line).front() == '#') continue;
    std::vector<std::string_view> cols = SplitOn(line, '\t');
    if (cols.size() != 3 || Trim(cols[0]).empty() || Trim(cols[1]).empty() ||
        Trim(cols[2]).empty()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "blocklist line ", line_no, ": expected subject<TAB>relation<TAB>object"));
    }
    Add(Trim(cols[0]), Trim(cols[1]), Trim(cols[2]));
  }
  return absl::OkStatus();
}

absl::Status Blocklist::AddFromFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open blocklist ", path));
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return AddFromText(text);
}

bool Blocklist::Contains(std::string_view subject, std::string_view relation,
                         std::string_view object) const {
  return entries_.contains(BlockKey(subject, relation, object));
}

std::set<std::string, std::less<>> DefaultRelations() {
  return {"IsA",    "Antonym",  "DistinctFrom", "RelatedTo",   "HasA",
          "PartOf", "MannerOf", "UsedFor",      "DerivedFrom", "Synonym"};
}

KnowledgeBase KnowledgeBase::Build(std::vector<Triplet> triplets,
                                   const IngestConfig& config,
                                   IngestSummary* summary) {
  IngestSummary local;
  IngestSummary& sum = summary ? *summary : local;

  KnowledgeBase kb;
  absl::flat_hash_map<std::string, RelationId> relation_ids;
  for (Triplet& t : triplets) {
    if (!ValidTerm(t.subject) || !ValidTerm(t.object) ||
        !std::isfinite(t.weight) || t.weight < 0) {
      ++sum.malformed;
      continue;
    }
    if (!config.relations.contains(t.relation)) {
      ++sum.dropped_relation;
      continue;
    }
    if (config.blocklist.Contains(t.subject, t.relation, t.object)) {
      ++sum.blocked;
      continue;
    }
    auto intern = [&kb](std::string& term) {
      auto [it, inserted] = kb.term_ids_.try_emplace(
          term, static_cast<TermId>(kb.terms_.size()));
      if (inserted) kb.terms_.push_back(std::move(term));
      return it->second;
    };
    auto [rel, rel_new] = relation_ids.try_emplace(
        t.relation, static_cast<RelationId>(kb.relations_.size()));
    if (rel_new) kb.relations_.push_back(t.relation);
    TermId s = intern(t.subject);
    TermId o = intern(t.object);
    kb.triplets_.push_back({s, o, rel->second, t.weight});
    ++sum.kept;
  }

  auto ranks = [](const std::vector<std::string>& names) {
    std::vector<uint32_t> order(names.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](uint32_t a, uint32_t b) { return names[a] < names[b]; });
    std::vector<uint32_t> rank(names.size());
    for (uint32_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
    return rank;
  };
  kb.term_rank_ = ranks(kb.terms_);
  kb.relation_rank_ = ranks(kb.relations_);

  std::vector<uint32_t> order(kb.triplets_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&kb](uint32_t a, uint32_t b) {
    return kb.StableLessIndex(a, b);
  });
  std::vector<Stored> sorted;
  sorted.reserve(order.size());
  for (uint32_t i : order) sorted.push_back(kb.triplets_[i]);
  kb.triplets_ = std::move(sorted);

  // Counting sort keeps the global stable order inside each bucket.
  auto build_csr = [&kb](auto key, std::vector<uint32_t>& offsets,
                         std::vector<uint32_t>& index) {
    offsets.assign(kb.terms_.size() + 1, 0);
    for (const Stored& t : kb.triplets_) ++offsets[key(t) + 1];
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    index.resize(kb.triplets_.size());
    std::vector<uint32_t> cursor(offsets.begin(), offsets.end() - 1);
    for (uint32_t i = 0; i < kb.triplets_.size(); ++i) {
      index[cursor[key(kb.triplets_[i])]++] = i;
    }
  };
  build_csr([](const Stored& t) { return t.subject; }, kb.subject_offsets_,
            kb.subject_index_);
  build_csr([](const Stored& t) { return t.object; }, kb.object_offsets_,
            kb.object_index_);

  kb.subject_relation_index_ = kb.subject_index_;
  for (TermId term = 0; term < kb.terms_.size(); ++term) {
    uint32_t begin = kb.subject_offsets_[term];
    uint32_t end = kb.subject_offsets_[term + 1];
    if (begin == end) continue;
    ++kb.vocabulary_size_;
    auto first = kb.subject_relation_index_.begin() + begin;
    auto last = kb.subject_relation_index_.begin() + end;
    std::stable_sort(first, last, [&kb](uint32_t a, uint32_t b) {
      return kb.relation_rank_[kb.triplets_[a].relation] <
             kb.relation_rank_[kb.triplets_[b].relation];
    });
    for (uint32_t i = begin; i < end;) {
      RelationId rel = kb.triplets_[kb.subject_relation_index_[i]].relation;
      uint32_t j = i;
      while (j < end && kb.triplets_[kb.subject_relation_index_[j]].relation == rel) ++j;
      kb.subject_relation_ranges_[SubjectRelationKey(term, rel)] = {i, j};
      i = j;
    }
  }
  return kb;
}

bool KnowledgeBase::StableLessIndex(uint32_t a, uint32_t b) const {
  const Stored& x = triplets_[a];
  const Stored& y = triplets_[b];
  if (x.weight != y.weight) return x.weight > y.weight;
  if (x.relation != y.relation) {
    return relation_rank_[x.relation] < relation_rank_[y.relation];
  }
  if (x.object != y.object) return term_rank_[x.object] < term_rank_[y.object];
  return term_rank_[x.subject] < term_rank_[y.subject];
}

std::optional<KnowledgeBase::TermId> KnowledgeBase::FindTerm(
    std::string_view term) const {
  auto it = term_ids_.find(ToAbsl(term));
  if (it == term_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<KnowledgeBase::RelationId> KnowledgeBase::FindRelation(
    std::string_view relation) const {
  for (size_t i = 0; i < relations_.size(); ++i) {
    if (relations_[i] == relation) return static_cast<RelationId>(i);
  }
  return std::nullopt;
}

Triplet KnowledgeBase::Materialize(uint32_t index) const {
  const Stored& t = triplets_[index];
  return {terms_[t.subject], relations_[t.relation], terms_[t.object], t.weight};
}

std::vector<Triplet> KnowledgeBase::Materialize(
    const std::vector<uint32_t>& indices) const {
  std::vector<Triplet> out;
  out.reserve(indices.size());
  for (uint32_t i : indices) out.push_back(Materialize(i));
  return out;
}

KnowledgeBase::Range KnowledgeBase::SubjectRelationRange(
    TermId term, RelationId relation) const {
  auto it = subject_relation_ranges_.find(SubjectRelationKey(term, relation));
  return it == subject_relation_ranges_.end() ? Range{} : it->second;
}

std::vector<Triplet> KnowledgeBase::AllTriplets() const {
  std::vector<Triplet> out;
  out.reserve(triplets_.size());
  for (uint32_t i = 0; i < triplets_.size(); ++i) out.push_back(Materialize(i));
  return out;
}

bool KnowledgeBase::InVocabulary(std::string_view term) const {
  auto id = FindTerm(term);
  return id && subject_offsets_[*id] != subject_offsets_[*id + 1];
}

std::vector<std::string_view> KnowledgeBase::Antonyms(
    std::string_view term) const {
  std::vector<std::string_view> out;
  auto id = FindTerm(term);
  auto rel = FindRelation(kAntonym);
  if (!id || !rel) return out;
  Range r = SubjectRelationRange(*id, *rel);
  out.reserve(r.end - r.begin);
  for (uint32_t i = r.begin; i < r.end; ++i) {
    out.push_back(terms_[triplets_[subject_relation_index_[i]].object]);
  }
  return out;
}

std::vector<uint32_t> KnowledgeBase::UnrelatedIndices(
    std::string_view term) const {
  std::vector<uint32_t> merged;
  auto id = FindTerm(term);
  if (!id) return merged;
  for (std::string_view name : {kDistinctFrom, kAntonym}) {
    auto rel = FindRelation(name);
    if (!rel) continue;
    Range r = SubjectRelationRange(*id, *rel);
    merged.insert(merged.end(), subject_relation_index_.begin() + r.begin,
                  subject_relation_index_.begin() + r.end);
  }
  std::sort(merged.begin(), merged.end());
  absl::flat_hash_set<TermId> seen;
  std::erase_if(merged, [&](uint32_t i) {
    return !seen.insert(triplets_[i].object).second;
  });
  return merged;
}

std::vector<std::string_view> KnowledgeBase::UnrelatedNouns(
    std::string_view term) const {
  std::vector<std::string_view> out;
  for (uint32_t i : UnrelatedIndices(term)) {
    out.push_back(terms_[triplets_[i].object]);
  }
  return out;
}

std::vector<Triplet> KnowledgeBase::UnrelatedNounTriplets(
    std::string_view term) const {
  return Materialize(UnrelatedIndices(term));
}

std::vector<Triplet> KnowledgeBase::TripletsForEntity(
    std::string_view entity) const {
  auto id = FindTerm(entity);
  if (!id) return {};
  std::vector<uint32_t> merged(subject_index_.begin() + subject_offsets_[*id],
                               subject_index_.begin() + subject_offsets_[*id + 1]);
  for (uint32_t k = object_offsets_[*id]; k < object_offsets_[*id + 1]; ++k) {
    uint32_t i = object_index_[k];
    // Self-loops are already present through the subject bucket.
    if (triplets_[i].subject != *id) merged.push_back(i);
  }
  // Triplets are stored in stable order, so index order is stable order.
  std::sort(merged.begin(), merged.end());
  return Materialize(merged);
}

std::vector<Triplet> KnowledgeBase::BySubject(std::string_view term) const {
  auto id = FindTerm(term);
  if (!id) return {};
  return Materialize(std::vector<uint32_t>(
      subject_index_.begin() + subject_offsets_[*id],
      subject_index_.begin() + subject_offsets_[*id + 1]));
}

std::vector<Triplet> KnowledgeBase::ByObject(std::string_view term) const {
  auto id = FindTerm(term);
  if (!id) return {};
  return Materialize(std::vector<uint32_t>(
      object_index_.begin() + object_offsets_[*id],
      object_index_.begin() + object_offsets_[*id + 1]));
}

std::vector<Triplet> KnowledgeBase::BySubjectRelation(
    std::string_view term, std::string_view relation) const {
  auto id = FindTerm(term);
  auto rel = FindRelation(relation);
  if (!id || !rel) return {};
  Range r = SubjectRelationRange(*id, *rel);
  return Materialize(std::vector<uint32_t>(
      subject_relation_index_.begin() + r.begin,
      subject_relation_index_.begin() + r.end));
}

absl::Status KnowledgeBase::SaveSnapshot(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << kSnapshotMagic << " v" << kSnapshotVersion << "\n";
  out << triplets_.size() << "\n";
  for (uint32_t i = 0; i < triplets_.size(); ++i) {
    const Stored& t = triplets_[i];
    out << terms_[t.subject] << '\t' << relations_[t.relation] << '\t'
        << terms_[t.object] << '\t' << FormatWeight(t.weight) << '\n';
  }
  out.flush();
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

absl::StatusOr<KnowledgeBase> KnowledgeBase::LoadSnapshot(
    const std::string& path, const Blocklist& blocklist) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open snapshot ", path));
  std::string line;
  std::getline(in, line);
  if (line != absl::StrCat(ToAbsl(kSnapshotMagic), " v", kSnapshotVersion)) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": not a v", kSnapshotVersion, " knowledge-base snapshot"));
  }
  size_t expected = 0;
  if (!std::getline(in, line) ||
      std::from_chars(line.data(), line.data() + line.size(), expected).ec !=
          std::errc()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": missing triplet count"));
  }
  IngestConfig config;
  config.relations.clear();
  config.blocklist = blocklist;
  std::vector<Triplet> triplets;
  triplets.reserve(expected);
  while (std::getline(in, line)) {
    std::vector<std::string_view> cols = SplitOn(line, '\t');
    double weight = 0;
    if (cols.size() != 4 ||
        std::from_chars(cols[3].data(), cols[3].data() + cols[3].size(), weight)
                .ec != std::errc()) {
      return absl::InvalidArgumentError(absl::StrCat(path, ": corrupt snapshot line"));
    }
    config.relations.emplace(cols[1]);
    triplets.push_back({std::string(cols[0]), std::string(cols[1]),
                        std::string(cols[2]), weight});
  }
  if (triplets.size() != expected) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": expected ", expected,
                                            " triplets, found ", triplets.size()));
  }
  return Build(std::move(triplets), config);
}

ParsedAssertion ParseConceptNetLine(std::string_view line) {
  ParsedAssertion result;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> cols = SplitOn(line, '\t');
  if (cols.size() != 5 || cols[1].substr(0, 3) != "/r/") return result;
  std::string_view relation = cols[1].substr(3);
  relation = relation.substr(0, relation.find('/'));
  if (relation.empty()) return result;
  if (cols[2].substr(0, 3) != "/c/" || cols[3].substr(0, 3) != "/c/") return result;

  auto meta = nlohmann::json::parse(cols[4], nullptr, /*allow_exceptions=*/false);
  if (meta.is_discarded() || !meta.is_object()) return result;
  auto weight = meta.find("weight");
  if (weight == meta.end() || !weight->is_number()) return result;

  std::optional<std::string> subject = EnglishTerm(cols[2]);
  std::optional<std::string> object = EnglishTerm(cols[3]);
  if (!subject || !object) {
    result.kind = ParsedAssertion::Kind::kNonEnglish;
    return result;
  }
  if (subject->empty() || object->empty()) return result;
  result.kind = ParsedAssertion::Kind::kTriplet;
  result.triplet = {std::move(*subject), std::string(relation), std::move(*object),
                    weight->get<double>()};
  return result;
}

absl::StatusOr<KnowledgeBase> Ingest(const std::string& dump_path,
                                     const IngestConfig& config,
                                     IngestSummary* summary) {
  std::ifstream in(dump_path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open KB dump ", dump_path));
  IngestSummary local;
  IngestSummary& sum = summary ? *summary : local;
  std::vector<Triplet> triplets;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++sum.lines;
    ParsedAssertion parsed = ParseConceptNetLine(line);
    switch (parsed.kind) {
      case ParsedAssertion::Kind::kTriplet:
        triplets.push_back(std::move(parsed.triplet));
        break;
      case ParsedAssertion::Kind::kNonEnglish:
        ++sum.non_english;
        break;
      case ParsedAssertion::Kind::kMalformed:
        ++sum.malformed;
        break;
    }
  }
  if (in.bad()) return absl::DataLossError(absl::StrCat("read error on ", dump_path));
  return KnowledgeBase::Build(std::move(triplets), config, &sum);
}

absl::StatusOr<KnowledgeBase> LoadKnowledgeBase(const std::string& path,
                                                const IngestConfig& config,
                                                IngestSummary* summary) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open KB ", path));
  std::string first;
  std::getline(in, first);
  if (first.rfind(kSnapshotMagic, 0) == 0) {
    return KnowledgeBase::LoadSnapshot(path, config.blocklist);
  }
  return Ingest(path, config, summary);
}

}  // namespace nleguard
