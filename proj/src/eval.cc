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

#include "nleguard/eval.h"

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>

#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "nleguard/text.h"

namespace nleguard {
namespace {

using nlohmann::json;

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::optional<size_t> FindColumn(const std::vector<std::string>& header,
                                 std::initializer_list<std::string_view> names) {
  for (size_t i = 0; i < header.size(); ++i) {
    std::string h = AsciiLower(Trim(header[i]));
    for (std::string_view n : names) {
      if (h == n) return i;
    }
  }
  return std::nullopt;
}

// Third-steps of the e-ViL mapping: no=0, weak_no=1, weak_yes=2, yes=3.
std::optional<int> VoteThirds(std::string_view vote) {
  if (vote == "no") return 0;
  if (vote == "weak_no") return 1;
  if (vote == "weak_yes") return 2;
  if (vote == "yes") return 3;
  return std::nullopt;
}

std::vector<std::string> AttackedIds(const AttackReport& report, size_t* pairs) {
  std::set<std::string> ids;
  *pairs = 0;
  for (const AttackRecord& r : report.records) {
    if (!r.inconsistent) continue;
    ++*pairs;
    ids.insert(r.instance_id);
  }
  return {ids.begin(), ids.end()};
}

std::vector<std::string> Minus(const std::vector<std::string>& a,
                               const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Accepts a Cos-E explanation given as text or as {"open-ended": text}.
std::string ExplanationText(const json& record) {
  auto it = record.find("explanation");
  if (it == record.end()) return "";
  if (it->is_string()) return it->get<std::string>();
  if (it->is_object() && it->contains("open-ended") && (*it)["open-ended"].is_string()) {
    return (*it)["open-ended"].get<std::string>();
  }
  return "";
}

struct CoseFields {
  std::string id;
  std::string question;
  std::vector<std::string> choices;
  std::string answer;
  std::string explanation;
};

std::optional<CoseFields> ReadCoseRecord(const json& r) {
  if (!r.is_object()) return std::nullopt;
  CoseFields f;
  try {
    if (r.contains("id")) f.id = r.at("id").get<std::string>();
    f.explanation = ExplanationText(r);
    const json& q = r.at("question");
    if (q.is_string()) {
      f.question = q.get<std::string>();
      f.choices = r.at("choices").get<std::vector<std::string>>();
      f.answer = r.at("answer").get<std::string>();
    } else {
      // CommonsenseQA layout.
      f.question = q.at("stem").get<std::string>();
      std::string key = r.at("answerKey").get<std::string>();
      for (const json& c : q.at("choices")) {
        f.choices.push_back(c.at("text").get<std::string>());
        if (c.contains("label") && c.at("label").get<std::string>() == key) {
          f.answer = f.choices.back();
        }
      }
    }
  } catch (const json::exception&) {
    return std::nullopt;
  }
  return f;
}

}  // namespace

absl::StatusOr<std::vector<std::vector<std::string>>> ParseCsv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    any = true;
    switch (c) {
      case '"':
        quoted = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        break;
      case '\r':
        break;
      case '\n':
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
        any = false;
        break;
      default:
        field.push_back(c);
    }
  }
  if (quoted) return absl::InvalidArgumentError("unterminated quoted CSV field");
  if (any || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

absl::StatusOr<LoadResult> LoadEsnli(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  absl::StatusOr<std::vector<std::vector<std::string>>> rows = ParseCsv(*text);
  if (!rows.ok()) return absl::InvalidArgumentError(absl::StrCat(path, ": ", rows.status().message()));
  LoadResult result;
  if (rows->empty()) return result;

  const std::vector<std::string>& header = rows->front();
  auto premise = FindColumn(header, {"premise", "sentence1"});
  auto hypothesis = FindColumn(header, {"hypothesis", "sentence2"});
  auto label = FindColumn(header, {"label", "gold_label"});
  auto explanation = FindColumn(header, {"explanation", "explanation_1"});
  auto id = FindColumn(header, {"id", "pairid"});
  for (auto [col, name] : {std::pair{premise, "premise"}, std::pair{hypothesis, "hypothesis"},
                           std::pair{label, "label"}, std::pair{explanation, "explanation"}}) {
    if (!col) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": missing column \"", name, "\""));
    }
  }

  absl::flat_hash_set<std::string> ids;
  for (size_t r = 1; r < rows->size(); ++r) {
    const std::vector<std::string>& row = (*rows)[r];
    if (row.size() == 1 && Trim(row[0]).empty()) continue;  // blank line
    ++result.rows;
    if (row.size() != header.size()) {
      ++result.skipped;
      continue;
    }
    Instance inst;
    inst.id = id ? row[*id] : absl::StrCat("row-", r);
    inst.context = row[*premise];
    inst.variable = row[*hypothesis];
    inst.gold_label = row[*label];
    inst.reference_nle = row[*explanation];
    inst.task = Task::kNli;
    if (Trim(inst.context).empty() || Trim(inst.variable).empty() ||
        !ids.insert(inst.id).second) {
      ++result.skipped;
      continue;
    }
    result.instances.push_back(std::move(inst));
  }
  return result;
}

absl::StatusOr<LoadResult> LoadCose(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  std::vector<json> records;
  size_t unparsable = 0;
  std::string_view body = Trim(*text);
  if (!body.empty() && body.front() == '[') {
    json arr = json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (arr.is_discarded() || !arr.is_array()) {
      return absl::InvalidArgumentError(absl::StrCat(path, ": invalid JSON array"));
    }
    records.assign(arr.begin(), arr.end());
  } else {
    for (std::string_view line : SplitOn(body, '\n')) {
      if (Trim(line).empty()) continue;
      json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
      if (j.is_discarded()) {
        ++unparsable;
        continue;
      }
      records.push_back(std::move(j));
    }
  }

  LoadResult result;
  result.rows = records.size() + unparsable;
  result.skipped = unparsable;
  absl::flat_hash_set<std::string> ids;
  for (size_t i = 0; i < records.size(); ++i) {
    std::optional<CoseFields> f = ReadCoseRecord(records[i]);
    if (!f || f->choices.size() != 3 || Trim(f->question).empty()) {
      ++result.skipped;
      continue;
    }
    auto answer_at = std::find(f->choices.begin(), f->choices.end(), f->answer);
    if (f->answer.empty() || answer_at == f->choices.end()) {
      ++result.skipped;
      continue;
    }
    std::vector<std::string> distractors = f->choices;
    distractors.erase(distractors.begin() + (answer_at - f->choices.begin()));

    Instance inst;
    inst.id = f->id.empty() ? absl::StrCat("row-", i + 1) : f->id;
    inst.context = absl::StrCat(f->question, " ", f->answer);
    inst.variable = absl::StrJoin(distractors, ", ");
    inst.gold_label = f->answer;
    inst.reference_nle = f->explanation;
    inst.task = Task::kCqa;
    inst.choices = f->choices;
    inst.answer = f->answer;
    if (!ids.insert(inst.id).second) {
      ++result.skipped;
      continue;
    }
    result.instances.push_back(std::move(inst));
  }
  return result;
}

absl::StatusOr<LoadResult> LoadDataset(const std::string& path,
                                       std::string_view format) {
  if (format == "esnli") return LoadEsnli(path);
  if (format == "cose") return LoadCose(path);
  if (format == "canonical") return LoadCanonical(path);
  return absl::InvalidArgumentError(
      absl::StrCat("unknown dataset format \"", ToAbsl(format), "\" (esnli|cose|canonical)"));
}

absl::StatusOr<std::vector<AnnotationRecord>> LoadAnnotations(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  std::vector<AnnotationRecord> out;
  int line_no = 0;
  for (std::string_view line : SplitOn(*text, '\n')) {
    ++line_no;
    if (Trim(line).empty()) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    AnnotationRecord rec;
    try {
      if (j.is_discarded()) throw std::invalid_argument("not JSON");
      rec.instance_id = j.at("instance_id").get<std::string>();
      rec.votes = j.at("votes").get<std::vector<std::string>>();
    } catch (const std::exception&) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ":", line_no, ": expected {\"instance_id\", \"votes\": [...]}"));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

absl::StatusOr<double> EvilScore(std::span<const AnnotationRecord> annotations) {
  if (annotations.empty()) return absl::InvalidArgumentError("no annotations");
  long long thirds = 0;
  long long votes = 0;
  for (const AnnotationRecord& rec : annotations) {
    if (rec.votes.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("instance ", rec.instance_id, " has no votes"));
    }
    for (const std::string& v : rec.votes) {
      std::optional<int> t = VoteThirds(v);
      if (!t) {
        return absl::InvalidArgumentError(absl::StrCat(
            "unknown vote \"", v, "\" (expected no|weak_no|weak_yes|yes)"));
      }
      thirds += *t;
      ++votes;
    }
  }
  return static_cast<double>(thirds) / static_cast<double>(3 * votes);
}

absl::StatusOr<DefenseReport> CompareRuns(const AttackReport& base,
                                          const AttackReport& defended) {
  std::set<std::string> base_ids(base.instance_ids.begin(), base.instance_ids.end());
  std::set<std::string> defended_ids(defended.instance_ids.begin(),
                                     defended.instance_ids.end());
  if (base_ids != defended_ids) {
    return absl::InvalidArgumentError("reports cover different instance ids");
  }
  DefenseReport d;
  d.base_attacked = AttackedIds(base, &d.base_pairs);
  d.defended_attacked = AttackedIds(defended, &d.defended_pairs);
  d.defended_ids = Minus(d.base_attacked, d.defended_attacked);
  d.newly_introduced_ids = Minus(d.defended_attacked, d.base_attacked);
  d.defended_defined = !d.base_attacked.empty();
  d.newly_introduced_defined = !d.defended_attacked.empty();
  if (d.defended_defined) {
    d.defended_ratio = static_cast<double>(d.defended_ids.size()) /
                       static_cast<double>(d.base_attacked.size());
  }
  if (d.newly_introduced_defined) {
    d.newly_introduced_ratio = static_cast<double>(d.newly_introduced_ids.size()) /
                               static_cast<double>(d.defended_attacked.size());
  }
  return d;
}

json ToJson(const DefenseReport& d) {
  return {{"defended_ratio", d.defended_ratio},
          {"newly_introduced_ratio", d.newly_introduced_ratio},
          {"defended_defined", d.defended_defined},
          {"newly_introduced_defined", d.newly_introduced_defined},
          {"defended_numerator", d.defended_ids.size()},
          {"defended_denominator", d.base_attacked.size()},
          {"newly_introduced_numerator", d.newly_introduced_ids.size()},
          {"newly_introduced_denominator", d.defended_attacked.size()},
          {"base_attacked", d.base_attacked},
          {"defended_attacked", d.defended_attacked},
          {"defended_ids", d.defended_ids},
          {"newly_introduced_ids", d.newly_introduced_ids},
          {"base_inconsistent_pairs", d.base_pairs},
          {"defended_inconsistent_pairs", d.defended_pairs}};
}

}  // namespace nleguard
