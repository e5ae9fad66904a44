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

#include "nleguard/tagger.h"

#include <cctype>
#include <fstream>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "nleguard/resources.h"

namespace nleguard {
namespace {

constexpr std::string_view kAdjSuffixes[] = {"ous", "ful", "ive", "able",
                                             "ible", "less", "ish"};

bool HasDigit(std::string_view w) {
  for (char c : w) {
    if (std::isdigit(static_cast<unsigned char>(c))) return true;
  }
  return false;
}

bool IsAlphaWord(std::string_view w) {
  for (char c : w) {
    auto u = static_cast<unsigned char>(c);
    if (!std::isalpha(u) && c != '-' && c != '\'' && u < 0x80) return false;
  }
  return !w.empty();
}

}  // namespace

std::string_view PosName(Pos pos) {
  switch (pos) {
    case Pos::kNoun: return "NOUN";
    case Pos::kAdj: return "ADJ";
    case Pos::kAdv: return "ADV";
    case Pos::kVerb: return "VERB";
    case Pos::kOther: return "OTHER";
  }
  return "OTHER";
}

std::optional<Pos> ParsePos(std::string_view name) {
  for (Pos p : {Pos::kNoun, Pos::kAdj, Pos::kAdv, Pos::kVerb, Pos::kOther}) {
    if (PosName(p) == name) return p;
  }
  return std::nullopt;
}

const LexiconTagger& LexiconTagger::Default() {
  static const LexiconTagger* tagger = [] {
    auto* t = new LexiconTagger();
    t->AddFromText(resources::Lexicon()).IgnoreError();
    return t;
  }();
  return *tagger;
}

absl::StatusOr<LexiconTagger> LexiconTagger::FromFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open lexicon ", path));
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  LexiconTagger tagger = Default();
  if (absl::Status s = tagger.AddFromText(text); !s.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": ", s.message()));
  }
  return tagger;
}

absl::Status LexiconTagger::AddFromText(std::string_view text) {
  int line_no = 0;
  for (std::string_view line : SplitOn(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> cols = SplitOn(line, '\t');
    std::optional<Pos> pos = cols.size() == 2 ? ParsePos(cols[1]) : std::nullopt;
    if (!pos || cols[0].empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("lexicon line ", line_no, ": expected token<TAB>TAG"));
    }
    Add(cols[0], *pos);
  }
  return absl::OkStatus();
}

void LexiconTagger::Add(std::string_view word, Pos pos) {
  lexicon_[AsciiLower(word)] = pos;
}

std::optional<Pos> LexiconTagger::Lookup(std::string_view word) const {
  auto it = lexicon_.find(AsciiLower(word));
  if (it == lexicon_.end()) return std::nullopt;
  return it->second;
}

Pos LexiconTagger::Guess(std::string_view word, bool sentence_initial) const {
  if (word.empty() || HasDigit(word)) return Pos::kOther;
  std::string lower = AsciiLower(word);
  if (auto it = lexicon_.find(lower); it != lexicon_.end()) return it->second;
  if (!sentence_initial && std::isupper(static_cast<unsigned char>(word[0]))) {
    return Pos::kNoun;
  }
  // Contractions take the class of their base ("isn't" -> "is").
  if (lower.ends_with("n't")) {
    auto base = lexicon_.find(lower.substr(0, lower.size() - 3));
    return base != lexicon_.end() ? base->second : Pos::kVerb;
  }
  if (lower.size() > 3 && lower.ends_with("ly")) return Pos::kAdv;
  for (std::string_view suffix : kAdjSuffixes) {
    if (lower.size() > suffix.size() + 2 && lower.ends_with(suffix)) {
      return Pos::kAdj;
    }
  }
  if (lower.size() > 4 && (lower.ends_with("ing") || lower.ends_with("ed"))) {
    return Pos::kVerb;
  }
  // Plural or third-person forms of known words.
  for (size_t strip : {size_t{1}, size_t{2}}) {
    if (lower.size() > strip + 2 && lower.back() == 's') {
      auto base = lexicon_.find(lower.substr(0, lower.size() - strip));
      if (base != lexicon_.end() &&
          (base->second == Pos::kNoun || base->second == Pos::kVerb)) {
        return base->second;
      }
    }
  }
  return IsAlphaWord(word) ? Pos::kNoun : Pos::kOther;
}

std::vector<Pos> LexiconTagger::Tag(std::span<const std::string> words) const {
  std::vector<Pos> tags;
  tags.reserve(words.size());
  bool initial = true;
  for (const std::string& w : words) {
    tags.push_back(Guess(w, initial));
    if (!w.empty()) initial = false;
  }
  return tags;
}

std::string TaggedSentence::Render() const {
  std::string out;
  for (const Token& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t.surface;
  }
  return out;
}

absl::StatusOr<TaggedSentence> TagSentence(std::string_view sentence,
                                           const Tagger& tagger) {
  std::vector<std::string> surfaces = SplitWhitespace(sentence);
  if (surfaces.empty()) {
    return absl::InvalidArgumentError("cannot tag an empty sentence");
  }
  std::vector<std::string> words;
  words.reserve(surfaces.size());
  for (const std::string& s : surfaces) words.emplace_back(WordOf(s));
  std::vector<Pos> tags = tagger.Tag(words);
  if (tags.size() != surfaces.size()) {
    return absl::InternalError("tagger returned a tag count different from the token count");
  }
  TaggedSentence out;
  out.original_text = std::string(sentence);
  out.tokens.reserve(surfaces.size());
  for (size_t i = 0; i < surfaces.size(); ++i) {
    out.tokens.push_back({std::move(surfaces[i]), tags[i]});
  }
  return out;
}

absl::StatusOr<TaggedSentence> WithTags(std::string_view sentence,
                                        std::span<const Pos> tags) {
  std::vector<std::string> surfaces = SplitWhitespace(sentence);
  if (surfaces.empty()) {
    return absl::InvalidArgumentError("cannot tag an empty sentence");
  }
  if (surfaces.size() != tags.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "got ", tags.size(), " tags for ", surfaces.size(), " tokens"));
  }
  TaggedSentence out;
  out.original_text = std::string(sentence);
  for (size_t i = 0; i < surfaces.size(); ++i) {
    out.tokens.push_back({std::move(surfaces[i]), tags[i]});
  }
  return out;
}

}  // namespace nleguard
