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

#include "nleguard/textrules.h"

#include <array>
#include <cctype>
#include <utility>

#include "absl/strings/match.h"
#include "absl/strings/str_join.h"
#include "nleguard/text.h"

namespace nleguard {
namespace {

constexpr std::array<std::string_view, 4> kNegationWords = {"not", "never", "no",
                                                            "cannot"};

// Lowercased word with typographic apostrophes folded to ASCII.
std::string FoldedWord(std::string_view surface) {
  std::string w = AsciiLower(WordOf(surface));
  for (size_t pos; (pos = w.find("\xE2\x80\x99")) != std::string::npos;) {
    w.replace(pos, 3, "'");
  }
  return w;
}

bool IsContractedNegation(std::string_view folded) {
  return folded.ends_with("n't");
}

// "isn't" -> "is", "won't" -> "will".
std::string UncontractNegation(std::string_view word) {
  std::string lower = AsciiLower(word);
  std::string base;
  if (lower == "won't" || lower == "won\xE2\x80\x99t") {
    base = "will";
  } else if (lower == "can't" || lower == "can\xE2\x80\x99t") {
    base = "can";
  } else if (lower == "shan't" || lower == "shan\xE2\x80\x99t") {
    base = "shall";
  } else if (lower == "ain't" || lower == "ain\xE2\x80\x99t") {
    base = "is";
  } else {
    size_t cut = lower.ends_with("n't") ? 3 : 5;  // n + U+2019 + t
    return std::string(word.substr(0, word.size() - cut));
  }
  return StartsWithUpper(word) ? CapitalizeFirst(base) : base;
}

bool BarePunctuationFree(const Token& t) { return t.word() == t.surface; }

// Applies the edit and renders the candidate text.
Candidate MakeCandidate(const TaggedSentence& tagged, Rule rule, size_t begin,
                        size_t end, std::vector<std::string> replacement,
                        std::optional<Triplet> triplet = std::nullopt) {
  std::vector<std::string> surfaces;
  surfaces.reserve(tagged.tokens.size() + replacement.size());
  for (size_t i = 0; i < begin; ++i) surfaces.push_back(tagged.tokens[i].surface);
  for (const std::string& r : replacement) surfaces.push_back(r);
  for (size_t i = end; i < tagged.tokens.size(); ++i) {
    surfaces.push_back(tagged.tokens[i].surface);
  }
  Candidate c;
  c.text = JoinWithSpaces(surfaces);
  c.rule = rule;
  c.span_begin = begin;
  c.span_end = end;
  c.replacement = JoinWithSpaces(replacement);
  c.triplet = std::move(triplet);
  return c;
}

std::optional<Candidate> RemoveNegation(const TaggedSentence& tagged) {
  const auto& tokens = tagged.tokens;
  for (size_t i = 0; i < tokens.size(); ++i) {
    std::string folded = FoldedWord(tokens[i].surface);
    if (IsContractedNegation(folded)) {
      std::string word(tokens[i].word());
      return MakeCandidate(tagged, Rule::kNegRemove, i, i + 1,
                           {ReplaceWord(tokens[i].surface, UncontractNegation(word))});
    }
    if (folded != "not") continue;

    // "does not have" / "do not have" go back to "has" / "have".
    if (i > 0 && i + 1 < tokens.size() && BarePunctuationFree(tokens[i - 1]) &&
        BarePunctuationFree(tokens[i])) {
      std::string aux = AsciiLower(tokens[i - 1].word());
      std::string verb = FoldedWord(tokens[i + 1].surface);
      if (verb == "have" && (aux == "does" || aux == "do")) {
        std::string restored = aux == "does" ? "has" : "have";
        if (StartsWithUpper(tokens[i - 1].surface)) restored = CapitalizeFirst(restored);
        return MakeCandidate(tagged, Rule::kNegRemove, i - 1, i + 2,
                             {ReplaceWord(tokens[i + 1].surface, restored)});
      }
    }

    WordBounds b = FindWordBounds(tokens[i].surface);
    std::string prefix = tokens[i].surface.substr(0, b.begin);
    std::string suffix = tokens[i].surface.substr(b.end);
    size_t begin = i;
    size_t end = i + 1;
    std::vector<std::string> replacement;
    if (i == 0 && tokens.size() > 1 && StartsWithUpper(tokens[0].surface)) {
      // Sentence-initial "Not": the next word takes the capital.
      replacement.push_back(prefix + CapitalizeFirst(tokens[1].surface));
      end = 2;
    } else if (!suffix.empty() && i > 0) {
      // Keep trailing punctuation ("..., not." -> "...,.") on the left token.
      begin = i - 1;
      replacement.push_back(tokens[i - 1].surface + suffix);
    } else if (!prefix.empty() && i + 1 < tokens.size()) {
      replacement.push_back(prefix + tokens[i + 1].surface);
      end = i + 2;
    }
    return MakeCandidate(tagged, Rule::kNegRemove, begin, end, std::move(replacement));
  }
  return std::nullopt;
}

bool HasContentAfter(const TaggedSentence& tagged, size_t i) {
  for (size_t j = i + 1; j < tagged.tokens.size(); ++j) {
    if (!tagged.tokens[j].word().empty()) return true;
  }
  return false;
}

// The head of <B> in "<A> has <B>" is taken to be a noun when the first
// noun-or-verb token after the auxiliary is a noun.
bool ObjectHeadIsNoun(const TaggedSentence& tagged, size_t aux) {
  for (size_t j = aux + 1; j < tagged.tokens.size(); ++j) {
    Pos p = tagged.tokens[j].pos;
    if (p == Pos::kNoun) return true;
    if (p == Pos::kVerb) return false;
  }
  return false;
}

std::optional<Candidate> AddNegation(const TaggedSentence& tagged) {
  const auto& tokens = tagged.tokens;
  for (size_t i = 1; i < tokens.size(); ++i) {
    if (!BarePunctuationFree(tokens[i])) continue;
    std::string w = AsciiLower(tokens[i].surface);
    if ((w == "is" || w == "are") && HasContentAfter(tagged, i)) {
      return MakeCandidate(tagged, Rule::kNegAdd, i + 1, i + 1, {"not"});
    }
  }
  for (size_t i = 1; i < tokens.size(); ++i) {
    if (!BarePunctuationFree(tokens[i])) continue;
    std::string w = AsciiLower(tokens[i].surface);
    if ((w == "has" || w == "have") && ObjectHeadIsNoun(tagged, i)) {
      std::string aux = w == "has" ? "does" : "do";
      return MakeCandidate(tagged, Rule::kNegAdd, i, i + 1, {aux, "not", "have"});
    }
  }
  return std::nullopt;
}

std::string_view IndefiniteArticleFor(std::string_view noun) {
  char c = noun.empty() ? 'x' : static_cast<char>(std::tolower(
                                    static_cast<unsigned char>(noun.front())));
  return std::string_view("aeiou").find(c) != std::string_view::npos ? "an" : "a";
}

}  // namespace

std::string_view RuleName(Rule rule) {
  switch (rule) {
    case Rule::kNegAdd: return "NEG_ADD";
    case Rule::kNegRemove: return "NEG_REMOVE";
    case Rule::kAntonymSwap: return "ANTONYM_SWAP";
    case Rule::kNounSwap: return "NOUN_SWAP";
  }
  return "NEG_ADD";
}

std::optional<Rule> ParseRule(std::string_view name) {
  for (Rule r : {Rule::kNegAdd, Rule::kNegRemove, Rule::kAntonymSwap, Rule::kNounSwap}) {
    if (RuleName(r) == name) return r;
  }
  return std::nullopt;
}

bool ContainsNegation(std::string_view sentence) {
  for (const std::string& token : SplitWhitespace(sentence)) {
    std::string w = FoldedWord(token);
    if (IsContractedNegation(w)) return true;
    for (std::string_view neg : kNegationWords) {
      if (w == neg) return true;
    }
  }
  return false;
}

std::vector<Candidate> Negate(const TaggedSentence& tagged) {
  std::vector<Candidate> out;
  bool negated = false;
  for (const Token& t : tagged.tokens) {
    std::string w = FoldedWord(t.surface);
    if (w == "not" || IsContractedNegation(w)) {
      negated = true;
      break;
    }
  }
  std::optional<Candidate> c = negated ? RemoveNegation(tagged) : AddNegation(tagged);
  if (c) out.push_back(std::move(*c));
  return out;
}

std::vector<Candidate> AntonymSwap(const TaggedSentence& tagged,
                                   const KnowledgeBase& kb) {
  std::vector<Candidate> out;
  for (size_t i = 0; i < tagged.tokens.size(); ++i) {
    const Token& token = tagged.tokens[i];
    if (token.pos != Pos::kAdj && token.pos != Pos::kAdv) continue;
    std::string_view word = token.word();
    if (word.empty()) continue;
    std::string lower = AsciiLower(word);
    for (Triplet& t : kb.BySubjectRelation(lower, kAntonym)) {
      if (t.object == lower) continue;
      std::string replacement = StartsWithUpper(word) ? CapitalizeFirst(t.object) : t.object;
      out.push_back(MakeCandidate(tagged, Rule::kAntonymSwap, i, i + 1,
                                  {ReplaceWord(token.surface, replacement)},
                                  std::move(t)));
    }
  }
  return out;
}

std::vector<Candidate> NounSwap(const TaggedSentence& tagged,
                                const KnowledgeBase& kb) {
  std::vector<Candidate> out;
  const auto& tokens = tagged.tokens;
  size_t last = tokens.size();
  for (size_t i = tokens.size(); i-- > 0;) {
    if (!tokens[i].word().empty()) {
      last = i;
      break;
    }
  }
  if (last == tokens.size() || tokens[last].pos != Pos::kNoun) return out;

  // Prefer the longest KB term (up to three words) ending at the final noun.
  size_t first = last;
  std::string term;
  std::vector<Triplet> triplets;
  for (size_t n = 3; n >= 1; --n) {
    if (n - 1 > last) continue;
    size_t start = last - (n - 1);
    bool clean = true;
    std::vector<std::string> words;
    for (size_t j = start; j <= last; ++j) {
      if (j < last && !BarePunctuationFree(tokens[j])) clean = false;
      if (j == last && n > 1 && FindWordBounds(tokens[j].surface).begin != 0) {
        clean = false;
      }
      words.push_back(AsciiLower(tokens[j].word()));
    }
    if (!clean) continue;
    std::string candidate_term = absl::StrJoin(words, " ");
    triplets = kb.UnrelatedNounTriplets(candidate_term);
    if (!triplets.empty()) {
      first = start;
      term = std::move(candidate_term);
      break;
    }
  }

  WordBounds head = FindWordBounds(tokens[first].surface);
  WordBounds tail = FindWordBounds(tokens[last].surface);
  std::string prefix = tokens[first].surface.substr(0, head.begin);
  std::string suffix = tokens[last].surface.substr(tail.end);
  bool capitalized = StartsWithUpper(tokens[first].word());

  for (Triplet& t : triplets) {
    if (t.object == term) continue;
    std::string noun = capitalized ? CapitalizeFirst(t.object) : t.object;
    size_t begin = first;
    std::vector<std::string> replacement;
    if (first > 0 && BarePunctuationFree(tokens[first - 1])) {
      std::string article = AsciiLower(tokens[first - 1].surface);
      if (article == "a" || article == "an") {
        std::string wanted(IndefiniteArticleFor(t.object));
        if (wanted != article) {
          if (StartsWithUpper(tokens[first - 1].surface)) wanted = CapitalizeFirst(wanted);
          begin = first - 1;
          replacement.push_back(std::move(wanted));
        }
      }
    }
    replacement.push_back(prefix + noun + suffix);
    out.push_back(MakeCandidate(tagged, Rule::kNounSwap, begin, last + 1,
                                std::move(replacement), std::move(t)));
  }
  return out;
}

absl::StatusOr<CandidateSet> GenerateCandidates(std::string_view nle,
                                                const KnowledgeBase& kb,
                                                const Tagger& tagger,
                                                const CandidateConfig& config) {
  absl::StatusOr<TaggedSentence> tagged = TagSentence(nle, tagger);
  if (!tagged.ok()) return tagged.status();

  CandidateSet set;
  set.source_nle = std::string(nle);
  absl::flat_hash_set<std::string> seen = {Normalize(nle)};
  auto take = [&](std::vector<Candidate> batch) {
    for (Candidate& c : batch) {
      if (set.candidates.size() >= config.max_candidates_per_nle) return;
      if (c.text.empty() || !seen.insert(Normalize(c.text)).second) continue;
      set.candidates.push_back(std::move(c));
    }
  };
  take(Negate(*tagged));
  take(AntonymSwap(*tagged, kb));
  take(NounSwap(*tagged, kb));
  return set;
}

}  // namespace nleguard
