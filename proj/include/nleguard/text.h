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

#ifndef NLEGUARD_TEXT_H_
#define NLEGUARD_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/container/flat_hash_set.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace nleguard {

// absl is built with its own string_view type; convert at the boundary.
inline absl::string_view ToAbsl(std::string_view s) { return {s.data(), s.size()}; }
inline std::string_view FromAbsl(absl::string_view s) { return {s.data(), s.size()}; }

// Canonical comparison form of a sentence: ASCII-lowercased, whitespace runs
// collapsed to one space, trimmed, and trailing sentence-final marks (. ! ?)
// removed. Idempotent.
std::string Normalize(std::string_view sentence);

std::string AsciiLower(std::string_view text);

// Splits on ASCII whitespace, dropping empty pieces.
std::vector<std::string> SplitWhitespace(std::string_view text);

std::string JoinWithSpaces(const std::vector<std::string>& parts);

// Splits on every occurrence of `delimiter` (at most `max_splits` times when
// non-negative), keeping empty pieces.
std::vector<std::string_view> SplitOn(std::string_view text, char delimiter,
                                      int max_splits = -1);
std::vector<std::string_view> SplitOn(std::string_view text, std::string_view delimiter);

// Half-open byte range [begin, end) of the word inside a whitespace token,
// i.e. the token without leading/trailing punctuation. Apostrophes and
// hyphens inside the word are kept ("isn't", "t-shirts").
struct WordBounds {
  size_t begin = 0;
  size_t end = 0;
  bool empty() const { return begin == end; }
};
WordBounds FindWordBounds(std::string_view token);

inline std::string_view WordOf(std::string_view token) {
  WordBounds b = FindWordBounds(token);
  return token.substr(b.begin, b.end - b.begin);
}

// Replaces the word part of `token`, keeping surrounding punctuation.
std::string ReplaceWord(std::string_view token, std::string_view word);

bool StartsWithUpper(std::string_view text);

// Upper-cases the first ASCII letter of `text`.
std::string CapitalizeFirst(std::string_view text);

// Trims ASCII whitespace from both ends.
std::string_view Trim(std::string_view text);

using WordSet = absl::flat_hash_set<std::string>;

// The bundled English stopword list.
const WordSet& DefaultStopwords();

// One lowercased word per line; blank lines and `#` comments ignored.
WordSet ParseWordList(std::string_view text);
absl::StatusOr<WordSet> LoadWordList(const std::string& path);

}  // namespace nleguard

#endif  // NLEGUARD_TEXT_H_
