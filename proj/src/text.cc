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

#include "nleguard/text.h"

#include <cctype>
#include <fstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "nleguard/resources.h"

namespace nleguard {
namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }

bool IsSentenceFinal(char c) { return c == '.' || c == '!' || c == '?'; }

bool IsWordChar(char c) {
  auto u = static_cast<unsigned char>(c);
  // Bytes >= 0x80 belong to multi-byte UTF-8 sequences; treat them as word
  // characters so non-ASCII letters are never stripped as punctuation.
  return std::isalnum(u) || u >= 0x80;
}

}  // namespace

std::string AsciiLower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string Normalize(std::string_view sentence) {
  std::string out;
  out.reserve(sentence.size());
  bool pending_space = false;
  for (char c : sentence) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  while (!out.empty() && (IsSentenceFinal(out.back()) || out.back() == ' ')) {
    out.pop_back();
  }
  return out;
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> parts;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    size_t start = i;
    while (i < text.size() && !IsSpace(text[i])) ++i;
    if (i > start) parts.emplace_back(text.substr(start, i - start));
  }
  return parts;
}

std::string JoinWithSpaces(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out.push_back(' ');
    out += p;
  }
  return out;
}

WordBounds FindWordBounds(std::string_view token) {
  size_t begin = 0;
  while (begin < token.size() && !IsWordChar(token[begin])) ++begin;
  size_t end = token.size();
  while (end > begin && !IsWordChar(token[end - 1])) --end;
  return {begin, end};
}

std::string ReplaceWord(std::string_view token, std::string_view word) {
  WordBounds b = FindWordBounds(token);
  if (b.empty()) return std::string(word);
  std::string out(token.substr(0, b.begin));
  out += word;
  out += token.substr(b.end);
  return out;
}

bool StartsWithUpper(std::string_view text) {
  for (char c : text) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      return std::isupper(static_cast<unsigned char>(c));
    }
  }
  return false;
}

std::string CapitalizeFirst(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
    }
  }
  return out;
}

std::string_view Trim(std::string_view text) {
  while (!text.empty() && IsSpace(text.front())) text.remove_prefix(1);
  while (!text.empty() && IsSpace(text.back())) text.remove_suffix(1);
  return text;
}

std::vector<std::string_view> SplitOn(std::string_view text, char delimiter,
                                      int max_splits) {
  std::vector<std::string_view> out;
  if (max_splits < 0) {
    for (absl::string_view piece : absl::StrSplit(ToAbsl(text), delimiter)) {
      out.push_back(FromAbsl(piece));
    }
  } else {
    for (absl::string_view piece :
         absl::StrSplit(ToAbsl(text), absl::MaxSplits(delimiter, max_splits))) {
      out.push_back(FromAbsl(piece));
    }
  }
  return out;
}

std::vector<std::string_view> SplitOn(std::string_view text, std::string_view delimiter) {
  std::vector<std::string_view> out;
  for (absl::string_view piece : absl::StrSplit(ToAbsl(text), ToAbsl(delimiter))) {
    out.push_back(FromAbsl(piece));
  }
  return out;
}

const WordSet& DefaultStopwords() {
  static const WordSet* words = new WordSet(ParseWordList(resources::Stopwords()));
  return *words;
}

WordSet ParseWordList(std::string_view text) {
  WordSet words;
  for (std::string_view line : SplitOn(text, '\n')) {
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    words.insert(AsciiLower(line));
  }
  return words;
}

absl::StatusOr<WordSet> LoadWordList(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open word list ", path));
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ParseWordList(text);
}

}  // namespace nleguard
