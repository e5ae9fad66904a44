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

#ifndef NLEGUARD_TAGGER_H_
#define NLEGUARD_TAGGER_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nleguard/text.h"

namespace nleguard {

// Coarse part-of-speech classes used by the perturbation rules.
enum class Pos { kNoun, kAdj, kAdv, kVerb, kOther };

std::string_view PosName(Pos pos);
std::optional<Pos> ParsePos(std::string_view name);

// Assigns exactly one tag per word. `words` are punctuation-stripped token
// cores and may be empty for pure-punctuation tokens.
class Tagger {
 public:
  virtual ~Tagger() = default;
  virtual std::vector<Pos> Tag(std::span<const std::string> words) const = 0;
};

// Lexicon lookup with suffix and capitalization fallbacks.
class LexiconTagger : public Tagger {
 public:
  LexiconTagger() = default;

  // Tagger loaded with the bundled lexicon.
  static const LexiconTagger& Default();

  // The bundled lexicon plus (overriding) entries from a `token<TAB>TAG` file.
  static absl::StatusOr<LexiconTagger> FromFile(const std::string& path);

  absl::Status AddFromText(std::string_view text);
  void Add(std::string_view word, Pos pos);

  std::optional<Pos> Lookup(std::string_view word) const;

  std::vector<Pos> Tag(std::span<const std::string> words) const override;

 private:
  Pos Guess(std::string_view word, bool sentence_initial) const;

  absl::flat_hash_map<std::string, Pos> lexicon_;
};

struct Token {
  std::string surface;  // whitespace-delimited chunk, punctuation attached
  Pos pos = Pos::kOther;

  std::string_view word() const { return WordOf(surface); }
};

struct TaggedSentence {
  std::vector<Token> tokens;
  std::string original_text;

  // Surfaces joined by single spaces.
  std::string Render() const;
};

// Fails on an empty (or all-whitespace) sentence.
absl::StatusOr<TaggedSentence> TagSentence(std::string_view sentence,
                                           const Tagger& tagger);

// Builds a TaggedSentence with caller-supplied tags (one per whitespace
// token). Used to inject gold tags.
absl::StatusOr<TaggedSentence> WithTags(std::string_view sentence,
                                        std::span<const Pos> tags);

}  // namespace nleguard

#endif  // NLEGUARD_TAGGER_H_
