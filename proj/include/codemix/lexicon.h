// Copyright 2026 The Codemix Authors
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

#ifndef CODEMIX_LEXICON_H_
#define CODEMIX_LEXICON_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codemix/corpus.h"

namespace codemix {

// Matrix-word -> embedded-word candidates, as in MUSE bilingual dictionaries.
class BilingualDictionary {
 public:
  BilingualDictionary(LanguageTag matrix, LanguageTag embedded)
      : matrix_(std::move(matrix)), embedded_(std::move(embedded)) {}

  const LanguageTag& matrix() const { return matrix_; }
  const LanguageTag& embedded() const { return embedded_; }

  // Adds one pair; the source is case-folded, the target kept verbatim.
  // Duplicate pairs are ignored. Empty strings are rejected.
  void Add(std::string_view source, std::string_view target);

  // Candidates for `word` (case-folded) in insertion order; empty if absent.
  const std::vector<std::string>& Lookup(std::string_view word) const;

  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, std::vector<std::string>, std::less<>>& entries() const {
    return entries_;
  }

  // Tab-separated, one pair per line, in key order then candidate order.
  std::string ToTsv() const;

  friend bool operator==(const BilingualDictionary&, const BilingualDictionary&) = default;

 private:
  LanguageTag matrix_;
  LanguageTag embedded_;
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
};

// Lines are "source<TAB>target" (target may contain spaces) or, without a
// tab, exactly two whitespace-separated fields.
BilingualDictionary ParseDictionaryTsv(std::string_view contents,
                                       const LanguageTag& matrix,
                                       const LanguageTag& embedded);
BilingualDictionary LoadDictionaryTsv(const std::filesystem::path& path,
                                      const LanguageTag& matrix,
                                      const LanguageTag& embedded);

// Exact-match script conversion table (e.g. Devanagari -> Latin).
class TransliterationTable {
 public:
  TransliterationTable(Script from, Script to) : from_(from), to_(to) {}

  Script from() const { return from_; }
  Script to() const { return to_; }

  void Add(std::string_view word, std::string_view transliterated);
  std::optional<std::string> Transliterate(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }

 private:
  Script from_;
  Script to_;
  std::map<std::string, std::string, std::less<>> entries_;
};

TransliterationTable ParseTransliterationTsv(std::string_view contents, Script from,
                                             Script to);
TransliterationTable LoadTransliterationTsv(const std::filesystem::path& path,
                                            Script from, Script to);

}  // namespace codemix

#endif  // CODEMIX_LEXICON_H_
