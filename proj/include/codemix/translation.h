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

#ifndef CODEMIX_TRANSLATION_H_
#define CODEMIX_TRANSLATION_H_

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include "codemix/corpus.h"

namespace codemix {

struct TranslationKey {
  std::string example_id;
  SegmentRole role;
  std::string lang;

  friend auto operator<=>(const TranslationKey&, const TranslationKey&) = default;
};

// Machine translation backend. Implementations must be deterministic for a
// fixed configuration and safe to call from several threads.
class TranslationProvider {
 public:
  virtual ~TranslationProvider() = default;
  virtual std::string Translate(const std::string& text, const LanguageTag& source,
                                const LanguageTag& target) = 0;
};

// Serves translations from an in-memory (source text, target lang) map;
// fails on anything it does not know.
class TableTranslationProvider : public TranslationProvider {
 public:
  void Add(std::string text, const LanguageTag& target, std::string translation);
  std::string Translate(const std::string& text, const LanguageTag& source,
                        const LanguageTag& target) override;
  std::size_t calls() const { return calls_; }

 private:
  std::map<std::pair<std::string, std::string>, std::string> table_;
  std::size_t calls_ = 0;
  std::mutex mu_;
};

// Talks to POST {base_url}/v1/translate with
//   {"source":"en","target":"fr","text":"..."} -> {"translation":"..."}.
class RemoteTranslationProvider : public TranslationProvider {
 public:
  explicit RemoteTranslationProvider(std::string base_url);
  std::string Translate(const std::string& text, const LanguageTag& source,
                        const LanguageTag& target) override;

 private:
  std::string base_url_;
};

// Per-(example, role, language) translated segments. Reads may run
// concurrently; writes take an exclusive lock.
class TranslationStore {
 public:
  TranslationStore() = default;
  TranslationStore(const TranslationStore& other);
  TranslationStore& operator=(const TranslationStore& other);

  // Returns false (and leaves the store unchanged) if the key exists.
  bool Insert(const TranslationKey& key, Segment segment);
  std::optional<Segment> Get(const TranslationKey& key) const;
  bool Contains(const TranslationKey& key) const;
  std::size_t size() const;

  // Languages that have every one of `roles` for `example_id`.
  std::vector<LanguageTag> LanguagesFor(const std::string& example_id,
                                        const std::vector<SegmentRole>& roles) const;

  // JSONL grouped by (id, language): {"id","language","premise",...}.
  std::string ToJsonl() const;

  friend bool operator==(const TranslationStore& a, const TranslationStore& b);

 private:
  mutable std::shared_mutex mu_;
  std::map<TranslationKey, Segment> entries_;
};

// Translations for one example: role -> lang code -> segment.
using TranslationView = std::map<SegmentRole, std::map<std::string, Segment>>;

// Cache-first lookup of every attackable segment of `example` in `langs`.
// `provider` may be null when the store is known to be complete.
TranslationView GetTranslations(const LabeledExample& example,
                                const std::vector<LanguageTag>& langs,
                                TranslationProvider* provider, TranslationStore& store);

// Gold parallel JSONL: {pair_id, language, premise, hypothesis} per line.
// Entries are keyed by pair_id + ":" + matrix code so that they line up with
// ids produced by the classification loader. Lines carrying an explicit "id"
// (the cache format) use it verbatim and may hold any segment roles.
TranslationStore ParseGoldParallel(std::string_view contents,
                                   const LanguageTag& matrix = LanguageTag::Parse("en"));
TranslationStore LoadGoldParallel(const std::filesystem::path& path,
                                  const LanguageTag& matrix = LanguageTag::Parse("en"));
void SaveTranslationStore(const TranslationStore& store,
                          const std::filesystem::path& path);

}  // namespace codemix

#endif  // CODEMIX_TRANSLATION_H_
