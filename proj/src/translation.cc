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

#include "codemix/translation.h"

#include <set>

#include "codemix/error.h"
#include "codemix/text.h"
#include "codemix/wire.h"
#include "json.hpp"

namespace codemix {

using nlohmann::json;

void TableTranslationProvider::Add(std::string source_text, const LanguageTag& target,
                                   std::string translation) {
  std::lock_guard lock(mu_);
  table_[{std::move(source_text), target.code()}] = std::move(translation);
}

std::string TableTranslationProvider::Translate(const std::string& source_text,
                                                const LanguageTag& /*source*/,
                                                const LanguageTag& target) {
  std::lock_guard lock(mu_);
  ++calls_;
  const auto it = table_.find({source_text, target.code()});
  if (it == table_.end()) {
    throw DataError("no translation into " + target.code() + " for '" + source_text + "'");
  }
  return it->second;
}

RemoteTranslationProvider::RemoteTranslationProvider(std::string base_url)
    : base_url_(std::move(base_url)) {
  if (base_url_.empty()) throw ConfigError("remote translation requires an endpoint");
}

std::string RemoteTranslationProvider::Translate(const std::string& source_text,
                                                 const LanguageTag& source,
                                                 const LanguageTag& target) {
  const json request = {
      {"source", source.code()}, {"target", target.code()}, {"text", source_text}};
  const auto response = wire::PostJson(base_url_, "/v1/translate", request);
  if (!response.contains("translation") || !response["translation"].is_string()) {
    throw OracleError("/v1/translate: response lacks a translation string");
  }
  return response["translation"].get<std::string>();
}

TranslationStore::TranslationStore(const TranslationStore& other) {
  std::shared_lock lock(other.mu_);
  entries_ = other.entries_;
}

TranslationStore& TranslationStore::operator=(const TranslationStore& other) {
  if (this == &other) return *this;
  std::map<TranslationKey, Segment> copy;
  {
    std::shared_lock lock(other.mu_);
    copy = other.entries_;
  }
  std::unique_lock lock(mu_);
  entries_ = std::move(copy);
  return *this;
}

bool TranslationStore::Insert(const TranslationKey& key, Segment segment) {
  std::unique_lock lock(mu_);
  return entries_.emplace(key, std::move(segment)).second;
}

std::optional<Segment> TranslationStore::Get(const TranslationKey& key) const {
  std::shared_lock lock(mu_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool TranslationStore::Contains(const TranslationKey& key) const {
  std::shared_lock lock(mu_);
  return entries_.count(key) > 0;
}

std::size_t TranslationStore::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

std::vector<LanguageTag> TranslationStore::LanguagesFor(
    const std::string& example_id, const std::vector<SegmentRole>& roles) const {
  std::shared_lock lock(mu_);
  std::set<std::string> candidates;
  for (auto it = entries_.lower_bound({example_id, SegmentRole::kPremise, ""});
       it != entries_.end() && it->first.example_id == example_id; ++it) {
    candidates.insert(it->first.lang);
  }
  std::vector<LanguageTag> langs;
  for (const auto& code : candidates) {
    bool complete = true;
    for (const auto role : roles) {
      complete &= entries_.count({example_id, role, code}) > 0;
    }
    if (complete) langs.push_back(LanguageTag::Parse(code));
  }
  return langs;
}

std::string TranslationStore::ToJsonl() const {
  std::shared_lock lock(mu_);
  std::string out;
  json current;
  std::pair<std::string, std::string> current_key;
  const auto flush = [&] {
    if (!current.is_null()) {
      out += current.dump();
      out += '\n';
    }
  };
  for (const auto& [key, segment] : entries_) {
    std::pair<std::string, std::string> group{key.example_id, key.lang};
    if (current.is_null() || group != current_key) {
      flush();
      current = json{{"id", key.example_id}, {"language", key.lang}};
      current_key = group;
    }
    current[std::string(RoleName(key.role))] = segment.raw;
  }
  flush();
  return out;
}

bool operator==(const TranslationStore& a, const TranslationStore& b) {
  if (&a == &b) return true;
  std::shared_lock la(a.mu_);
  std::shared_lock lb(b.mu_);
  if (a.entries_.size() != b.entries_.size()) return false;
  auto ia = a.entries_.begin();
  auto ib = b.entries_.begin();
  for (; ia != a.entries_.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second.raw != ib->second.raw ||
        ia->second.tokens != ib->second.tokens || ia->second.role != ib->second.role) {
      return false;
    }
  }
  return true;
}

TranslationView GetTranslations(const LabeledExample& example,
                                const std::vector<LanguageTag>& langs,
                                TranslationProvider* provider, TranslationStore& store) {
  TranslationView view;
  for (const auto& lang : langs) {
    for (const auto role : AttackableRoles(example.task)) {
      const TranslationKey key{example.id, role, lang.code()};
      if (auto cached = store.Get(key)) {
        view[role].emplace(lang.code(), std::move(*cached));
        continue;
      }
      const auto* source = example.Find(role);
      if (source == nullptr) {
        throw DataError("example '" + example.id + "' has no " +
                        std::string(RoleName(role)) + " segment");
      }
      if (provider == nullptr) {
        throw DataError("no translation for (" + example.id + ", " + lang.code() +
                        ") and no provider configured");
      }
      std::string translated;
      try {
        translated = provider->Translate(source->raw, example.matrix_language, lang);
      } catch (const Error& e) {
        throw Error(e.kind(), "translating (" + example.id + ", " + lang.code() +
                                  "): " + e.what());
      }
      auto segment = Segment::FromText(role, std::move(translated), lang);
      store.Insert(key, segment);
      view[role].emplace(lang.code(), std::move(segment));
    }
  }
  return view;
}

TranslationStore ParseGoldParallel(std::string_view contents, const LanguageTag& matrix) {
  TranslationStore store;
  std::size_t line_no = 0;
  for (const auto& line : text::SplitOn(contents, '\n')) {
    ++line_no;
    if (text::Trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + "malformed JSON (" + e.what() + ")");
    }
    if (!obj.contains("language") || !obj["language"].is_string()) {
      throw DataError(where + "missing field language");
    }
    const auto lang = LanguageTag::Parse(obj["language"].get<std::string>());
    std::string id;
    std::vector<SegmentRole> roles;
    if (obj.contains("id")) {
      id = obj["id"].get<std::string>();
      for (const auto role : {SegmentRole::kPremise, SegmentRole::kHypothesis,
                              SegmentRole::kContext, SegmentRole::kQuestion}) {
        if (obj.contains(std::string(RoleName(role)))) roles.push_back(role);
      }
    } else {
      if (!obj.contains("pair_id")) throw DataError(where + "missing field pair_id");
      const auto& pair = obj["pair_id"];
      id = (pair.is_string() ? pair.get<std::string>() : pair.dump()) + ":" +
           matrix.code();
      roles = {SegmentRole::kPremise, SegmentRole::kHypothesis};
      for (const auto role : roles) {
        if (!obj.contains(std::string(RoleName(role)))) {
          throw DataError(where + "missing field " + std::string(RoleName(role)));
        }
      }
    }
    for (const auto role : roles) {
      auto raw = obj[std::string(RoleName(role))].get<std::string>();
      if (!store.Insert({id, role, lang.code()},
                        Segment::FromText(role, std::move(raw), lang))) {
        throw DataError(where + "duplicate entry (" + id + ", " +
                        std::string(RoleName(role)) + ", " + lang.code() + ")");
      }
    }
  }
  return store;
}

TranslationStore LoadGoldParallel(const std::filesystem::path& path,
                                  const LanguageTag& matrix) {
  return ParseGoldParallel(ReadFile(path), matrix);
}

void SaveTranslationStore(const TranslationStore& store,
                          const std::filesystem::path& path) {
  WriteFile(path, store.ToJsonl());
}

}  // namespace codemix
