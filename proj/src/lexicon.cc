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

#include "codemix/lexicon.h"

#include <algorithm>
#include <utility>

#include "codemix/error.h"
#include "codemix/text.h"

namespace codemix {

namespace {

// Splits one dictionary line into (source, target). Returns nullopt for
// blank lines.
std::optional<std::pair<std::string, std::string>> SplitPairLine(
    std::string_view raw_line, std::size_t line_no) {
  const auto line = text::Trim(raw_line);
  if (line.empty()) return std::nullopt;
  const auto tab = line.find('\t');
  if (tab != std::string_view::npos) {
    const auto source = text::Trim(line.substr(0, tab));
    const auto target = text::Trim(line.substr(tab + 1));
    if (source.empty() || target.empty() || source.find('\t') != std::string_view::npos ||
        target.find('\t') != std::string_view::npos) {
      throw DataError("line " + std::to_string(line_no) + ": expected 2 fields");
    }
    return std::make_pair(std::string(source), std::string(target));
  }
  std::vector<std::string> fields;
  for (const auto& part : text::SplitOn(line, ' ')) {
    if (!part.empty()) fields.push_back(part);
  }
  if (fields.size() != 2) {
    throw DataError("line " + std::to_string(line_no) + ": expected 2 fields, got " +
                    std::to_string(fields.size()));
  }
  return std::make_pair(std::move(fields[0]), std::move(fields[1]));
}

}  // namespace

void BilingualDictionary::Add(std::string_view source, std::string_view target) {
  if (source.empty() || target.empty()) {
    throw DataError("dictionary entries must be nonempty");
  }
  auto& candidates = entries_[text::FoldCase(source)];
  if (std::find(candidates.begin(), candidates.end(), target) == candidates.end()) {
    candidates.emplace_back(target);
  }
}

const std::vector<std::string>& BilingualDictionary::Lookup(std::string_view word) const {
  static const std::vector<std::string> kEmpty;
  const auto it = entries_.find(text::FoldCase(word));
  return it == entries_.end() ? kEmpty : it->second;
}

std::string BilingualDictionary::ToTsv() const {
  std::string out;
  for (const auto& [source, targets] : entries_) {
    for (const auto& target : targets) {
      out += source;
      out += '\t';
      out += target;
      out += '\n';
    }
  }
  return out;
}

BilingualDictionary ParseDictionaryTsv(std::string_view contents,
                                       const LanguageTag& matrix,
                                       const LanguageTag& embedded) {
  BilingualDictionary dict(matrix, embedded);
  std::size_t line_no = 0;
  for (const auto& line : text::SplitOn(contents, '\n')) {
    ++line_no;
    if (auto pair = SplitPairLine(line, line_no)) dict.Add(pair->first, pair->second);
  }
  return dict;
}

BilingualDictionary LoadDictionaryTsv(const std::filesystem::path& path,
                                      const LanguageTag& matrix,
                                      const LanguageTag& embedded) {
  try {
    return ParseDictionaryTsv(ReadFile(path), matrix, embedded);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void TransliterationTable::Add(std::string_view word, std::string_view transliterated) {
  if (word.empty() || transliterated.empty()) {
    throw DataError("transliteration entries must be nonempty");
  }
  entries_.emplace(std::string(word), std::string(transliterated));
}

std::optional<std::string> TransliterationTable::Transliterate(std::string_view word) const {
  const auto it = entries_.find(word);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

TransliterationTable ParseTransliterationTsv(std::string_view contents, Script from,
                                             Script to) {
  TransliterationTable table(from, to);
  std::size_t line_no = 0;
  for (const auto& line : text::SplitOn(contents, '\n')) {
    ++line_no;
    if (auto pair = SplitPairLine(line, line_no)) table.Add(pair->first, pair->second);
  }
  return table;
}

TransliterationTable LoadTransliterationTsv(const std::filesystem::path& path,
                                            Script from, Script to) {
  return ParseTransliterationTsv(ReadFile(path), from, to);
}

}  // namespace codemix
