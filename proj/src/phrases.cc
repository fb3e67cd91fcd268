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

#include <algorithm>

#include "codemix/alignment.h"
#include "codemix/error.h"
#include "codemix/text.h"
#include "codemix/wire.h"

namespace codemix {

std::vector<PhrasePair> ExtractPhrasePairs(const AlignmentLinks& links,
                                           const TokenList& matrix,
                                           const TokenList& embedded, std::size_t max_len,
                                           const LanguageTag& embedded_lang) {
  if (max_len < 1) throw ConfigError("max phrase length must be at least 1");
  std::vector<PhrasePair> pairs;
  const std::size_t m = matrix.size();
  const std::size_t n = embedded.size();
  // Links grouped by matrix index, restricted to valid indices.
  std::vector<std::vector<std::size_t>> by_row(m);
  for (const auto& [i, j] : links.links) {
    if (i < m && j < n) by_row[i].push_back(j);
  }
  for (auto& row : by_row) std::sort(row.begin(), row.end());

  for (std::size_t start = 0; start < m; ++start) {
    std::size_t lo = n;
    std::size_t hi = 0;
    for (std::size_t end = start; end < m && end - start + 1 <= max_len; ++end) {
      for (const std::size_t j : by_row[end]) {
        lo = std::min(lo, j);
        hi = std::max(hi, j);
      }
      if (lo > hi) continue;  // nothing aligned yet
      if (hi - lo + 1 > max_len) continue;
      bool consistent = true;
      for (const auto& [i, j] : links.links) {
        if (i < m && j >= lo && j <= hi && (i < start || i > end)) {
          consistent = false;
          break;
        }
      }
      if (!consistent) continue;

      PhrasePair pair;
      pair.matrix_span = {start, end};
      pair.embedded_span = {lo, hi};
      pair.embedded_lang = embedded_lang;
      pair.embedded_text.assign(embedded.begin() + static_cast<std::ptrdiff_t>(lo),
                                embedded.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
      std::size_t last_j = 0;
      bool first = true;
      for (std::size_t i = start; i <= end && pair.monotonic; ++i) {
        for (const std::size_t j : by_row[i]) {
          if (!first && j < last_j) {
            pair.monotonic = false;
            break;
          }
          last_j = j;
          first = false;
        }
      }
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

std::size_t CandidateTable::total() const {
  std::size_t count = 0;
  for (const auto& entries : by_position_) count += entries.size();
  return count;
}

CandidateTable CandidateTable::RestrictTo(const std::vector<LanguageTag>& langs) const {
  CandidateTable out(positions());
  for (std::size_t p = 0; p < positions(); ++p) {
    for (const auto& entry : by_position_[p]) {
      if (std::find(langs.begin(), langs.end(), entry.pair.embedded_lang) != langs.end()) {
        out.Add(p, entry);
      }
    }
  }
  return out;
}

void Ibm1Aligner::SetTable(const LanguageTag& lang, TranslationProbTable table) {
  tables_[lang.code()] = std::move(table);
}

bool Ibm1Aligner::HasTable(const LanguageTag& lang) const {
  return tables_.count(lang.code()) > 0;
}

const TranslationProbTable& Ibm1Aligner::table(const LanguageTag& lang) const {
  const auto it = tables_.find(lang.code());
  if (it == tables_.end()) {
    throw ConfigError("no alignment model for language " + lang.code());
  }
  return it->second;
}

AlignmentLinks Ibm1Aligner::Align(const TokenList& matrix, const TokenList& embedded,
                                  const LanguageTag& embedded_lang) {
  return AlignPair(matrix, embedded, table(embedded_lang), method_);
}

double Ibm1Aligner::LinkScore(const std::string& matrix_token,
                              const std::string& embedded_token,
                              const LanguageTag& embedded_lang) const {
  const auto it = tables_.find(embedded_lang.code());
  return it == tables_.end() ? 0.0 : it->second.Get(matrix_token, embedded_token);
}

RemoteAligner::RemoteAligner(std::string base_url) : base_url_(std::move(base_url)) {
  if (base_url_.empty()) throw ConfigError("remote aligner requires an endpoint");
}

AlignmentLinks RemoteAligner::Align(const TokenList& matrix, const TokenList& embedded,
                                    const LanguageTag& /*embedded_lang*/) {
  const nlohmann::json request = {{"src_tokens", matrix}, {"tgt_tokens", embedded}};
  const auto response = wire::PostJson(base_url_, "/v1/align", request);
  if (!response.contains("links") || !response["links"].is_array()) {
    throw OracleError("/v1/align: response lacks a links array");
  }
  AlignmentLinks out;
  for (const auto& link : response["links"]) {
    if (!link.is_array() || link.size() != 2) {
      throw OracleError("/v1/align: malformed link " + link.dump());
    }
    const auto i = link[0].get<long long>();
    const auto j = link[1].get<long long>();
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= matrix.size() ||
        static_cast<std::size_t>(j) >= embedded.size()) {
      throw OracleError("/v1/align: link out of range " + link.dump());
    }
    out.links.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  std::sort(out.links.begin(), out.links.end());
  out.links.erase(std::unique(out.links.begin(), out.links.end()), out.links.end());
  return out;
}

Ibm1Aligner TrainAlignerFromStore(const Dataset& dataset, const TranslationStore& store,
                                  const std::vector<LanguageTag>& langs, int iterations,
                                  AlignMethod method) {
  Ibm1Aligner aligner(method);
  for (const auto& lang : langs) {
    Bitext bitext;
    for (const auto& ex : dataset.examples) {
      for (const auto role : AttackableRoles(ex.task)) {
        const auto* source = ex.Find(role);
        auto translated = store.Get({ex.id, role, lang.code()});
        if (source == nullptr || !translated) continue;
        bitext.emplace_back(source->tokens, std::move(translated->tokens));
      }
    }
    if (bitext.empty()) {
      throw DataError("no parallel text available to train an aligner for " + lang.code());
    }
    aligner.SetTable(lang, TrainIbm1(bitext, iterations));
  }
  return aligner;
}

CandidateTable BuildCandidateTable(const LabeledExample& example,
                                   const TranslationView& view,
                                   const std::vector<LanguageTag>& langs, Aligner& aligner,
                                   const CandidateTableConfig& cfg) {
  const auto roles = AttackableRoles(example.task);
  std::size_t positions = 0;
  for (const auto role : roles) {
    if (const auto* seg = example.Find(role)) positions += seg->tokens.size();
  }
  CandidateTable table(positions);
  std::size_t offset = 0;
  for (const auto role : roles) {
    const auto* seg = example.Find(role);
    if (seg == nullptr) continue;
    for (const auto& lang : langs) {
      const auto role_it = view.find(role);
      const Segment* translated = nullptr;
      if (role_it != view.end()) {
        const auto lang_it = role_it->second.find(lang.code());
        if (lang_it != role_it->second.end()) translated = &lang_it->second;
      }
      if (translated == nullptr) {
        throw DataError("missing translation (" + example.id + ", " +
                        std::string(RoleName(role)) + ", " + lang.code() + ")");
      }
      if (seg->tokens.empty() || translated->tokens.empty()) continue;
      const auto links = aligner.Align(seg->tokens, translated->tokens, lang);
      for (auto& pair :
           ExtractPhrasePairs(links, seg->tokens, translated->tokens, cfg.max_phrase_len, lang)) {
        double total = 0.0;
        std::size_t count = 0;
        for (const auto& [i, j] : links.links) {
          if (i >= pair.matrix_span.start && i <= pair.matrix_span.end) {
            total += aligner.LinkScore(seg->tokens[i], translated->tokens[j], lang);
            ++count;
          }
        }
        pair.score = count > 0 ? total / static_cast<double>(count) : 0.0;
        const std::size_t start = offset + pair.matrix_span.start;
        table.Add(start, TableEntry{role, std::move(pair)});
      }
    }
    offset += seg->tokens.size();
  }
  return table;
}

}  // namespace codemix
