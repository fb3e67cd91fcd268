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

#ifndef CODEMIX_ALIGNMENT_H_
#define CODEMIX_ALIGNMENT_H_

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "codemix/corpus.h"
#include "codemix/translation.h"

namespace codemix {

using TokenList = std::vector<std::string>;
using Bitext = std::vector<std::pair<TokenList, TokenList>>;

// Lexical translation probabilities p(target | source) from IBM Model 1.
// Tokens are case-folded on the way in.
class TranslationProbTable {
 public:
  double Get(std::string_view source, std::string_view target) const;
  void Set(std::string_view source, std::string_view target, double p);

  std::size_t num_sources() const { return rows_.size(); }
  // Σ_t p(t | source); 0 for unknown sources.
  double RowSum(std::string_view source) const;
  const std::unordered_map<std::string, std::unordered_map<std::string, double>>& rows()
      const {
    return rows_;
  }

 private:
  std::unordered_map<std::string, std::unordered_map<std::string, double>> rows_;
};

struct Ibm1Stats {
  std::size_t skipped_pairs = 0;  // pairs with an empty side
};

// EM training of IBM Model 1 without a NULL word. Initialization is uniform
// over the targets that co-occur with each source. `iterations` must be
// at least 1.
TranslationProbTable TrainIbm1(const Bitext& bitext, int iterations,
                               Ibm1Stats* stats = nullptr);

enum class AlignMethod { kIntersect, kMatch };

AlignMethod ParseAlignMethod(std::string_view name);

struct AlignmentLinks {
  enum class Solver { kExact, kGreedy, kArgmax };

  std::vector<std::pair<std::size_t, std::size_t>> links;  // sorted (i, j)
  Solver solver = Solver::kExact;

  friend bool operator==(const AlignmentLinks& a, const AlignmentLinks& b) {
    return a.links == b.links;
  }
};

// Sentences longer than this use greedy competitive linking for Match.
inline constexpr std::size_t kExactMatchingLimit = 64;

// Intersect links i<->j when j is the row argmax of i and i is the column
// argmax of j. Match computes a maximum-weight one-to-one matching.
// Zero-probability pairs are never linked.
AlignmentLinks AlignPair(const TokenList& matrix, const TokenList& embedded,
                         const TranslationProbTable& probs, AlignMethod method);

// Lower-level entry points on a dense row-major weight matrix (rows = matrix
// tokens). Exposed for testing.
AlignmentLinks MaxWeightMatching(const std::vector<double>& weights, std::size_t rows,
                                 std::size_t cols);
AlignmentLinks GreedyMatching(const std::vector<double>& weights, std::size_t rows,
                              std::size_t cols);
AlignmentLinks IntersectArgmax(const std::vector<double>& weights, std::size_t rows,
                               std::size_t cols);

// Pharaoh format: "i-j i-j ..." per sentence.
std::string FormatPharaoh(const AlignmentLinks& links);
AlignmentLinks ParsePharaoh(std::string_view line);

struct Span {
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // inclusive

  std::size_t length() const { return end - start + 1; }
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct PhrasePair {
  Span matrix_span;
  Span embedded_span;
  LanguageTag embedded_lang = LanguageTag::Parse("en");
  TokenList embedded_text;
  bool monotonic = true;
  double score = 0.0;  // mean link probability when known

  friend bool operator==(const PhrasePair& a, const PhrasePair& b) {
    return a.matrix_span == b.matrix_span && a.embedded_span == b.embedded_span &&
           a.embedded_lang == b.embedded_lang && a.embedded_text == b.embedded_text &&
           a.monotonic == b.monotonic;
  }
};

// All phrase pairs consistent with `links` whose two sides are at most
// `max_len` tokens, without unaligned-word extension on the embedded side.
// Sorted by (matrix start, matrix end, embedded start).
std::vector<PhrasePair> ExtractPhrasePairs(const AlignmentLinks& links,
                                           const TokenList& matrix,
                                           const TokenList& embedded, std::size_t max_len,
                                           const LanguageTag& embedded_lang =
                                               LanguageTag::Parse("en"));

// A phrase pair anchored to a segment of the example.
struct TableEntry {
  SegmentRole role;
  PhrasePair pair;
};

// Candidates indexed by global start position over the concatenated
// attackable segments.
class CandidateTable {
 public:
  CandidateTable() = default;
  explicit CandidateTable(std::size_t positions) : by_position_(positions) {}

  std::size_t positions() const { return by_position_.size(); }
  const std::vector<TableEntry>& at(std::size_t position) const {
    return by_position_.at(position);
  }
  void Add(std::size_t position, TableEntry entry) {
    by_position_.at(position).push_back(std::move(entry));
  }
  std::size_t total() const;
  bool empty() const { return total() == 0; }

  // Keeps only candidates whose language is in `langs`.
  CandidateTable RestrictTo(const std::vector<LanguageTag>& langs) const;

 private:
  std::vector<std::vector<TableEntry>> by_position_;
};

// Word aligner used to build candidate tables.
class Aligner {
 public:
  virtual ~Aligner() = default;
  virtual AlignmentLinks Align(const TokenList& matrix, const TokenList& embedded,
                               const LanguageTag& embedded_lang) = 0;
  // Mean link probability for scoring, when the backend has one.
  virtual double LinkScore(const std::string& /*matrix_token*/,
                           const std::string& /*embedded_token*/,
                           const LanguageTag& /*embedded_lang*/) const {
    return 0.0;
  }
};

// IBM Model 1 tables per embedded language.
class Ibm1Aligner : public Aligner {
 public:
  explicit Ibm1Aligner(AlignMethod method = AlignMethod::kMatch) : method_(method) {}

  void SetTable(const LanguageTag& lang, TranslationProbTable table);
  bool HasTable(const LanguageTag& lang) const;
  const TranslationProbTable& table(const LanguageTag& lang) const;

  AlignmentLinks Align(const TokenList& matrix, const TokenList& embedded,
                       const LanguageTag& embedded_lang) override;
  double LinkScore(const std::string& matrix_token, const std::string& embedded_token,
                   const LanguageTag& embedded_lang) const override;

 private:
  AlignMethod method_;
  std::map<std::string, TranslationProbTable> tables_;
};

// POST {base}/v1/align {"src_tokens":[...],"tgt_tokens":[...]} ->
// {"links":[[i,j],...]}.
class RemoteAligner : public Aligner {
 public:
  explicit RemoteAligner(std::string base_url);
  AlignmentLinks Align(const TokenList& matrix, const TokenList& embedded,
                       const LanguageTag& embedded_lang) override;

 private:
  std::string base_url_;
};

// Trains one IBM Model 1 table per language on every (attackable matrix
// segment, translated segment) pair available in `store` for `dataset`.
Ibm1Aligner TrainAlignerFromStore(const Dataset& dataset, const TranslationStore& store,
                                  const std::vector<LanguageTag>& langs, int iterations,
                                  AlignMethod method);

struct CandidateTableConfig {
  std::size_t max_phrase_len = 4;
};

// Aligns every attackable segment against each language in `view`, extracts
// phrase pairs and indexes them by global matrix start position.
// `langs` selects which languages of the view to use; a missing translation
// is a data error.
CandidateTable BuildCandidateTable(const LabeledExample& example,
                                   const TranslationView& view,
                                   const std::vector<LanguageTag>& langs, Aligner& aligner,
                                   const CandidateTableConfig& cfg = {});

}  // namespace codemix

#endif  // CODEMIX_ALIGNMENT_H_
