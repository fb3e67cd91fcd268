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
#include <map>
#include <numeric>

#include "codemix/alignment.h"
#include "codemix/error.h"
#include "codemix/kernels/kernels.h"
#include "codemix/text.h"

namespace codemix {

double TranslationProbTable::Get(std::string_view source, std::string_view target) const {
  const auto row = rows_.find(text::FoldCase(source));
  if (row == rows_.end()) return 0.0;
  const auto cell = row->second.find(text::FoldCase(target));
  return cell == row->second.end() ? 0.0 : cell->second;
}

void TranslationProbTable::Set(std::string_view source, std::string_view target, double p) {
  rows_[text::FoldCase(source)][text::FoldCase(target)] = p;
}

double TranslationProbTable::RowSum(std::string_view source) const {
  const auto row = rows_.find(text::FoldCase(source));
  if (row == rows_.end()) return 0.0;
  double sum = 0.0;
  for (const auto& [target, p] : row->second) sum += p;
  return sum;
}

namespace {

// Interned vocabulary; ids follow first appearance so training is
// independent of hash iteration order.
class Vocab {
 public:
  int Intern(const std::string& word) {
    const auto [it, inserted] = ids_.emplace(word, static_cast<int>(words_.size()));
    if (inserted) words_.push_back(word);
    return it->second;
  }
  const std::string& word(int id) const { return words_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return words_.size(); }

 private:
  std::map<std::string, int> ids_;
  std::vector<std::string> words_;
};

struct SourceRow {
  std::vector<int> targets;  // sorted target ids
  std::vector<double> prob;
  std::vector<double> count;
};

struct EncodedPair {
  std::vector<int> sources;
  // Row-major |sources| x |targets|: index of each target in its source's row.
  std::vector<std::size_t> cell;
  std::size_t num_targets = 0;
};

}  // namespace

TranslationProbTable TrainIbm1(const Bitext& bitext, int iterations, Ibm1Stats* stats) {
  if (iterations < 1) throw ConfigError("IBM Model 1 needs at least one iteration");
  if (bitext.empty()) throw DataError("IBM Model 1 needs a nonempty bitext");

  Vocab source_vocab;
  Vocab target_vocab;
  std::vector<std::pair<std::vector<int>, std::vector<int>>> sentences;
  std::size_t skipped = 0;
  for (const auto& [src, tgt] : bitext) {
    if (src.empty() || tgt.empty()) {
      ++skipped;
      continue;
    }
    std::vector<int> s;
    std::vector<int> t;
    for (const auto& w : src) s.push_back(source_vocab.Intern(text::FoldCase(w)));
    for (const auto& w : tgt) t.push_back(target_vocab.Intern(text::FoldCase(w)));
    sentences.emplace_back(std::move(s), std::move(t));
  }
  if (stats != nullptr) stats->skipped_pairs = skipped;

  std::vector<SourceRow> rows(source_vocab.size());
  for (const auto& [s, t] : sentences) {
    for (const int si : s) {
      auto& targets = rows[static_cast<std::size_t>(si)].targets;
      targets.insert(targets.end(), t.begin(), t.end());
    }
  }
  for (auto& row : rows) {
    std::sort(row.targets.begin(), row.targets.end());
    row.targets.erase(std::unique(row.targets.begin(), row.targets.end()),
                      row.targets.end());
    row.prob.assign(row.targets.size(), 1.0 / static_cast<double>(row.targets.size()));
    row.count.assign(row.targets.size(), 0.0);
  }

  std::vector<EncodedPair> encoded;
  encoded.reserve(sentences.size());
  for (const auto& [s, t] : sentences) {
    EncodedPair pair{s, {}, t.size()};
    pair.cell.reserve(s.size() * t.size());
    for (const int si : s) {
      const auto& targets = rows[static_cast<std::size_t>(si)].targets;
      for (const int tj : t) {
        const auto it = std::lower_bound(targets.begin(), targets.end(), tj);
        pair.cell.push_back(static_cast<std::size_t>(it - targets.begin()));
      }
    }
    encoded.push_back(std::move(pair));
  }

  std::vector<double> weights;
  std::vector<double> denom;
  for (int iter = 0; iter < iterations; ++iter) {
    for (auto& row : rows) std::fill(row.count.begin(), row.count.end(), 0.0);

    // E-step: posterior over source positions for every target token.
    for (const auto& pair : encoded) {
      const std::size_t m = pair.sources.size();
      const std::size_t n = pair.num_targets;
      weights.resize(m * n);
      denom.assign(n, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        const auto& row = rows[static_cast<std::size_t>(pair.sources[i])];
        double* w = weights.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) w[j] = row.prob[pair.cell[i * n + j]];
        kernels::Axpy(1.0, {w, n}, denom);
      }
      for (double& d : denom) d = d > 0.0 ? 1.0 / d : 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        std::span<double> w(weights.data() + i * n, n);
        kernels::Multiply(w, denom, w);
        auto& row = rows[static_cast<std::size_t>(pair.sources[i])];
        for (std::size_t j = 0; j < n; ++j) row.count[pair.cell[i * n + j]] += w[j];
      }
    }

    // M-step: renormalize expected counts per source word.
    for (auto& row : rows) {
      const double total = kernels::Sum(row.count);
      if (total <= 0.0) continue;
      row.prob = row.count;
      kernels::Scale(1.0 / total, row.prob);
    }
  }

  TranslationProbTable table;
  for (std::size_t si = 0; si < rows.size(); ++si) {
    const auto& row = rows[si];
    for (std::size_t k = 0; k < row.targets.size(); ++k) {
      table.Set(source_vocab.word(static_cast<int>(si)), target_vocab.word(row.targets[k]),
                row.prob[k]);
    }
  }
  return table;
}

}  // namespace codemix
