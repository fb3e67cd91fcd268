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

#include "codemix/metrics.h"

#include <map>

#include "codemix/text.h"

namespace codemix::metrics {

std::vector<std::string> NormalizeAnswer(std::string_view answer) {
  std::string cleaned;
  for (const auto& cp : text::Decode(text::FoldCase(answer))) {
    if (text::IsPunctuation(cp.value)) continue;
    if (text::IsSpace(cp.value)) {
      cleaned.push_back(' ');
    } else {
      text::AppendUtf8(cp.value, &cleaned);
    }
  }
  std::vector<std::string> tokens;
  for (auto& part : text::SplitOn(cleaned, ' ')) {
    if (part.empty() || part == "a" || part == "an" || part == "the") continue;
    tokens.push_back(std::move(part));
  }
  return tokens;
}

double ExactMatch(std::string_view prediction, std::string_view gold) {
  return NormalizeAnswer(prediction) == NormalizeAnswer(gold) ? 1.0 : 0.0;
}

double TokenF1(std::string_view prediction, std::string_view gold) {
  const auto pred = NormalizeAnswer(prediction);
  const auto ref = NormalizeAnswer(gold);
  if (pred.empty() || ref.empty()) return pred == ref ? 1.0 : 0.0;
  std::map<std::string, int> ref_counts;
  for (const auto& t : ref) ++ref_counts[t];
  int common = 0;
  for (const auto& t : pred) {
    auto it = ref_counts.find(t);
    if (it != ref_counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(common) / static_cast<double>(ref.size());
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace codemix::metrics
