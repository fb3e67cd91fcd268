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

#ifndef CODEMIX_METRICS_H_
#define CODEMIX_METRICS_H_

#include <string>
#include <string_view>
#include <vector>

// SQuAD-style answer comparison.
namespace codemix::metrics {

// Lowercase, drop punctuation and the articles a/an/the, split on spaces.
std::vector<std::string> NormalizeAnswer(std::string_view answer);

double ExactMatch(std::string_view prediction, std::string_view gold);
double TokenF1(std::string_view prediction, std::string_view gold);

}  // namespace codemix::metrics

#endif  // CODEMIX_METRICS_H_
