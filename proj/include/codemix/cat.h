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

#ifndef CODEMIX_CAT_H_
#define CODEMIX_CAT_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "codemix/alignment.h"
#include "codemix/attack.h"
#include "codemix/corpus.h"
#include "codemix/random.h"
#include "codemix/translation.h"
#include "json.hpp"

// Code-mixed adversarial training (CAT) data generation.
namespace codemix::cat {

// Per-language share of perturbations found in successful adversaries.
struct AdvDistribution {
  std::vector<std::pair<LanguageTag, double>> weights;  // sorted by code

  double total() const;
  nlohmann::json ToJson() const;
};

// l_i = perturbations in language i over every best_successful adversary;
// f_i = l_i / Σ l. Throws a data error when there is nothing to count.
AdvDistribution ComputeAdvDistribution(const std::vector<AttackResult>& results);

// Up to n distinct languages drawn by weight without replacement,
// renormalizing after each draw. Zero-weight languages are never drawn.
std::vector<LanguageTag> SampleLanguages(const AdvDistribution& dist, std::size_t n, Rng& rng);

struct CatConfig {
  std::size_t k = 9;
  std::size_t n = 2;
  double rho = 0.5;
  std::uint64_t seed = 0;
  std::size_t max_phrase_len = 4;

  void Validate() const;
  nlohmann::json ToJson() const;
};

struct CatProvenance {
  std::string id;
  std::map<SegmentRole, std::vector<LanguageTag>> sampled_languages;
  std::size_t perturbation_count = 0;
  std::string warning;  // set when the example was emitted unperturbed
};

struct CatOutput {
  Dataset dataset;  // the originals followed by every perturbed copy
  std::vector<CatProvenance> provenance;  // one per perturbed copy
  std::size_t warnings = 0;
};

// For each example: sample languages per attackable segment, translate,
// align, extract phrases, then emit k copies perturbed left to right with
// per-position probability rho. Copy j of example "x" gets id "x#cat{j}"
// (j from 1). Failures emit unperturbed copies and a warning.
CatOutput GenerateCatDataset(const Dataset& x, TranslationProvider* provider,
                             TranslationStore& store, Aligner& aligner,
                             const AdvDistribution& dist, const CatConfig& cfg);

std::string FormatProvenanceJsonl(const std::vector<CatProvenance>& provenance);

}  // namespace codemix::cat

#endif  // CODEMIX_CAT_H_
