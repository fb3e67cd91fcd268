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

#ifndef CODEMIX_EVAL_H_
#define CODEMIX_EVAL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "codemix/alignment.h"
#include "codemix/attack.h"
#include "codemix/corpus.h"
#include "codemix/lexicon.h"
#include "codemix/oracle.h"
#include "codemix/translation.h"
#include "json.hpp"

// Campaign runner, metrics and test-set construction.
namespace codemix::eval {

// Everything an attack may need besides the oracle. Unused members may be
// left null.
struct CampaignAssets {
  const std::map<std::string, BilingualDictionary>* dictionaries = nullptr;
  TranslationStore* store = nullptr;
  TranslationProvider* provider = nullptr;
  Aligner* aligner = nullptr;
  CandidateTableConfig table_config;
  // Which candidate space the random baseline draws from.
  AttackKind random_candidates = AttackKind::kBumblebee;
};

struct CampaignOptions {
  std::size_t workers = 1;
  bool run_random_baseline = true;
  std::vector<std::uint64_t> random_seeds = {0, 1, 2, 3, 4};
  // Defaults to the attack's mean perturbation rate.
  std::optional<double> random_rho;
};

struct RandomBaseline {
  double rho = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> accuracies;
  double mean = 0.0;
  double stdev = 0.0;
};

struct CampaignReport {
  std::size_t total = 0;
  std::size_t successes = 0;
  std::size_t failures = 0;
  std::size_t errors = 0;
  std::size_t budget_exhausted = 0;
  std::size_t clean_correct = 0;

  double clean_accuracy = 0.0;
  double adv_accuracy = 0.0;
  std::optional<double> success_rate;  // over the clean-correct subset
  std::optional<double> score_ratio;   // 1 - adv_accuracy / clean_accuracy

  // Span QA only.
  std::optional<double> clean_f1;
  std::optional<double> clean_em;
  std::optional<double> adv_f1;
  std::optional<double> adv_em;

  double mean_queries = 0.0;
  double mean_perturbation_rate = 0.0;
  std::map<std::string, std::size_t> perturbations_per_language;
  std::optional<RandomBaseline> random;
  nlohmann::json config;

  nlohmann::json ToJson() const;
};

struct CampaignOutput {
  CampaignReport report;
  std::vector<AttackResult> results;  // dataset order
};

nlohmann::json AttackConfigJson(const AttackConfig& cfg);

// Attacks every example (clean-incorrect ones included) and aggregates.
// Per-example oracle failures are counted and excluded from the rates.
CampaignOutput RunCampaign(const Dataset& dataset, const AttackConfig& cfg, LossOracle& oracle,
                           const CampaignAssets& assets, const CampaignOptions& options = {});

// Aggregation only; exposed for tests.
CampaignReport Summarize(const std::vector<AttackResult>& results, TaskKind task);

std::string FormatResultsJsonl(const std::vector<AttackResult>& results);

enum class SweepVariable { kBeamWidth, kNumLanguages };

SweepVariable ParseSweepVariable(std::string_view name);

struct SweepRow {
  std::size_t value = 0;
  CampaignReport report;
};

// One campaign per value; NumLanguages uses the first v languages of the
// base configuration. `values` must be nonempty and ascending.
std::vector<SweepRow> Sweep(SweepVariable variable, const std::vector<std::size_t>& values,
                            const Dataset& dataset, const AttackConfig& base,
                            LossOracle& oracle, const CampaignAssets& assets,
                            const CampaignOptions& options = {});

std::string SweepCsv(SweepVariable variable, const std::vector<SweepRow>& rows);

// Clean accuracy (and F1/EM for span QA) without attacking.
CampaignReport EvaluateClean(const Dataset& dataset, LossOracle& oracle);

// Premise and hypothesis drawn from two different languages per example,
// uniformly over the ordered pairs available (the matrix language counts
// as available). Labels are unchanged.
Dataset BuildCleanDl(const TranslationStore& parallel, const Dataset& base, std::uint64_t seed);

}  // namespace codemix::eval

#endif  // CODEMIX_EVAL_H_
