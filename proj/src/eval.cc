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

#include "codemix/eval.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "codemix/error.h"
#include "codemix/random.h"

namespace codemix::eval {

using nlohmann::json;

namespace {

json Optional(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Runs fn(i) for i in [0, n) on `workers` threads; the first exception wins.
template <typename Fn>
void ParallelFor(std::size_t n, std::size_t workers, Fn fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    threads.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Per-example candidate material, built once and reused by the random
// baseline.
struct ExampleAssets {
  std::optional<TranslationView> view;
  std::optional<CandidateTable> table;
};

ExampleAssets PrepareAssets(const LabeledExample& example, const AttackConfig& cfg,
                            const CampaignAssets& assets, AttackKind candidates) {
  ExampleAssets out;
  const bool need_view = candidates == AttackKind::kBumblebee || cfg.filter_by_translation;
  if (need_view) {
    if (assets.store == nullptr) {
      throw ConfigError("this attack needs translations (none configured)");
    }
    out.view = GetTranslations(example, cfg.embedded_languages, assets.provider, *assets.store);
  }
  if (candidates == AttackKind::kBumblebee) {
    if (assets.aligner == nullptr) throw ConfigError("phrase candidates need an aligner");
    out.table = BuildCandidateTable(example, *out.view, cfg.embedded_languages,
                                    *assets.aligner, assets.table_config);
  } else if (assets.dictionaries == nullptr) {
    throw ConfigError("word candidates need bilingual dictionaries");
  }
  return out;
}

std::unique_ptr<CandidateSource> MakeSource(const LabeledExample& example,
                                            const ExampleAssets& prepared,
                                            const AttackConfig& cfg,
                                            const CampaignAssets& assets,
                                            AttackKind candidates) {
  if (candidates == AttackKind::kBumblebee) {
    return std::make_unique<PhraseCandidates>(example, *prepared.table,
                                              cfg.equivalence_constraint);
  }
  return std::make_unique<PolyglossCandidates>(
      example, *assets.dictionaries, prepared.view ? &*prepared.view : nullptr, cfg);
}

AttackKind CandidateKind(const AttackConfig& cfg, const CampaignAssets& assets) {
  return cfg.kind == AttackKind::kRandom ? assets.random_candidates : cfg.kind;
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double Stdev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double s = 0.0;
  for (const double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

json AttackConfigJson(const AttackConfig& cfg) {
  json langs = json::array();
  for (const auto& l : cfg.embedded_languages) langs.push_back(l.code());
  json j = {{"method", std::string(AttackKindName(cfg.kind))},
            {"embedded_languages", langs},
            {"beam_width", cfg.beam_width},
            {"filter_by_translation", cfg.filter_by_translation},
            {"equivalence_constraint", cfg.equivalence_constraint},
            {"transliteration", cfg.transliteration != nullptr},
            {"early_exit", cfg.early_exit},
            {"seed", cfg.seed}};
  j["max_queries"] = cfg.max_queries ? json(*cfg.max_queries) : json(nullptr);
  if (cfg.kind == AttackKind::kRandom) j["rho_uniform"] = cfg.rho_uniform;
  return j;
}

json CampaignReport::ToJson() const {
  json j;
  j["total"] = total;
  j["successes"] = successes;
  j["failures"] = failures;
  j["errors"] = errors;
  j["budget_exhausted"] = budget_exhausted;
  j["clean_correct"] = clean_correct;
  j["clean_accuracy"] = clean_accuracy;
  j["adv_accuracy"] = adv_accuracy;
  j["success_rate"] = Optional(success_rate);
  j["score_ratio"] = Optional(score_ratio);
  j["clean_f1"] = Optional(clean_f1);
  j["clean_em"] = Optional(clean_em);
  j["adv_f1"] = Optional(adv_f1);
  j["adv_em"] = Optional(adv_em);
  j["mean_queries"] = mean_queries;
  j["mean_perturbation_rate"] = mean_perturbation_rate;
  j["perturbations_per_language"] = perturbations_per_language;
  if (random) {
    j["random"] = {{"rho", random->rho},
                   {"seeds", random->seeds},
                   {"accuracies", random->accuracies},
                   {"mean", random->mean},
                   {"stdev", random->stdev}};
  } else {
    j["random"] = nullptr;
  }
  j["config"] = config;
  return j;
}

CampaignReport Summarize(const std::vector<AttackResult>& results, TaskKind task) {
  CampaignReport report;
  report.total = results.size();
  std::size_t evaluated = 0;
  std::size_t adv_correct = 0;
  std::size_t clean_correct_successes = 0;
  double queries = 0.0;
  std::vector<double> rates;
  double clean_f1 = 0.0, clean_em = 0.0, adv_f1 = 0.0, adv_em = 0.0;
  for (const auto& r : results) {
    switch (r.status) {
      case AttackStatus::kSucceeded: ++report.successes; break;
      case AttackStatus::kFailed: ++report.failures; break;
      case AttackStatus::kBudget: ++report.budget_exhausted; break;
      case AttackStatus::kOracleError: ++report.errors; break;
    }
    queries += static_cast<double>(r.queries);
    if (r.status == AttackStatus::kOracleError) continue;
    ++evaluated;
    const bool clean_correct = !r.clean.record.success;
    report.clean_correct += clean_correct ? 1 : 0;
    const auto& adversary = r.reported();
    adv_correct += adversary.record.success ? 0 : 1;
    if (clean_correct && r.status == AttackStatus::kSucceeded) ++clean_correct_successes;
    if (r.positions_with_candidates > 0) {
      rates.push_back(static_cast<double>(adversary.perturbations.size()) /
                      static_cast<double>(r.positions_with_candidates));
    }
    if (r.best_successful) {
      for (const auto& p : r.best_successful->perturbations) {
        ++report.perturbations_per_language[p.lang.code()];
      }
    }
    if (task == TaskKind::kSpanQa) {
      clean_f1 += r.clean.record.f1.value_or(0.0);
      clean_em += r.clean.record.exact_match.value_or(0.0);
      adv_f1 += adversary.record.f1.value_or(0.0);
      adv_em += adversary.record.exact_match.value_or(0.0);
    }
  }
  if (evaluated > 0) {
    const double n = static_cast<double>(evaluated);
    report.clean_accuracy = static_cast<double>(report.clean_correct) / n;
    report.adv_accuracy = static_cast<double>(adv_correct) / n;
    if (task == TaskKind::kSpanQa) {
      report.clean_f1 = clean_f1 / n;
      report.clean_em = clean_em / n;
      report.adv_f1 = adv_f1 / n;
      report.adv_em = adv_em / n;
    }
  }
  if (report.clean_correct > 0) {
    report.success_rate = static_cast<double>(clean_correct_successes) /
                          static_cast<double>(report.clean_correct);
  }
  if (report.clean_accuracy > 0.0) {
    report.score_ratio = 1.0 - report.adv_accuracy / report.clean_accuracy;
  }
  report.mean_queries = results.empty() ? 0.0 : queries / static_cast<double>(results.size());
  report.mean_perturbation_rate = Mean(rates);
  return report;
}

CampaignOutput RunCampaign(const Dataset& dataset, const AttackConfig& cfg, LossOracle& oracle,
                           const CampaignAssets& assets, const CampaignOptions& options) {
  cfg.Validate();
  CampaignOutput output;
  const std::size_t n = dataset.examples.size();
  output.results.resize(n);
  std::vector<ExampleAssets> prepared(n);
  const AttackKind candidates = CandidateKind(cfg, assets);

  ParallelFor(n, options.workers, [&](std::size_t i) {
    const auto& x = dataset.examples[i];
    prepared[i] = PrepareAssets(x, cfg, assets, candidates);
    auto source = MakeSource(x, prepared[i], cfg, assets, candidates);
    output.results[i] = cfg.kind == AttackKind::kRandom
                            ? RandomAttack(x, *source, oracle, cfg)
                            : BeamSearchAttack(x, *source, oracle, cfg);
  });

  const TaskKind task = n > 0 ? dataset.examples.front().task : TaskKind::kClassification;
  output.report = Summarize(output.results, task);
  output.report.config = AttackConfigJson(cfg);

  if (options.run_random_baseline && n > 0 && cfg.kind != AttackKind::kRandom) {
    RandomBaseline baseline;
    baseline.rho = options.random_rho.value_or(output.report.mean_perturbation_rate);
    baseline.seeds = options.random_seeds;
    for (const auto seed : options.random_seeds) {
      std::vector<LabeledExample> perturbed(n);
      ParallelFor(n, options.workers, [&](std::size_t i) {
        const auto& x = dataset.examples[i];
        auto source = MakeSource(x, prepared[i], cfg, assets, candidates);
        perturbed[i] = RandomPerturb(x, *source, baseline.rho, seed).example;
      });
      std::size_t correct = 0;
      std::size_t scored = 0;
      try {
        for (const auto& record : oracle.Query(perturbed)) {
          ++scored;
          correct += record.success ? 0 : 1;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kOracle) throw;
        continue;
      }
      baseline.accuracies.push_back(static_cast<double>(correct) / static_cast<double>(scored));
    }
    baseline.mean = Mean(baseline.accuracies);
    baseline.stdev = Stdev(baseline.accuracies);
    output.report.random = std::move(baseline);
  }
  return output;
}

std::string FormatResultsJsonl(const std::vector<AttackResult>& results) {
  std::string out;
  for (const auto& r : results) {
    out += AttackResultToJson(r).dump();
    out.push_back('\n');
  }
  return out;
}

SweepVariable ParseSweepVariable(std::string_view name) {
  if (name == "beam-width" || name == "beam_width") return SweepVariable::kBeamWidth;
  if (name == "num-languages" || name == "num_languages") return SweepVariable::kNumLanguages;
  throw ConfigError("unknown sweep variable '" + std::string(name) +
                    "' (expected beam-width or num-languages)");
}

std::vector<SweepRow> Sweep(SweepVariable variable, const std::vector<std::size_t>& values,
                            const Dataset& dataset, const AttackConfig& base,
                            LossOracle& oracle, const CampaignAssets& assets,
                            const CampaignOptions& options) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (!std::is_sorted(values.begin(), values.end())) {
    throw ConfigError("sweep values must be ascending");
  }
  std::vector<SweepRow> rows;
  for (const auto value : values) {
    AttackConfig cfg = base;
    if (variable == SweepVariable::kBeamWidth) {
      cfg.beam_width = value;
    } else {
      if (value < 1 || value > base.embedded_languages.size()) {
        throw ConfigError("language count " + std::to_string(value) + " outside 1.." +
                          std::to_string(base.embedded_languages.size()));
      }
      cfg.embedded_languages.assign(base.embedded_languages.begin(),
                                    base.embedded_languages.begin() +
                                        static_cast<std::ptrdiff_t>(value));
    }
    auto campaign = RunCampaign(dataset, cfg, oracle, assets, options);
    rows.push_back({value, std::move(campaign.report)});
  }
  return rows;
}

std::string SweepCsv(SweepVariable variable, const std::vector<SweepRow>& rows) {
  std::string out = variable == SweepVariable::kBeamWidth ? "beam_width" : "num_languages";
  out += ",clean_accuracy,adv_accuracy,success_rate,mean_queries\n";
  for (const auto& row : rows) {
    const auto fmt = [](double v) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6f", v);
      return std::string(buf);
    };
    out += std::to_string(row.value) + "," + fmt(row.report.clean_accuracy) + "," +
           fmt(row.report.adv_accuracy) + "," +
           (row.report.success_rate ? fmt(*row.report.success_rate) : std::string()) + "," +
           fmt(row.report.mean_queries) + "\n";
  }
  return out;
}

CampaignReport EvaluateClean(const Dataset& dataset, LossOracle& oracle) {
  std::vector<AttackResult> results;
  if (!dataset.examples.empty()) {
    const auto records = oracle.Query(dataset.examples);
    for (std::size_t i = 0; i < records.size(); ++i) {
      AttackResult r;
      r.id = dataset.examples[i].id;
      r.clean = Adversary{dataset.examples[i], records[i], {}};
      r.best = r.clean;
      r.queries = 1;
      r.status = records[i].success ? AttackStatus::kSucceeded : AttackStatus::kFailed;
      results.push_back(std::move(r));
    }
  }
  const TaskKind task =
      dataset.examples.empty() ? TaskKind::kClassification : dataset.examples.front().task;
  auto report = Summarize(results, task);
  report.success_rate.reset();
  report.score_ratio.reset();
  return report;
}

Dataset BuildCleanDl(const TranslationStore& parallel, const Dataset& base, std::uint64_t seed) {
  Dataset out;
  out.label_names = base.label_names;
  const std::vector<SegmentRole> roles = {SegmentRole::kPremise, SegmentRole::kHypothesis};
  for (const auto& ex : base.examples) {
    if (ex.task != TaskKind::kClassification) {
      throw DataError("Clean_DL needs sentence-pair classification data");
    }
    auto langs = parallel.LanguagesFor(ex.id, roles);
    if (std::find(langs.begin(), langs.end(), ex.matrix_language) == langs.end()) {
      langs.push_back(ex.matrix_language);
      std::sort(langs.begin(), langs.end());
    }
    if (langs.size() < 2) {
      throw DataError("example '" + ex.id + "' has fewer than two languages available");
    }
    Rng rng = Rng::ForKey(seed, ex.id);
    const std::size_t premise_lang = rng.UniformIndex(langs.size());
    std::size_t hypothesis_lang = rng.UniformIndex(langs.size() - 1);
    if (hypothesis_lang >= premise_lang) ++hypothesis_lang;

    LabeledExample mixed = ex;
    const auto pick = [&](SegmentRole role, const LanguageTag& lang) {
      if (lang == ex.matrix_language) return *ex.Find(role);
      return *parallel.Get({ex.id, role, lang.code()});
    };
    mixed.segments = {pick(SegmentRole::kPremise, langs[premise_lang]),
                      pick(SegmentRole::kHypothesis, langs[hypothesis_lang])};
    out.examples.push_back(std::move(mixed));
  }
  return out;
}

}  // namespace codemix::eval
