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

#include "codemix/cat.h"

#include <algorithm>
#include <iostream>
#include <set>

#include "codemix/error.h"

namespace codemix::cat {

using nlohmann::json;

double AdvDistribution::total() const {
  double sum = 0.0;
  for (const auto& [lang, w] : weights) sum += w;
  return sum;
}

json AdvDistribution::ToJson() const {
  json j = json::object();
  for (const auto& [lang, w] : weights) j[lang.code()] = w;
  return j;
}

AdvDistribution ComputeAdvDistribution(const std::vector<AttackResult>& results) {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& result : results) {
    if (!result.best_successful) continue;
    for (const auto& p : result.best_successful->perturbations) {
      ++counts[p.lang.code()];
      ++total;
    }
  }
  if (total == 0) {
    throw DataError("no perturbations in successful adversaries; cannot estimate P_adv");
  }
  AdvDistribution dist;
  for (const auto& [code, count] : counts) {
    dist.weights.emplace_back(LanguageTag::Parse(code),
                              static_cast<double>(count) / static_cast<double>(total));
  }
  return dist;
}

std::vector<LanguageTag> SampleLanguages(const AdvDistribution& dist, std::size_t n, Rng& rng) {
  std::vector<std::pair<LanguageTag, double>> pool;
  for (const auto& entry : dist.weights) {
    if (entry.second > 0.0) pool.push_back(entry);
  }
  std::vector<LanguageTag> chosen;
  while (chosen.size() < n && !pool.empty()) {
    double mass = 0.0;
    for (const auto& [lang, w] : pool) mass += w;
    const double draw = rng.Uniform01() * mass;
    double cumulative = 0.0;
    std::size_t pick = pool.size() - 1;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      cumulative += pool[k].second;
      if (draw < cumulative) {
        pick = k;
        break;
      }
    }
    chosen.push_back(pool[pick].first);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return chosen;
}

void CatConfig::Validate() const {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (n < 1) throw ConfigError("n must be at least 1");
  if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in [0, 1]");
  if (max_phrase_len < 1) throw ConfigError("max phrase length must be at least 1");
}

json CatConfig::ToJson() const {
  return {{"k", k}, {"n", n}, {"rho", rho}, {"seed", seed}, {"max_phrase_len", max_phrase_len}};
}

namespace {

CandidateTable KeepSampled(const CandidateTable& table,
                           const std::map<SegmentRole, std::vector<LanguageTag>>& sampled) {
  CandidateTable out(table.positions());
  for (std::size_t p = 0; p < table.positions(); ++p) {
    for (const auto& entry : table.at(p)) {
      const auto it = sampled.find(entry.role);
      if (it == sampled.end()) continue;
      if (std::find(it->second.begin(), it->second.end(), entry.pair.embedded_lang) !=
          it->second.end()) {
        out.Add(p, entry);
      }
    }
  }
  return out;
}

}  // namespace

CatOutput GenerateCatDataset(const Dataset& x, TranslationProvider* provider,
                             TranslationStore& store, Aligner& aligner,
                             const AdvDistribution& dist, const CatConfig& cfg) {
  cfg.Validate();
  if (dist.weights.empty()) throw ConfigError("adversarial distribution is empty");
  CatOutput output;
  output.dataset.label_names = x.label_names;
  output.dataset.examples = x.examples;
  for (const auto& example : x.examples) {
    Rng rng = Rng::ForKey(cfg.seed, example.id);
    std::map<SegmentRole, std::vector<LanguageTag>> sampled;
    std::vector<LanguageTag> all_langs;
    for (const auto role : AttackableRoles(example.task)) {
      sampled[role] = SampleLanguages(dist, cfg.n, rng);
      for (const auto& lang : sampled[role]) {
        if (std::find(all_langs.begin(), all_langs.end(), lang) == all_langs.end()) {
          all_langs.push_back(lang);
        }
      }
    }
    std::sort(all_langs.begin(), all_langs.end());

    std::optional<CandidateTable> table;
    std::string warning;
    try {
      const auto view = GetTranslations(example, all_langs, provider, store);
      table = KeepSampled(BuildCandidateTable(example, view, all_langs, aligner,
                                              {cfg.max_phrase_len}),
                          sampled);
    } catch (const Error& e) {
      warning = e.what();
      ++output.warnings;
      std::cerr << "warning: " << example.id << " emitted unperturbed: " << warning << "\n";
    }

    for (std::size_t j = 1; j <= cfg.k; ++j) {
      LabeledExample copy = example;
      std::size_t count = 0;
      if (table) {
        PhraseCandidates source(example, *table, /*equivalence_constraint=*/false);
        auto perturbed = RandomPerturb(example, source, cfg.rho, rng);
        copy = std::move(perturbed.example);
        count = perturbed.applied.size();
      }
      copy.id = example.id + "#cat" + std::to_string(j);
      output.provenance.push_back({copy.id, sampled, count, warning});
      output.dataset.examples.push_back(std::move(copy));
    }
  }
  return output;
}

std::string FormatProvenanceJsonl(const std::vector<CatProvenance>& provenance) {
  std::string out;
  for (const auto& p : provenance) {
    json languages = json::object();
    for (const auto& [role, langs] : p.sampled_languages) {
      json codes = json::array();
      for (const auto& lang : langs) codes.push_back(lang.code());
      languages[std::string(RoleName(role))] = std::move(codes);
    }
    json j = {{"id", p.id},
              {"sampled_languages", std::move(languages)},
              {"perturbation_count", p.perturbation_count}};
    if (!p.warning.empty()) j["warning"] = p.warning;
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

}  // namespace codemix::cat
