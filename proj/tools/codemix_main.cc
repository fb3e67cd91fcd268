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

// codemix: code-mixed adversarial attacks, CAT data generation and alignment
// tooling.

#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "codemix/alignment.h"
#include "codemix/attack.h"
#include "codemix/cat.h"
#include "codemix/corpus.h"
#include "codemix/error.h"
#include "codemix/eval.h"
#include "codemix/kernels/kernels.h"
#include "codemix/lexicon.h"
#include "codemix/oracle.h"
#include "codemix/text.h"
#include "codemix/translation.h"
#include "json.hpp"

namespace codemix {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitOracle = 3;
constexpr int kExitData = 4;

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return kExitConfig;
    case ErrorKind::kOracle: return kExitOracle;
    case ErrorKind::kData: return kExitData;
  }
  return kExitData;
}

// Options shared by every command that talks to the target model.
struct OracleFlags {
  std::string kind = "surrogate";
  std::string url;
  std::string surrogate_model;
  std::string train;
  double smoothing = 1.0;
  int buckets = 10;
  std::size_t batch_size = 64;
  double f1_threshold = 0.5;

  void Register(CLI::App* cmd) {
    cmd->add_option("--oracle", kind, "Target model backend")
        ->check(CLI::IsMember({"surrogate", "remote"}))
        ->capture_default_str();
    cmd->add_option("--oracle-url", url,
                    "Model server base URL (falls back to CODEMIX_ORACLE_URL)");
    cmd->add_option("--surrogate-model", surrogate_model, "Surrogate weights (JSON)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--train", train,
                    "Dataset used to fit the overlap surrogate (default: --dataset)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--smoothing", smoothing, "Surrogate count smoothing")
        ->capture_default_str();
    cmd->add_option("--buckets", buckets, "Surrogate overlap buckets")->capture_default_str();
    cmd->add_option("--batch-size", batch_size, "Oracle request batch size")
        ->capture_default_str();
    cmd->add_option("--f1-threshold", f1_threshold,
                    "Span QA: an attack succeeds when F1 drops below this")
        ->capture_default_str();
  }

  std::unique_ptr<LossOracle> Build(const Dataset& dataset) const {
    OracleConfig cfg;
    cfg.batch_size = batch_size;
    cfg.success_f1_threshold = f1_threshold;
    if (kind == "remote") {
      cfg.backend = OracleBackend::kRemote;
      cfg.endpoint = ResolveOracleEndpoint(url);
      cfg.Validate();
      return std::make_unique<RemoteOracle>(cfg);
    }
    cfg.Validate();
    const bool qa = !dataset.examples.empty() && dataset.examples.front().task == TaskKind::kSpanQa;
    if (qa) return std::make_unique<QaSurrogateOracle>(cfg);
    SurrogateModel model;
    if (!surrogate_model.empty()) {
      model = SurrogateModel::FromJson(json::parse(ReadFile(surrogate_model)));
    } else {
      const Dataset train_set = train.empty() ? dataset : LoadDataset(train);
      model = BuildOverlapSurrogate(train_set, smoothing, buckets);
    }
    return std::make_unique<SurrogateOracle>(std::move(model), cfg);
  }
};

// Translation and alignment sources.
struct ResourceFlags {
  std::string translations;
  std::string translate_url;
  std::string translation_cache;
  std::string aligner = "ibm1";
  std::string align_url;
  std::string align_method = "match";
  int iters = 5;
  std::size_t max_phrase_len = 4;

  void Register(CLI::App* cmd) {
    cmd->add_option("--translations", translations,
                    "Parallel translations JSONL (gold or cache format)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--translate-url", translate_url,
                    "Translation server base URL for segments not in --translations");
    cmd->add_option("--translation-cache", translation_cache,
                    "Write every translation used to this JSONL file");
    cmd->add_option("--aligner", aligner, "Word aligner")
        ->check(CLI::IsMember({"ibm1", "remote"}))
        ->capture_default_str();
    cmd->add_option("--align-url", align_url, "Alignment server base URL");
    cmd->add_option("--align-method", align_method, "IBM1 link extraction")
        ->check(CLI::IsMember({"match", "intersect"}))
        ->capture_default_str();
    cmd->add_option("--iters", iters, "IBM1 EM iterations")->capture_default_str();
    cmd->add_option("--max-phrase-len", max_phrase_len, "Longest phrase on either side")
        ->capture_default_str();
  }

  TranslationStore LoadStore(const LanguageTag& matrix) const {
    if (translations.empty()) return {};
    return LoadGoldParallel(translations, matrix);
  }

  std::unique_ptr<TranslationProvider> Provider() const {
    if (translate_url.empty()) return nullptr;
    return std::make_unique<RemoteTranslationProvider>(translate_url);
  }

  // Languages must be reachable through the store or a provider.
  void CheckCoverage(const Dataset& dataset, const TranslationStore& store,
                     const std::vector<LanguageTag>& langs) const {
    if (!translate_url.empty()) return;
    for (const auto& lang : langs) {
      bool found = false;
      for (const auto& x : dataset.examples) {
        const auto have = store.LanguagesFor(x.id, AttackableRoles(x.task));
        if (std::find(have.begin(), have.end(), lang) != have.end()) {
          found = true;
          break;
        }
      }
      if (!found) {
        throw ConfigError("no translations for language '" + lang.code() +
                          "' (pass --translations or --translate-url)");
      }
    }
  }

  std::unique_ptr<Aligner> BuildAligner(const Dataset& dataset, TranslationStore& store,
                                        TranslationProvider* provider,
                                        const std::vector<LanguageTag>& langs) const {
    if (aligner == "remote") {
      if (align_url.empty()) throw ConfigError("--aligner remote needs --align-url");
      return std::make_unique<RemoteAligner>(align_url);
    }
    if (iters < 1) throw ConfigError("--iters must be at least 1");
    // Make sure every training pair is in the store before fitting.
    for (const auto& x : dataset.examples) GetTranslations(x, langs, provider, store);
    return std::make_unique<Ibm1Aligner>(TrainAlignerFromStore(
        dataset, store, langs, iters, ParseAlignMethod(align_method)));
  }
};

json SimdJson() {
  return std::string(kernels::IsaName(kernels::ActiveIsa()));
}

void WriteJson(const fs::path& path, const json& j) { WriteFile(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// attack / sweep

struct AttackFlags {
  std::string method = "bumblebee";
  std::string dataset;
  std::string langs;
  std::size_t beam_width = 1;
  bool filter = false;
  bool equiv = false;
  std::string translit;
  std::vector<std::string> dicts;
  std::optional<std::uint64_t> seed;
  std::optional<double> rho;
  std::optional<std::size_t> max_queries;
  bool early_exit = false;
  std::size_t workers = 1;
  bool no_random = false;
  std::string random_candidates;
  OracleFlags oracle;
  ResourceFlags resources;

  void Register(CLI::App* cmd) {
    cmd->add_option("--method", method, "Attack")
        ->check(CLI::IsMember({"polygloss", "bumblebee", "random"}))
        ->capture_default_str();
    cmd->add_option("--dataset", dataset, "Classification JSONL or SQuAD-style JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--langs", langs, "Embedded languages, e.g. fr,zh");
    cmd->add_option("--beam-width", beam_width, "Beam width")->capture_default_str();
    cmd->add_flag("--filter", filter, "PolyGloss: keep candidates found in the translation");
    cmd->add_flag("--equiv-constraint", equiv, "Bumblebee: apply the equivalence constraint");
    cmd->add_option("--translit", translit, "Transliteration table TSV (to Latin script)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--dict", dicts, "Bilingual dictionary as LANG=PATH (repeatable)");
    cmd->add_option("--seed", seed, "RNG seed (required for random)");
    cmd->add_option("--rho", rho,
                    "Random: per-position perturbation probability (default 0.5); otherwise "
                    "the baseline rate (default: matched to the attack)");
    cmd->add_option("--max-queries", max_queries, "Per-example query budget");
    cmd->add_flag("--early-exit", early_exit, "Stop at the first successful adversary");
    cmd->add_option("--workers", workers, "Examples attacked in parallel")
        ->capture_default_str();
    cmd->add_flag("--no-random-baseline", no_random, "Skip the matched random baseline");
    cmd->add_option("--random-candidates", random_candidates,
                    "Candidate space for random perturbation (polygloss|bumblebee)")
        ->check(CLI::IsMember({"polygloss", "bumblebee"}));
    oracle.Register(cmd);
    resources.Register(cmd);
  }
};

// Everything a campaign needs, owned in one place.
struct CampaignSetup {
  Dataset dataset;
  AttackConfig cfg;
  std::unique_ptr<LossOracle> oracle;
  std::map<std::string, BilingualDictionary> dictionaries;
  TranslationStore store;
  std::unique_ptr<TranslationProvider> provider;
  std::unique_ptr<Aligner> aligner;
  eval::CampaignAssets assets;
  eval::CampaignOptions options;
};

std::unique_ptr<CampaignSetup> Prepare(const AttackFlags& f) {
  auto s = std::make_unique<CampaignSetup>();
  s->cfg.kind = ParseAttackKind(f.method);
  if (s->cfg.kind == AttackKind::kRandom && !f.seed) {
    throw ConfigError("--method random requires --seed");
  }
  if (f.workers < 1) throw ConfigError("--workers must be at least 1");

  s->dataset = LoadDataset(f.dataset);
  s->dataset.CheckUniqueIds();
  if (s->dataset.examples.empty()) throw DataError("dataset is empty: " + f.dataset);
  const LanguageTag matrix = s->dataset.examples.front().matrix_language;

  s->cfg.embedded_languages = ParseLanguageList(f.langs);
  s->cfg.beam_width = f.beam_width;
  s->cfg.filter_by_translation = f.filter;
  s->cfg.equivalence_constraint = f.equiv;
  s->cfg.early_exit = f.early_exit;
  s->cfg.max_queries = f.max_queries;
  s->cfg.seed = f.seed.value_or(0);
  if (s->cfg.kind == AttackKind::kRandom) {
    s->cfg.rho_uniform = f.rho.value_or(0.5);
  }
  s->cfg.Validate();

  const AttackKind candidates =
      s->cfg.kind == AttackKind::kRandom
          ? (f.random_candidates.empty() ? AttackKind::kBumblebee
                                         : ParseAttackKind(f.random_candidates))
          : s->cfg.kind;

  if (!f.translit.empty()) {
    Script from = Script::kLatin;
    for (const auto& l : s->cfg.embedded_languages) {
      if (l.script() != Script::kLatin) {
        from = l.script();
        break;
      }
    }
    if (from == Script::kLatin) {
      throw ConfigError("--translit needs a non-Latin embedded language");
    }
    s->cfg.transliteration = std::make_shared<TransliterationTable>(
        LoadTransliterationTsv(f.translit, from, Script::kLatin));
  }

  if (candidates == AttackKind::kPolyGloss) {
    for (const auto& spec : f.dicts) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos) throw ConfigError("--dict expects LANG=PATH, got " + spec);
      const auto lang = LanguageTag::Parse(spec.substr(0, eq));
      const fs::path path = spec.substr(eq + 1);
      if (!fs::exists(path)) throw ConfigError("dictionary not found: " + path.string());
      s->dictionaries.emplace(lang.code(), LoadDictionaryTsv(path, matrix, lang));
    }
    for (const auto& l : s->cfg.embedded_languages) {
      if (!s->dictionaries.count(l.code())) {
        throw ConfigError("no dictionary for language '" + l.code() + "' (pass --dict " +
                          l.code() + "=PATH)");
      }
    }
  }

  const bool need_translations = candidates == AttackKind::kBumblebee || f.filter;
  s->store = f.resources.LoadStore(matrix);
  s->provider = f.resources.Provider();
  if (need_translations) {
    f.resources.CheckCoverage(s->dataset, s->store, s->cfg.embedded_languages);
  }
  if (candidates == AttackKind::kBumblebee) {
    s->aligner = f.resources.BuildAligner(s->dataset, s->store, s->provider.get(),
                                          s->cfg.embedded_languages);
  }
  s->oracle = f.oracle.Build(s->dataset);

  s->assets.dictionaries = &s->dictionaries;
  s->assets.store = &s->store;
  s->assets.provider = s->provider.get();
  s->assets.aligner = s->aligner.get();
  s->assets.table_config.max_phrase_len = f.resources.max_phrase_len;
  s->assets.random_candidates = candidates;
  s->options.workers = f.workers;
  s->options.run_random_baseline = !f.no_random;
  if (f.seed) {
    s->options.random_seeds.clear();
    for (std::uint64_t i = 0; i < 5; ++i) s->options.random_seeds.push_back(*f.seed + i);
  }
  if (s->cfg.kind != AttackKind::kRandom && f.rho) s->options.random_rho = f.rho;
  return s;
}

int RunAttack(const AttackFlags& f, const std::string& out_dir) {
  auto s = Prepare(f);
  auto output = eval::RunCampaign(s->dataset, s->cfg, *s->oracle, s->assets, s->options);
  json report = output.report.ToJson();
  report["dataset"] = f.dataset;
  report["oracle"] = f.oracle.kind;
  report["oracle_queries"] = s->oracle->queries();
  report["simd"] = SimdJson();

  const fs::path dir = out_dir;
  WriteFile(dir / "adversaries.jsonl", eval::FormatResultsJsonl(output.results));
  WriteJson(dir / "report.json", report);
  if (!f.resources.translation_cache.empty()) {
    SaveTranslationStore(s->store, f.resources.translation_cache);
  }
  std::printf("examples %zu  clean acc %.4f  adv acc %.4f  mean queries %.2f\n",
              output.report.total, output.report.clean_accuracy, output.report.adv_accuracy,
              output.report.mean_queries);
  if (output.report.random) {
    std::printf("random baseline (rho %.4f): acc %.4f +/- %.4f\n", output.report.random->rho,
                output.report.random->mean, output.report.random->stdev);
  }
  if (output.report.errors > 0) {
    std::fprintf(stderr, "error: %zu example(s) failed on the oracle; see %s\n",
                 output.report.errors, (dir / "adversaries.jsonl").c_str());
    return kExitOracle;
  }
  return kExitOk;
}

int RunSweep(const AttackFlags& f, const std::string& vary, const std::string& values_csv,
             const std::string& out) {
  auto s = Prepare(f);
  std::vector<std::size_t> values;
  for (const auto& part : text::SplitOn(values_csv, ',')) {
    const auto v = text::Trim(part);
    if (v.empty() || v.find_first_not_of("0123456789") != std::string_view::npos) {
      throw ConfigError("--values expects comma-separated integers, got '" + values_csv + "'");
    }
    values.push_back(std::stoul(std::string(v)));
  }
  const auto variable = eval::ParseSweepVariable(vary);
  s->options.run_random_baseline = false;
  const auto rows =
      eval::Sweep(variable, values, s->dataset, s->cfg, *s->oracle, s->assets, s->options);
  const std::string csv = eval::SweepCsv(variable, rows);
  WriteFile(out, csv);
  std::fputs(csv.c_str(), stdout);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// cat-gen

struct CatFlags {
  std::string dataset;
  std::string adv_results;
  std::size_t k = 9;
  std::size_t n = 2;
  double rho = 0.5;
  std::optional<std::uint64_t> seed;
  std::string out;
  ResourceFlags resources;

  void Register(CLI::App* cmd) {
    cmd->add_option("--dataset", dataset, "Training set to augment")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--adv-results", adv_results, "adversaries.jsonl from an attack run")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--k", k, "Perturbed copies per example")->capture_default_str();
    cmd->add_option("--n", n, "Languages sampled per segment")->capture_default_str();
    cmd->add_option("--rho", rho, "Per-position perturbation probability")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "RNG seed")->required();
    cmd->add_option("--out", out, "Output dataset")->required();
    resources.Register(cmd);
  }
};

int RunCat(const CatFlags& f) {
  cat::CatConfig cfg;
  cfg.k = f.k;
  cfg.n = f.n;
  cfg.rho = f.rho;
  cfg.seed = *f.seed;
  cfg.max_phrase_len = f.resources.max_phrase_len;
  cfg.Validate();

  Dataset dataset = LoadDataset(f.dataset);
  dataset.CheckUniqueIds();
  if (dataset.examples.empty()) throw DataError("dataset is empty: " + f.dataset);
  const auto dist = cat::ComputeAdvDistribution(LoadAttackResults(f.adv_results));
  std::vector<LanguageTag> langs;
  for (const auto& [lang, w] : dist.weights) {
    if (w > 0.0) langs.push_back(lang);
  }
  const LanguageTag matrix = dataset.examples.front().matrix_language;
  TranslationStore store = f.resources.LoadStore(matrix);
  auto provider = f.resources.Provider();
  f.resources.CheckCoverage(dataset, store, langs);
  auto aligner = f.resources.BuildAligner(dataset, store, provider.get(), langs);

  const auto output =
      cat::GenerateCatDataset(dataset, provider.get(), store, *aligner, dist, cfg);
  WriteDataset(output.dataset, f.out);
  WriteFile(f.out + ".provenance.jsonl", cat::FormatProvenanceJsonl(output.provenance));
  json report = {{"config", cfg.ToJson()},
                 {"p_adv", dist.ToJson()},
                 {"input_examples", dataset.examples.size()},
                 {"output_examples", output.dataset.examples.size()},
                 {"warnings", output.warnings}};
  WriteJson(f.out + ".report.json", report);
  if (!f.resources.translation_cache.empty()) {
    SaveTranslationStore(store, f.resources.translation_cache);
  }
  std::cout << report.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// align / build-phrases

Bitext LoadBitext(const std::string& path) {
  Bitext bitext;
  std::istringstream in(ReadFile(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::Trim(line).empty()) continue;
    const auto sep = line.find("|||");
    if (sep == std::string::npos) {
      throw DataError(path + ": line " + std::to_string(line_no) + ": expected 'src ||| tgt'");
    }
    const auto split = [](std::string_view side) {
      TokenList tokens;
      for (const auto& t : text::SplitOn(side, ' ')) {
        const auto trimmed = text::Trim(t);
        if (!trimmed.empty()) tokens.emplace_back(trimmed);
      }
      return tokens;
    };
    bitext.emplace_back(split(std::string_view(line).substr(0, sep)),
                        split(std::string_view(line).substr(sep + 3)));
  }
  if (bitext.empty()) throw ConfigError("bitext is empty: " + path);
  return bitext;
}

struct AlignFlags {
  std::string bitext;
  int iters = 5;
  std::string method = "match";
  std::string out;

  void Register(CLI::App* cmd) {
    cmd->add_option("--bitext", bitext, "One 'src ||| tgt' pair per line")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--iters", iters, "EM iterations")->capture_default_str();
    cmd->add_option("--method", method, "Link extraction")
        ->check(CLI::IsMember({"match", "intersect"}))
        ->capture_default_str();
    cmd->add_option("--out", out, "Pharaoh output")->required();
  }
};

std::vector<AlignmentLinks> AlignBitext(const Bitext& bitext, int iters,
                                        const std::string& method) {
  if (iters < 1) throw ConfigError("--iters must be at least 1");
  const auto probs = TrainIbm1(bitext, iters);
  const auto m = ParseAlignMethod(method);
  std::vector<AlignmentLinks> out;
  out.reserve(bitext.size());
  for (const auto& [src, tgt] : bitext) out.push_back(AlignPair(src, tgt, probs, m));
  return out;
}

int RunAlign(const AlignFlags& f) {
  if (f.iters < 1) throw ConfigError("--iters must be at least 1");
  const Bitext bitext = LoadBitext(f.bitext);
  std::string out;
  for (const auto& links : AlignBitext(bitext, f.iters, f.method)) {
    out += FormatPharaoh(links);
    out.push_back('\n');
  }
  WriteFile(f.out, out);
  return kExitOk;
}

struct PhraseFlags {
  AlignFlags align;
  std::string alignments;
  std::size_t max_phrase_len = 4;

  void Register(CLI::App* cmd) {
    cmd->add_option("--bitext", align.bitext, "One 'src ||| tgt' pair per line")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--alignments", alignments,
                    "Pharaoh links, one line per pair (default: train IBM1)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--iters", align.iters, "EM iterations")->capture_default_str();
    cmd->add_option("--method", align.method, "Link extraction")
        ->check(CLI::IsMember({"match", "intersect"}))
        ->capture_default_str();
    cmd->add_option("--max-phrase-len", max_phrase_len, "Longest phrase on either side")
        ->capture_default_str();
    cmd->add_option("--out", align.out, "Phrase pairs JSONL")->required();
  }
};

int RunBuildPhrases(const PhraseFlags& f) {
  if (f.max_phrase_len < 1) throw ConfigError("--max-phrase-len must be at least 1");
  const Bitext bitext = LoadBitext(f.align.bitext);
  std::vector<AlignmentLinks> links;
  if (f.alignments.empty()) {
    links = AlignBitext(bitext, f.align.iters, f.align.method);
  } else {
    std::istringstream in(ReadFile(f.alignments));
    std::string line;
    while (std::getline(in, line)) links.push_back(ParsePharaoh(line));
    if (links.size() != bitext.size()) {
      throw DataError("alignment lines (" + std::to_string(links.size()) +
                      ") do not match bitext pairs (" + std::to_string(bitext.size()) + ")");
    }
  }
  std::string out;
  for (std::size_t p = 0; p < bitext.size(); ++p) {
    const auto& [src, tgt] = bitext[p];
    for (const auto& pair : ExtractPhrasePairs(links[p], src, tgt, f.max_phrase_len)) {
      const TokenList source(src.begin() + static_cast<std::ptrdiff_t>(pair.matrix_span.start),
                             src.begin() + static_cast<std::ptrdiff_t>(pair.matrix_span.end) + 1);
      json j = {{"pair", p},
                {"source_span", {pair.matrix_span.start, pair.matrix_span.end}},
                {"target_span", {pair.embedded_span.start, pair.embedded_span.end}},
                {"source", text::Join(source, " ")},
                {"target", text::Join(pair.embedded_text, " ")},
                {"monotonic", pair.monotonic}};
      out += j.dump();
      out.push_back('\n');
    }
  }
  WriteFile(f.align.out, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval-clean

struct EvalFlags {
  std::string dataset;
  std::string out;
  bool clean_dl = false;
  std::string translations;
  std::optional<std::uint64_t> seed;
  std::string write_dataset;
  OracleFlags oracle;

  void Register(CLI::App* cmd) {
    cmd->add_option("--dataset", dataset, "Evaluation set")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "Report JSON");
    cmd->add_flag("--clean-dl", clean_dl,
                  "Evaluate premise and hypothesis in different languages");
    cmd->add_option("--translations", translations, "Parallel translations (for --clean-dl)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "RNG seed (for --clean-dl)");
    cmd->add_option("--write-dataset", write_dataset, "Save the evaluated dataset");
    oracle.Register(cmd);
  }
};

int RunEvalClean(const EvalFlags& f) {
  Dataset dataset = LoadDataset(f.dataset);
  dataset.CheckUniqueIds();
  if (dataset.examples.empty()) throw DataError("dataset is empty: " + f.dataset);
  auto oracle = f.oracle.Build(dataset);
  json report;
  if (f.clean_dl) {
    if (!f.seed) throw ConfigError("--clean-dl requires --seed");
    if (f.translations.empty()) throw ConfigError("--clean-dl requires --translations");
    const auto store =
        LoadGoldParallel(f.translations, dataset.examples.front().matrix_language);
    dataset = eval::BuildCleanDl(store, dataset, *f.seed);
    report["seed"] = *f.seed;
  }
  const auto result = eval::EvaluateClean(dataset, *oracle);
  report["variant"] = f.clean_dl ? "clean_dl" : "clean";
  report["dataset"] = f.dataset;
  report["examples"] = result.total;
  report["accuracy"] = result.clean_accuracy;
  if (result.clean_f1) {
    report["f1"] = *result.clean_f1;
    report["exact_match"] = *result.clean_em;
  }
  if (!f.write_dataset.empty()) WriteDataset(dataset, f.write_dataset);
  if (!f.out.empty()) WriteJson(f.out, report);
  std::cout << report.dump(2) << "\n";
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Code-mixed adversarial attacks and training data generation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key = value file; flags override it");

  AttackFlags attack_flags;
  std::string attack_out;
  auto* attack = app.add_subcommand("attack", "Attack every example of a dataset");
  attack_flags.Register(attack);
  attack->add_option("--out", attack_out, "Output directory")->required();

  AttackFlags sweep_flags;
  std::string sweep_vary = "beam-width";
  std::string sweep_values = "1,2,4";
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Repeat a campaign over a range of settings");
  sweep_flags.Register(sweep);
  sweep->add_option("--vary", sweep_vary, "beam-width or num-languages")
      ->capture_default_str();
  sweep->add_option("--values", sweep_values, "Comma-separated values")->capture_default_str();
  sweep->add_option("--out", sweep_out, "CSV output")->required();

  CatFlags cat_flags;
  auto* cat_cmd = app.add_subcommand("cat-gen", "Generate code-mixed adversarial training data");
  cat_flags.Register(cat_cmd);

  AlignFlags align_flags;
  auto* align = app.add_subcommand("align", "Train IBM Model 1 and write Pharaoh links");
  align_flags.Register(align);

  PhraseFlags phrase_flags;
  auto* phrases = app.add_subcommand("build-phrases", "Extract aligned phrase pairs");
  phrase_flags.Register(phrases);

  EvalFlags eval_flags;
  auto* eval_cmd = app.add_subcommand("eval-clean", "Score a dataset without attacking");
  eval_flags.Register(eval_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (attack->parsed()) return RunAttack(attack_flags, attack_out);
    if (sweep->parsed()) return RunSweep(sweep_flags, sweep_vary, sweep_values, sweep_out);
    if (cat_cmd->parsed()) return RunCat(cat_flags);
    if (align->parsed()) return RunAlign(align_flags);
    if (phrases->parsed()) return RunBuildPhrases(phrase_flags);
    if (eval_cmd->parsed()) return RunEvalClean(eval_flags);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return ExitCodeFor(e.kind());
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitConfig;
}

}  // namespace
}  // namespace codemix

int main(int argc, char** argv) { return codemix::Main(argc, argv); }
