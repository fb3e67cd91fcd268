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

#include "codemix/attack.h"

#include <algorithm>
#include <set>

#include "codemix/error.h"
#include "codemix/random.h"
#include "codemix/text.h"

namespace codemix {

using nlohmann::json;

AttackKind ParseAttackKind(std::string_view name) {
  if (name == "polygloss") return AttackKind::kPolyGloss;
  if (name == "bumblebee") return AttackKind::kBumblebee;
  if (name == "random") return AttackKind::kRandom;
  throw ConfigError("unknown attack method '" + std::string(name) +
                    "' (expected polygloss, bumblebee or random)");
}

std::string_view AttackKindName(AttackKind kind) {
  switch (kind) {
    case AttackKind::kPolyGloss: return "polygloss";
    case AttackKind::kBumblebee: return "bumblebee";
    case AttackKind::kRandom: return "random";
  }
  return "bumblebee";
}

void AttackConfig::Validate() const {
  if (beam_width < 1) throw ConfigError("beam width must be at least 1");
  if (kind != AttackKind::kRandom && embedded_languages.empty()) {
    throw ConfigError("at least one embedded language is required");
  }
  if (max_queries && *max_queries < 1) throw ConfigError("query budget must be positive");
  if (!(rho_uniform >= 0.0 && rho_uniform <= 1.0)) {
    throw ConfigError("random perturbation probability must lie in [0, 1]");
  }
}

std::string_view AttackStatusName(AttackStatus status) {
  switch (status) {
    case AttackStatus::kSucceeded: return "succeeded";
    case AttackStatus::kFailed: return "failed";
    case AttackStatus::kBudget: return "budget";
    case AttackStatus::kOracleError: return "oracle_error";
  }
  return "failed";
}

AttackStatus ParseAttackStatus(std::string_view name) {
  if (name == "succeeded") return AttackStatus::kSucceeded;
  if (name == "failed") return AttackStatus::kFailed;
  if (name == "budget") return AttackStatus::kBudget;
  if (name == "oracle_error") return AttackStatus::kOracleError;
  throw DataError("unknown attack status '" + std::string(name) + "'");
}

PositionMap::PositionMap(const LabeledExample& example) {
  for (const auto role : AttackableRoles(example.task)) {
    const auto* seg = example.Find(role);
    if (seg == nullptr) continue;
    const std::size_t offset = slots_.size();
    offsets_[role] = offset;
    for (std::size_t k = 0; k < seg->tokens.size(); ++k) slots_.push_back({role, k, offset});
  }
}

std::size_t PositionMap::OffsetOf(SegmentRole role) const {
  const auto it = offsets_.find(role);
  if (it == offsets_.end()) throw DataError("segment is not attackable");
  return it->second;
}

LabeledExample ApplyPerturbations(const LabeledExample& base,
                                  const std::vector<Perturbation>& applied) {
  LabeledExample out = base;
  for (auto& seg : out.segments) {
    std::vector<const Perturbation*> mine;
    for (const auto& p : applied) {
      if (p.role == seg.role) mine.push_back(&p);
    }
    if (mine.empty()) continue;
    std::sort(mine.begin(), mine.end(), [](const Perturbation* a, const Perturbation* b) {
      return a->matrix_span.start < b->matrix_span.start;
    });
    const auto* original = base.Find(seg.role);
    TokenList tokens;
    std::size_t k = 0;
    for (const auto* p : mine) {
      if (p->matrix_span.start < k || p->matrix_span.end >= original->tokens.size()) {
        throw DataError("overlapping or out-of-range perturbation in '" + base.id + "'");
      }
      for (; k < p->matrix_span.start; ++k) tokens.push_back(original->tokens[k]);
      tokens.insert(tokens.end(), p->replacement.begin(), p->replacement.end());
      k = p->matrix_span.end + 1;
    }
    for (; k < original->tokens.size(); ++k) tokens.push_back(original->tokens[k]);
    seg = Segment::FromTokens(seg.role, std::move(tokens));
  }
  return out;
}

bool CheckEquivalence(const BeamEntry& state, std::size_t global_start,
                      const PhrasePair& candidate) {
  if (global_start == 0) return true;
  const auto it = state.last_lang_at.find(global_start - 1);
  if (it == state.last_lang_at.end()) return true;
  return !(it->second == candidate.embedded_lang && !candidate.monotonic);
}

namespace {

TokenList SliceTokens(const TokenList& tokens, const Span& span) {
  return TokenList(tokens.begin() + static_cast<std::ptrdiff_t>(span.start),
                   tokens.begin() + static_cast<std::ptrdiff_t>(span.end) + 1);
}

bool ContainsSequence(const TokenList& haystack, const TokenList& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  for (std::size_t s = 0; s + needle.size() <= haystack.size(); ++s) {
    bool match = true;
    for (std::size_t k = 0; k < needle.size() && match; ++k) {
      match = haystack[s + k] == needle[k];
    }
    if (match) return true;
  }
  return false;
}

TokenList FoldAll(const TokenList& tokens) {
  TokenList out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(text::FoldCase(t));
  return out;
}

}  // namespace

PolyglossCandidates::PolyglossCandidates(
    const LabeledExample& example, const std::map<std::string, BilingualDictionary>& dictionaries,
    const TranslationView* translations, const AttackConfig& cfg)
    : example_(example),
      dictionaries_(dictionaries),
      translations_(translations),
      cfg_(cfg),
      positions_(example) {
  for (const auto& lang : cfg.embedded_languages) {
    if (dictionaries.count(lang.code()) == 0) {
      throw ConfigError("no dictionary for embedded language " + lang.code());
    }
  }
  if (cfg.filter_by_translation && translations == nullptr) {
    throw DataError("translation filtering needs translations for '" + example.id + "'");
  }
}

std::vector<Proposal> PolyglossCandidates::At(const BeamEntry& /*state*/,
                                              std::size_t position) {
  std::vector<Proposal> proposals;
  const auto& slot = positions_.at(position);
  const auto& token = example_.Find(slot.role)->tokens[slot.local];
  std::set<TokenList> seen;
  for (const auto& lang : cfg_.embedded_languages) {
    const auto& dict = dictionaries_.at(lang.code());
    const TokenList* reference = nullptr;
    TokenList folded_reference;
    if (cfg_.filter_by_translation) {
      const auto role_it = translations_->find(slot.role);
      const Segment* seg = nullptr;
      if (role_it != translations_->end()) {
        const auto lang_it = role_it->second.find(lang.code());
        if (lang_it != role_it->second.end()) seg = &lang_it->second;
      }
      if (seg == nullptr) {
        throw DataError("missing translation (" + example_.id + ", " +
                        std::string(RoleName(slot.role)) + ", " + lang.code() + ")");
      }
      folded_reference = FoldAll(seg->tokens);
      reference = &folded_reference;
    }
    for (const auto& target : dict.Lookup(token)) {
      auto target_tokens = Tokenize(target, lang);
      if (target_tokens.empty()) continue;
      if (reference != nullptr && !ContainsSequence(*reference, FoldAll(target_tokens))) {
        continue;
      }
      if (cfg_.transliteration) {
        if (auto latin = cfg_.transliteration->Transliterate(target)) {
          target_tokens = Tokenize(*latin, lang);
        }
      }
      if (target_tokens.size() == 1 && target_tokens.front() == token) continue;
      if (!seen.insert(target_tokens).second) continue;
      Proposal proposal;
      proposal.perturbation.role = slot.role;
      proposal.perturbation.matrix_span = {slot.local, slot.local};
      proposal.perturbation.original = {token};
      proposal.perturbation.replacement = std::move(target_tokens);
      proposal.perturbation.lang = lang;
      proposal.next_position = position + 1;
      proposals.push_back(std::move(proposal));
    }
  }
  return proposals;
}

PhraseCandidates::PhraseCandidates(const LabeledExample& example, const CandidateTable& table,
                                   bool equivalence_constraint)
    : example_(example),
      table_(table),
      equivalence_constraint_(equivalence_constraint),
      positions_(example) {
  if (table.positions() != positions_.size()) {
    throw DataError("candidate table for '" + example.id + "' covers " +
                    std::to_string(table.positions()) + " positions, example has " +
                    std::to_string(positions_.size()));
  }
}

std::vector<Proposal> PhraseCandidates::At(const BeamEntry& state, std::size_t position) {
  std::vector<Proposal> proposals;
  std::set<std::pair<Span, TokenList>> seen;
  for (const auto& entry : table_.at(position)) {
    const auto& pair = entry.pair;
    if (equivalence_constraint_ && !CheckEquivalence(state, position, pair)) continue;
    const auto* seg = example_.Find(entry.role);
    if (seg == nullptr || pair.matrix_span.end >= seg->tokens.size()) continue;
    auto original = SliceTokens(seg->tokens, pair.matrix_span);
    if (original == pair.embedded_text || pair.embedded_text.empty()) continue;
    if (!seen.insert({pair.matrix_span, pair.embedded_text}).second) continue;
    Proposal proposal;
    proposal.perturbation.role = entry.role;
    proposal.perturbation.matrix_span = pair.matrix_span;
    proposal.perturbation.original = std::move(original);
    proposal.perturbation.replacement = pair.embedded_text;
    proposal.perturbation.lang = pair.embedded_lang;
    proposal.next_position = position + pair.matrix_span.length();
    proposals.push_back(std::move(proposal));
  }
  return proposals;
}

bool RanksBefore(const BeamEntry& a, const BeamEntry& b) {
  if (a.loss != b.loss) return a.loss > b.loss;
  if (a.applied.size() != b.applied.size()) return a.applied.size() < b.applied.size();
  return a.order < b.order;
}

void Beam::Insert(BeamEntry entry) {
  entry.order = next_order_++;
  entries_.push_back(std::move(entry));
}

BeamEntry Beam::Poll() {
  const auto best = std::min_element(entries_.begin(), entries_.end(), RanksBefore);
  BeamEntry out = std::move(*best);
  entries_.erase(best);
  return out;
}

void Beam::Truncate() {
  std::stable_sort(entries_.begin(), entries_.end(), RanksBefore);
  if (entries_.size() > width_) entries_.resize(width_);
}

std::size_t UpdateBeam(Beam& beam, std::vector<BeamEntry> scored, BeamEntry skip,
                       std::size_t num_positions) {
  std::size_t retired = 0;
  scored.push_back(std::move(skip));
  for (auto& entry : scored) {
    if (entry.position >= num_positions) {
      ++retired;
      continue;
    }
    beam.Insert(std::move(entry));
  }
  beam.Truncate();
  return retired;
}

namespace {

// Keeps the highest-loss explored adversary and the highest/lowest-loss
// successful ones.
class ResultTracker {
 public:
  void Consider(const LabeledExample& candidate, const LossRecord& record,
                const std::vector<Perturbation>& applied) {
    const auto better = [&](const std::optional<Adversary>& current, bool want_high) {
      if (!current) return true;
      if (record.loss != current->record.loss) {
        return want_high ? record.loss > current->record.loss
                         : record.loss < current->record.loss;
      }
      return applied.size() < current->perturbations.size();
    };
    if (better(best_, true)) best_ = Adversary{candidate, record, applied};
    if (record.success) {
      if (better(best_successful_, true)) {
        best_successful_ = Adversary{candidate, record, applied};
      }
      if (better(least_successful_, false)) {
        least_successful_ = Adversary{candidate, record, applied};
      }
    }
  }

  void Finish(AttackResult* result) {
    result->best = std::move(*best_);
    result->best_successful = std::move(best_successful_);
    result->least_successful = std::move(least_successful_);
  }

  bool any_success() const { return best_successful_.has_value(); }

 private:
  std::optional<Adversary> best_;
  std::optional<Adversary> best_successful_;
  std::optional<Adversary> least_successful_;
};

// Oracle access with the per-attack budget applied.
class BudgetedOracle {
 public:
  BudgetedOracle(LossOracle& oracle, std::optional<std::size_t> budget)
      : oracle_(oracle), budget_(budget) {}

  std::size_t remaining() const {
    return budget_ ? (*budget_ > used_ ? *budget_ - used_ : 0) : SIZE_MAX;
  }
  std::vector<LossRecord> Query(std::span<const LabeledExample> batch) {
    used_ += batch.size();
    return oracle_.Query(batch);
  }
  std::size_t used() const { return used_; }

 private:
  LossOracle& oracle_;
  std::optional<std::size_t> budget_;
  std::size_t used_ = 0;
};

std::size_t CountPositionsWithCandidates(CandidateSource& source, const BeamEntry& clean,
                                         std::size_t positions) {
  std::size_t count = 0;
  for (std::size_t p = 0; p < positions; ++p) count += source.At(clean, p).empty() ? 0 : 1;
  return count;
}

}  // namespace

AttackResult BeamSearchAttack(const LabeledExample& x, CandidateSource& source,
                              LossOracle& oracle, const AttackConfig& cfg) {
  cfg.Validate();
  AttackResult result;
  result.id = x.id;
  const PositionMap positions(x);
  const std::size_t num_positions = positions.size();
  BudgetedOracle budgeted(oracle, cfg.max_queries);
  ResultTracker tracker;
  bool budget_hit = false;

  try {
    const auto clean_record = budgeted.Query({&x, 1}).front();
    result.clean = Adversary{x, clean_record, {}};
    tracker.Consider(x, clean_record, {});

    Beam beam(cfg.beam_width);
    BeamEntry root;
    root.loss = clean_record.loss;
    root.candidate = x;
    result.positions_with_candidates = CountPositionsWithCandidates(source, root, num_positions);
    if (num_positions > 0) beam.Insert(std::move(root));

    bool stop = cfg.early_exit && clean_record.success;
    while (!stop && !beam.empty()) {
      BeamEntry polled = beam.Poll();
      auto proposals = source.At(polled, polled.position);
      if (proposals.size() > budgeted.remaining()) {
        proposals.resize(budgeted.remaining());
        budget_hit = true;
      }

      std::vector<BeamEntry> scored;
      if (!proposals.empty()) {
        std::vector<LabeledExample> batch;
        std::vector<std::vector<Perturbation>> applied_lists;
        batch.reserve(proposals.size());
        for (const auto& proposal : proposals) {
          auto applied = polled.applied;
          applied.push_back(proposal.perturbation);
          batch.push_back(ApplyPerturbations(x, applied));
          applied_lists.push_back(std::move(applied));
        }
        const auto records = budgeted.Query(batch);
        for (std::size_t k = 0; k < proposals.size(); ++k) {
          tracker.Consider(batch[k], records[k], applied_lists[k]);
          stop |= cfg.early_exit && records[k].success;
          BeamEntry entry;
          entry.loss = records[k].loss;
          entry.candidate = std::move(batch[k]);
          entry.position = proposals[k].next_position;
          entry.applied = std::move(applied_lists[k]);
          entry.last_lang_at = polled.last_lang_at;
          const auto& p = proposals[k].perturbation;
          entry.last_lang_at.insert_or_assign(
              positions.OffsetOf(p.role) + p.matrix_span.end, p.lang);
          scored.push_back(std::move(entry));
        }
      }
      if (budget_hit) break;
      polled.position += 1;
      UpdateBeam(beam, std::move(scored), std::move(polled), num_positions);
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kOracle) throw;
    result.queries = budgeted.used();
    result.status = AttackStatus::kOracleError;
    result.error = e.what();
    if (result.clean.example.id.empty()) {
      result.clean.example = x;
      result.best = result.clean;
    } else {
      tracker.Finish(&result);
    }
    return result;
  }

  tracker.Finish(&result);
  result.queries = budgeted.used();
  if (tracker.any_success()) {
    result.status = AttackStatus::kSucceeded;
  } else if (budget_hit) {
    result.status = AttackStatus::kBudget;
  } else {
    result.status = AttackStatus::kFailed;
  }
  return result;
}

AttackResult PolyglossAttack(const LabeledExample& x,
                             const std::map<std::string, BilingualDictionary>& dictionaries,
                             const TranslationView* translations, LossOracle& oracle,
                             const AttackConfig& cfg) {
  PolyglossCandidates source(x, dictionaries, translations, cfg);
  return BeamSearchAttack(x, source, oracle, cfg);
}

AttackResult BumblebeeAttack(const LabeledExample& x, const CandidateTable& table,
                             LossOracle& oracle, const AttackConfig& cfg) {
  PhraseCandidates source(x, table, cfg.equivalence_constraint);
  return BeamSearchAttack(x, source, oracle, cfg);
}

RandomPerturbation RandomPerturb(const LabeledExample& x, CandidateSource& source, double rho,
                                 std::uint64_t seed) {
  Rng rng = Rng::ForKey(seed, x.id);
  return RandomPerturb(x, source, rho, rng);
}

RandomPerturbation RandomPerturb(const LabeledExample& x, CandidateSource& source, double rho,
                                 Rng& rng) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw ConfigError("random perturbation probability must lie in [0, 1]");
  }
  const PositionMap positions(x);
  BeamEntry state;
  state.candidate = x;
  std::size_t position = 0;
  while (position < positions.size()) {
    auto proposals = source.At(state, position);
    if (proposals.empty() || !rng.Bernoulli(rho)) {
      ++position;
      continue;
    }
    auto& chosen = proposals[rng.UniformIndex(proposals.size())];
    const auto& p = chosen.perturbation;
    state.last_lang_at.insert_or_assign(positions.OffsetOf(p.role) + p.matrix_span.end, p.lang);
    state.applied.push_back(std::move(chosen.perturbation));
    position = chosen.next_position;
  }
  return {ApplyPerturbations(x, state.applied), std::move(state.applied)};
}

AttackResult RandomAttack(const LabeledExample& x, CandidateSource& source, LossOracle& oracle,
                          const AttackConfig& cfg) {
  cfg.Validate();
  AttackResult result;
  result.id = x.id;
  auto perturbed = RandomPerturb(x, source, cfg.rho_uniform, cfg.seed);
  BeamEntry clean_state;
  clean_state.candidate = x;
  result.positions_with_candidates =
      CountPositionsWithCandidates(source, clean_state, PositionMap(x).size());
  const std::vector<LabeledExample> batch = {x, perturbed.example};
  try {
    const auto records = oracle.Query(batch);
    result.queries = batch.size();
    result.clean = Adversary{x, records[0], {}};
    result.best = Adversary{perturbed.example, records[1], perturbed.applied};
    if (records[1].success) {
      result.best_successful = result.best;
      result.least_successful = result.best;
      result.status = AttackStatus::kSucceeded;
    } else if (records[0].success) {
      result.best_successful = result.clean;
      result.least_successful = result.clean;
      result.status = AttackStatus::kSucceeded;
    } else {
      result.status = AttackStatus::kFailed;
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kOracle) throw;
    result.queries = batch.size();
    result.status = AttackStatus::kOracleError;
    result.error = e.what();
    result.clean.example = x;
    result.best = result.clean;
  }
  return result;
}

namespace {

json PredictionJson(const Prediction& prediction) {
  if (const int* label = std::get_if<int>(&prediction)) return *label;
  return std::get<std::string>(prediction);
}

json AdversaryJson(const Adversary& adversary, bool with_perturbations) {
  json segments = json::array();
  for (const auto& seg : adversary.example.segments) {
    segments.push_back({{"role", std::string(RoleName(seg.role))}, {"text", seg.raw}});
  }
  json j = {{"segments", std::move(segments)},
            {"loss", adversary.record.loss},
            {"prediction", PredictionJson(adversary.record.prediction)},
            {"success", adversary.record.success}};
  if (adversary.record.f1) j["f1"] = *adversary.record.f1;
  if (with_perturbations) {
    json perturbations = json::array();
    for (const auto& p : adversary.perturbations) {
      perturbations.push_back({{"role", std::string(RoleName(p.role))},
                               {"span", {p.matrix_span.start, p.matrix_span.end}},
                               {"original", Detokenize(p.original)},
                               {"replacement", Detokenize(p.replacement)},
                               {"lang", p.lang.code()}});
    }
    j["perturbations"] = std::move(perturbations);
  }
  return j;
}

Adversary AdversaryFromJson(const json& j, const std::string& id) {
  Adversary adversary;
  adversary.example.id = id;
  for (const auto& seg : j.at("segments")) {
    const auto role = ParseRole(seg.at("role").get<std::string>());
    adversary.example.segments.push_back(
        Segment::FromText(role, seg.at("text").get<std::string>(), LanguageTag::Parse("en")));
  }
  adversary.record.loss = j.at("loss").get<double>();
  const auto& prediction = j.at("prediction");
  if (prediction.is_string()) {
    adversary.record.prediction = prediction.get<std::string>();
  } else {
    adversary.record.prediction = prediction.get<int>();
  }
  adversary.record.success = j.value("success", false);
  if (j.contains("f1")) adversary.record.f1 = j["f1"].get<double>();
  for (const auto& p : j.value("perturbations", json::array())) {
    Perturbation perturbation;
    perturbation.role = ParseRole(p.at("role").get<std::string>());
    perturbation.matrix_span = {p.at("span")[0].get<std::size_t>(),
                                p.at("span")[1].get<std::size_t>()};
    perturbation.lang = LanguageTag::Parse(p.at("lang").get<std::string>());
    perturbation.original = Tokenize(p.at("original").get<std::string>(), perturbation.lang);
    perturbation.replacement =
        Tokenize(p.at("replacement").get<std::string>(), perturbation.lang);
    adversary.perturbations.push_back(std::move(perturbation));
  }
  return adversary;
}

}  // namespace

json AttackResultToJson(const AttackResult& result) {
  json j = {{"id", result.id},
            {"status", std::string(AttackStatusName(result.status))},
            {"clean", AdversaryJson(result.clean, false)},
            {"best", AdversaryJson(result.best, true)},
            {"queries", result.queries},
            {"positions_with_candidates", result.positions_with_candidates}};
  j["best_successful"] =
      result.best_successful ? AdversaryJson(*result.best_successful, true) : json(nullptr);
  j["least_successful"] =
      result.least_successful ? AdversaryJson(*result.least_successful, true) : json(nullptr);
  if (!result.error.empty()) j["error"] = result.error;
  return j;
}

AttackResult AttackResultFromJson(const json& j) {
  AttackResult result;
  try {
    result.id = j.at("id").get<std::string>();
    result.status = ParseAttackStatus(j.at("status").get<std::string>());
    result.queries = j.value("queries", std::size_t{0});
    result.positions_with_candidates = j.value("positions_with_candidates", std::size_t{0});
    result.clean = AdversaryFromJson(j.at("clean"), result.id);
    if (j.contains("best") && !j["best"].is_null()) {
      result.best = AdversaryFromJson(j["best"], result.id);
    }
    if (j.contains("best_successful") && !j["best_successful"].is_null()) {
      result.best_successful = AdversaryFromJson(j["best_successful"], result.id);
    }
    if (j.contains("least_successful") && !j["least_successful"].is_null()) {
      result.least_successful = AdversaryFromJson(j["least_successful"], result.id);
    }
    result.error = j.value("error", std::string());
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed adversary record: ") + e.what());
  }
  return result;
}

std::vector<AttackResult> LoadAttackResults(const std::filesystem::path& path) {
  std::vector<AttackResult> results;
  std::size_t line_no = 0;
  for (const auto& line : text::SplitOn(ReadFile(path), '\n')) {
    ++line_no;
    if (text::Trim(line).empty()) continue;
    try {
      results.push_back(AttackResultFromJson(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return results;
}

}  // namespace codemix
