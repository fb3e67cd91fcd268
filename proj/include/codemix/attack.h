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

#ifndef CODEMIX_ATTACK_H_
#define CODEMIX_ATTACK_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "codemix/alignment.h"
#include "codemix/corpus.h"
#include "codemix/lexicon.h"
#include "codemix/oracle.h"
#include "codemix/random.h"
#include "codemix/translation.h"
#include "json.hpp"

namespace codemix {

enum class AttackKind { kPolyGloss, kBumblebee, kRandom };

AttackKind ParseAttackKind(std::string_view name);
std::string_view AttackKindName(AttackKind kind);

struct AttackConfig {
  AttackKind kind = AttackKind::kBumblebee;
  std::vector<LanguageTag> embedded_languages;
  std::size_t beam_width = 1;
  bool filter_by_translation = false;
  bool equivalence_constraint = false;
  std::shared_ptr<const TransliterationTable> transliteration;
  bool early_exit = false;
  std::optional<std::size_t> max_queries;
  std::uint64_t seed = 0;      // random baseline only
  double rho_uniform = 0.0;    // random baseline only

  void Validate() const;
};

// One substitution, in segment-local matrix coordinates.
struct Perturbation {
  SegmentRole role = SegmentRole::kPremise;
  Span matrix_span;
  TokenList original;
  TokenList replacement;
  LanguageTag lang = LanguageTag::Parse("en");

  friend bool operator==(const Perturbation& a, const Perturbation& b) {
    return a.role == b.role && a.matrix_span == b.matrix_span &&
           a.original == b.original && a.replacement == b.replacement && a.lang == b.lang;
  }
};

// Global positions run over the attackable segments in order (premise then
// hypothesis, or the question alone).
class PositionMap {
 public:
  explicit PositionMap(const LabeledExample& example);

  struct Slot {
    SegmentRole role;
    std::size_t local;   // index within the segment
    std::size_t offset;  // global index of the segment's first token
  };

  std::size_t size() const { return slots_.size(); }
  const Slot& at(std::size_t global) const { return slots_.at(global); }
  std::size_t OffsetOf(SegmentRole role) const;

 private:
  std::vector<Slot> slots_;
  std::map<SegmentRole, std::size_t> offsets_;
};

// Rewrites the segments of `base` with non-overlapping `applied`
// perturbations; the id, task and label are kept.
LabeledExample ApplyPerturbations(const LabeledExample& base,
                                  const std::vector<Perturbation>& applied);

struct BeamEntry {
  double loss = 0.0;
  LabeledExample candidate;
  std::size_t position = 0;
  std::vector<Perturbation> applied;
  // Global index of the last matrix token covered by a perturbation ->
  // that perturbation's language.
  std::map<std::size_t, LanguageTag> last_lang_at;
  std::uint64_t order = 0;  // insertion sequence, for tie-breaking
};

// False (blocked) iff the token right before the candidate's span was
// produced by a perturbation in the candidate's language and the candidate
// is not monotonic.
bool CheckEquivalence(const BeamEntry& state, std::size_t global_start,
                      const PhrasePair& candidate);

// Proposed substitution at a position, with where the search resumes.
struct Proposal {
  Perturbation perturbation;
  std::size_t next_position = 0;
};

class CandidateSource {
 public:
  virtual ~CandidateSource() = default;
  virtual std::vector<Proposal> At(const BeamEntry& state, std::size_t position) = 0;
};

// Dictionary substitutions for one matrix token per position.
class PolyglossCandidates : public CandidateSource {
 public:
  // `translations` may be null unless filtering is enabled.
  PolyglossCandidates(const LabeledExample& example,
                      const std::map<std::string, BilingualDictionary>& dictionaries,
                      const TranslationView* translations, const AttackConfig& cfg);
  std::vector<Proposal> At(const BeamEntry& state, std::size_t position) override;

 private:
  const LabeledExample& example_;
  const std::map<std::string, BilingualDictionary>& dictionaries_;
  const TranslationView* translations_;
  const AttackConfig& cfg_;
  PositionMap positions_;
};

// Aligned phrase substitutions starting at each position.
class PhraseCandidates : public CandidateSource {
 public:
  PhraseCandidates(const LabeledExample& example, const CandidateTable& table,
                   bool equivalence_constraint);
  std::vector<Proposal> At(const BeamEntry& state, std::size_t position) override;

 private:
  const LabeledExample& example_;
  const CandidateTable& table_;
  bool equivalence_constraint_;
  PositionMap positions_;
};

// Beam frontier ordered by loss (desc), then fewer perturbations, then
// insertion order.
class Beam {
 public:
  explicit Beam(std::size_t width) : width_(width) {}

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::vector<BeamEntry>& entries() const { return entries_; }

  void Insert(BeamEntry entry);
  BeamEntry Poll();
  void Truncate();

 private:
  std::size_t width_;
  std::uint64_t next_order_ = 0;
  std::vector<BeamEntry> entries_;
};

// True when `a` ranks ahead of `b` in the frontier.
bool RanksBefore(const BeamEntry& a, const BeamEntry& b);

// Inserts the scored candidates and the polled entry (as the skip branch),
// then truncates. Entries at or past `num_positions` are retired instead of
// inserted; their number is returned.
std::size_t UpdateBeam(Beam& beam, std::vector<BeamEntry> scored, BeamEntry skip,
                       std::size_t num_positions);

struct Adversary {
  LabeledExample example;
  LossRecord record;
  std::vector<Perturbation> perturbations;
};

enum class AttackStatus { kSucceeded, kFailed, kBudget, kOracleError };

std::string_view AttackStatusName(AttackStatus status);
AttackStatus ParseAttackStatus(std::string_view name);

struct AttackResult {
  std::string id;
  Adversary clean;
  Adversary best;  // highest loss explored
  std::optional<Adversary> best_successful;
  std::optional<Adversary> least_successful;
  std::size_t queries = 0;
  AttackStatus status = AttackStatus::kFailed;
  std::string error;
  std::size_t positions_with_candidates = 0;  // over the clean example

  // The adversary counted for accuracy: best_successful if any, else best.
  const Adversary& reported() const { return best_successful ? *best_successful : best; }
};

// Beam search shared by the two attacks.
AttackResult BeamSearchAttack(const LabeledExample& x, CandidateSource& source,
                              LossOracle& oracle, const AttackConfig& cfg);

// Word-level dictionary attack. `dictionaries` is keyed by embedded code.
AttackResult PolyglossAttack(const LabeledExample& x,
                             const std::map<std::string, BilingualDictionary>& dictionaries,
                             const TranslationView* translations, LossOracle& oracle,
                             const AttackConfig& cfg);

// Phrase-level attack over an aligned candidate table.
AttackResult BumblebeeAttack(const LabeledExample& x, const CandidateTable& table,
                             LossOracle& oracle, const AttackConfig& cfg);

struct RandomPerturbation {
  LabeledExample example;
  std::vector<Perturbation> applied;
};

// Left-to-right scan: at each position with candidates, apply a uniformly
// chosen one with probability `rho`. The stream is derived from (seed, x.id).
RandomPerturbation RandomPerturb(const LabeledExample& x, CandidateSource& source,
                                 double rho, std::uint64_t seed);
// Same, drawing from a caller-owned stream.
RandomPerturbation RandomPerturb(const LabeledExample& x, CandidateSource& source,
                                 double rho, Rng& rng);

// Random baseline as an attack: one query for the clean example and one for
// the perturbed one.
AttackResult RandomAttack(const LabeledExample& x, CandidateSource& source,
                          LossOracle& oracle, const AttackConfig& cfg);

// Adversary JSONL records.
nlohmann::json AttackResultToJson(const AttackResult& result);
AttackResult AttackResultFromJson(const nlohmann::json& j);
std::vector<AttackResult> LoadAttackResults(const std::filesystem::path& path);

}  // namespace codemix

#endif  // CODEMIX_ATTACK_H_
