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

#ifndef CODEMIX_ORACLE_H_
#define CODEMIX_ORACLE_H_

#include <atomic>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "codemix/corpus.h"
#include "codemix/wire.h"
#include "json.hpp"

namespace codemix {

using Prediction = std::variant<int, std::string>;

std::string PredictionToString(const Prediction& prediction);

struct LossRecord {
  double loss = 0.0;
  Prediction prediction = 0;
  bool success = false;        // the model got this candidate wrong
  std::optional<double> f1;    // span QA only
  std::optional<double> exact_match;

  friend bool operator==(const LossRecord&, const LossRecord&) = default;
};

enum class OracleBackend { kSurrogate, kRemote };

struct OracleConfig {
  OracleBackend backend = OracleBackend::kSurrogate;
  std::string endpoint;
  std::size_t batch_size = 64;
  double success_f1_threshold = 0.5;
  wire::RetryPolicy retry;

  // Throws a config error when the fields are inconsistent.
  void Validate() const;
};

// Resolves the remote endpoint: an explicit flag value wins, then
// CODEMIX_ORACLE_URL, then nothing.
std::string ResolveOracleEndpoint(const std::string& flag_value);

// The black-box target model. Thread-safe; the query counter counts one per
// scored candidate.
class LossOracle {
 public:
  explicit LossOracle(OracleConfig cfg);
  virtual ~LossOracle() = default;

  // Scores a nonempty batch of same-task examples against their own labels.
  // Output order matches input order.
  std::vector<LossRecord> Query(std::span<const LabeledExample> candidates);

  std::size_t queries() const { return queries_.load(); }
  const OracleConfig& config() const { return cfg_; }

 protected:
  virtual std::vector<LossRecord> Score(std::span<const LabeledExample> candidates) = 0;
  // Fills success (and F1/EM for QA) from the prediction.
  void Judge(const LabeledExample& example, LossRecord& record) const;

 private:
  OracleConfig cfg_;
  std::atomic<std::size_t> queries_{0};
};

// Linear bag-of-tokens scorer with optional premise/hypothesis overlap
// features: score(c) = bias[c] + Σ_token w[token][c] + w_overlap[bucket][c].
struct SurrogateModel {
  int num_classes = 3;
  std::vector<double> bias;
  std::map<std::string, std::vector<double>> token_weights;  // case-folded tokens
  int overlap_buckets = 0;                                   // 0 disables overlap
  std::vector<std::vector<double>> overlap_weights;          // [bucket][class]

  std::vector<double> Scores(const LabeledExample& example) const;
  nlohmann::json ToJson() const;
  static SurrogateModel FromJson(const nlohmann::json& j);
};

// Share of distinct (case-folded) hypothesis tokens that also occur in the
// premise; 0 when the hypothesis is empty.
double TokenOverlap(const LabeledExample& example);
// floor(overlap * buckets), capped at buckets - 1, computed in integers.
int OverlapBucket(const LabeledExample& example, int buckets);

// Closed-form naive-Bayes fit on overlap buckets with add-`smoothing`
// counts: bias[c] = log P(c), w[b][c] = log P(b | c).
SurrogateModel BuildOverlapSurrogate(const Dataset& train, double smoothing,
                                     int buckets = 10);

// Cross-entropy of softmax(scores) against `gold`.
double SoftmaxCrossEntropy(std::span<const double> scores, int gold);

class SurrogateOracle : public LossOracle {
 public:
  SurrogateOracle(SurrogateModel model, OracleConfig cfg = {});
  const SurrogateModel& model() const { return model_; }

 protected:
  std::vector<LossRecord> Score(std::span<const LabeledExample> candidates) override;

 private:
  SurrogateModel model_;
};

// Span-QA stand-in: each context token is scored by how many distinct
// question tokens fall within a +/- window around it; the prediction is the
// top-scoring token and the loss is the cross-entropy of the start
// distribution at the gold answer's first token.
class QaSurrogateOracle : public LossOracle {
 public:
  explicit QaSurrogateOracle(OracleConfig cfg = {}, int window = 3, double sharpness = 1.0);

 protected:
  std::vector<LossRecord> Score(std::span<const LabeledExample> candidates) override;

 private:
  int window_;
  double sharpness_;
};

// Request body for POST /v1/loss.
nlohmann::json BuildLossRequest(std::span<const LabeledExample> candidates);

class RemoteOracle : public LossOracle {
 public:
  explicit RemoteOracle(OracleConfig cfg);

 protected:
  std::vector<LossRecord> Score(std::span<const LabeledExample> candidates) override;
};

}  // namespace codemix

#endif  // CODEMIX_ORACLE_H_
