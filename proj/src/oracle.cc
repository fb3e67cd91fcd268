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

#include "codemix/oracle.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>

#include "codemix/error.h"
#include "codemix/kernels/kernels.h"
#include "codemix/metrics.h"
#include "codemix/text.h"

namespace codemix {

using nlohmann::json;

std::string PredictionToString(const Prediction& prediction) {
  if (const int* label = std::get_if<int>(&prediction)) return std::to_string(*label);
  return std::get<std::string>(prediction);
}

void OracleConfig::Validate() const {
  if (batch_size < 1) throw ConfigError("oracle batch size must be at least 1");
  if (backend == OracleBackend::kRemote && endpoint.empty()) {
    throw ConfigError("remote oracle requires an endpoint (flag or CODEMIX_ORACLE_URL)");
  }
  if (!(success_f1_threshold >= 0.0 && success_f1_threshold <= 1.0)) {
    throw ConfigError("success F1 threshold must lie in [0, 1]");
  }
}

std::string ResolveOracleEndpoint(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("CODEMIX_ORACLE_URL")) return env;
  return "";
}

LossOracle::LossOracle(OracleConfig cfg) : cfg_(std::move(cfg)) { cfg_.Validate(); }

std::vector<LossRecord> LossOracle::Query(std::span<const LabeledExample> candidates) {
  if (candidates.empty()) throw ConfigError("oracle query needs a nonempty batch");
  const TaskKind task = candidates.front().task;
  for (const auto& c : candidates) {
    if (c.task != task) throw ConfigError("oracle batch mixes task kinds");
  }
  std::vector<LossRecord> records;
  records.reserve(candidates.size());
  for (std::size_t start = 0; start < candidates.size(); start += cfg_.batch_size) {
    const auto batch = candidates.subspan(
        start, std::min(cfg_.batch_size, candidates.size() - start));
    queries_.fetch_add(batch.size());
    auto scored = Score(batch);
    if (scored.size() != batch.size()) {
      throw OracleError("oracle returned " + std::to_string(scored.size()) +
                        " records for " + std::to_string(batch.size()) + " candidates");
    }
    for (std::size_t k = 0; k < batch.size(); ++k) {
      if (!(scored[k].loss >= 0.0) || !std::isfinite(scored[k].loss)) {
        throw OracleError("oracle returned an invalid loss");
      }
      Judge(batch[k], scored[k]);
      records.push_back(std::move(scored[k]));
    }
  }
  return records;
}

void LossOracle::Judge(const LabeledExample& example, LossRecord& record) const {
  if (example.task == TaskKind::kClassification) {
    const int* predicted = std::get_if<int>(&record.prediction);
    record.success = predicted == nullptr || *predicted != example.class_label();
    return;
  }
  const auto predicted = PredictionToString(record.prediction);
  if (!record.f1) record.f1 = metrics::TokenF1(predicted, example.answer().text);
  if (!record.exact_match) {
    record.exact_match = metrics::ExactMatch(predicted, example.answer().text);
  }
  record.success = *record.f1 < cfg_.success_f1_threshold;
}

double SoftmaxCrossEntropy(std::span<const double> scores, int gold) {
  const double peak = kernels::Max(scores);
  double total = 0.0;
  for (const double s : scores) total += std::exp(s - peak);
  const double loss = peak + std::log(total) - scores[static_cast<std::size_t>(gold)];
  return loss < 0.0 ? 0.0 : loss;
}

namespace {

std::set<std::string> FoldedSet(const Segment* segment) {
  std::set<std::string> out;
  if (segment == nullptr) return out;
  for (const auto& t : segment->tokens) out.insert(text::FoldCase(t));
  return out;
}

std::pair<std::size_t, std::size_t> OverlapCounts(const LabeledExample& example) {
  const auto premise = FoldedSet(example.Find(SegmentRole::kPremise));
  const auto hypothesis = FoldedSet(example.Find(SegmentRole::kHypothesis));
  std::size_t shared = 0;
  for (const auto& t : hypothesis) shared += premise.count(t);
  return {shared, hypothesis.size()};
}

}  // namespace

double TokenOverlap(const LabeledExample& example) {
  const auto [shared, total] = OverlapCounts(example);
  return total == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(total);
}

int OverlapBucket(const LabeledExample& example, int buckets) {
  const auto [shared, total] = OverlapCounts(example);
  if (total == 0) return 0;
  const auto bucket = static_cast<int>((shared * static_cast<std::size_t>(buckets)) / total);
  return std::min(bucket, buckets - 1);
}

std::vector<double> SurrogateModel::Scores(const LabeledExample& example) const {
  std::vector<double> scores(static_cast<std::size_t>(num_classes), 0.0);
  if (!bias.empty()) scores = bias;
  if (!token_weights.empty()) {
    for (const auto& segment : example.segments) {
      for (const auto& token : segment.tokens) {
        const auto it = token_weights.find(text::FoldCase(token));
        if (it != token_weights.end()) kernels::Axpy(1.0, it->second, scores);
      }
    }
  }
  if (overlap_buckets > 0) {
    const auto bucket = static_cast<std::size_t>(OverlapBucket(example, overlap_buckets));
    kernels::Axpy(1.0, overlap_weights.at(bucket), scores);
  }
  return scores;
}

json SurrogateModel::ToJson() const {
  json j;
  j["num_classes"] = num_classes;
  j["bias"] = bias;
  j["token_weights"] = token_weights;
  j["overlap_buckets"] = overlap_buckets;
  j["overlap_weights"] = overlap_weights;
  return j;
}

SurrogateModel SurrogateModel::FromJson(const json& j) {
  SurrogateModel model;
  try {
    model.num_classes = j.at("num_classes").get<int>();
    model.bias = j.value("bias", std::vector<double>{});
    model.token_weights =
        j.value("token_weights", std::map<std::string, std::vector<double>>{});
    model.overlap_buckets = j.value("overlap_buckets", 0);
    model.overlap_weights =
        j.value("overlap_weights", std::vector<std::vector<double>>{});
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed surrogate model: ") + e.what());
  }
  const auto classes = static_cast<std::size_t>(model.num_classes);
  bool ok = model.num_classes >= 2 && (model.bias.empty() || model.bias.size() == classes);
  for (const auto& [token, w] : model.token_weights) ok &= w.size() == classes;
  ok &= model.overlap_weights.size() == static_cast<std::size_t>(model.overlap_buckets);
  for (const auto& w : model.overlap_weights) ok &= w.size() == classes;
  if (!ok) throw DataError("surrogate model weight shapes do not match num_classes");
  return model;
}

SurrogateModel BuildOverlapSurrogate(const Dataset& train, double smoothing, int buckets) {
  if (train.examples.empty()) throw DataError("cannot fit a surrogate on an empty dataset");
  if (buckets < 1) throw ConfigError("overlap surrogate needs at least one bucket");
  if (!(smoothing > 0.0)) throw ConfigError("surrogate smoothing must be positive");
  constexpr int kClasses = 3;
  std::vector<double> class_count(kClasses, 0.0);
  std::vector<std::vector<double>> joint(static_cast<std::size_t>(buckets),
                                         std::vector<double>(kClasses, 0.0));
  for (const auto& ex : train.examples) {
    if (ex.task != TaskKind::kClassification) {
      throw DataError("overlap surrogate needs a classification dataset");
    }
    const auto c = static_cast<std::size_t>(ex.class_label());
    class_count[c] += 1.0;
    joint[static_cast<std::size_t>(OverlapBucket(ex, buckets))][c] += 1.0;
  }
  const double n = static_cast<double>(train.examples.size());
  SurrogateModel model;
  model.num_classes = kClasses;
  model.overlap_buckets = buckets;
  model.bias.resize(kClasses);
  model.overlap_weights.assign(static_cast<std::size_t>(buckets),
                               std::vector<double>(kClasses, 0.0));
  for (std::size_t c = 0; c < kClasses; ++c) {
    model.bias[c] = std::isinf(smoothing)
                        ? -std::log(static_cast<double>(kClasses))
                        : std::log((class_count[c] + smoothing) / (n + kClasses * smoothing));
    for (std::size_t b = 0; b < static_cast<std::size_t>(buckets); ++b) {
      model.overlap_weights[b][c] =
          std::isinf(smoothing)
              ? -std::log(static_cast<double>(buckets))
              : std::log((joint[b][c] + smoothing) / (class_count[c] + buckets * smoothing));
    }
  }
  return model;
}

SurrogateOracle::SurrogateOracle(SurrogateModel model, OracleConfig cfg)
    : LossOracle(std::move(cfg)), model_(std::move(model)) {
  if (model_.num_classes < 2) throw ConfigError("surrogate needs at least two classes");
}

std::vector<LossRecord> SurrogateOracle::Score(std::span<const LabeledExample> candidates) {
  std::vector<LossRecord> records;
  records.reserve(candidates.size());
  for (const auto& ex : candidates) {
    if (ex.task != TaskKind::kClassification) {
      throw ConfigError("classification surrogate cannot score span QA examples");
    }
    const auto scores = model_.Scores(ex);
    const auto gold = ex.class_label();
    if (gold < 0 || gold >= model_.num_classes) {
      throw DataError("label " + std::to_string(gold) + " outside the surrogate's classes");
    }
    LossRecord record;
    record.loss = SoftmaxCrossEntropy(scores, gold);
    record.prediction = static_cast<int>(kernels::ArgMax(scores));
    records.push_back(std::move(record));
  }
  return records;
}

QaSurrogateOracle::QaSurrogateOracle(OracleConfig cfg, int window, double sharpness)
    : LossOracle(std::move(cfg)), window_(window), sharpness_(sharpness) {}

std::vector<LossRecord> QaSurrogateOracle::Score(std::span<const LabeledExample> candidates) {
  std::vector<LossRecord> records;
  records.reserve(candidates.size());
  for (const auto& ex : candidates) {
    if (ex.task != TaskKind::kSpanQa) {
      throw ConfigError("QA surrogate cannot score classification examples");
    }
    const auto* context = ex.Find(SegmentRole::kContext);
    if (context == nullptr || context->tokens.empty()) {
      throw DataError("example '" + ex.id + "' has an empty context");
    }
    const auto question = FoldedSet(ex.Find(SegmentRole::kQuestion));
    const auto& tokens = context->tokens;
    const std::size_t n = tokens.size();
    std::vector<std::string> folded(n);
    for (std::size_t p = 0; p < n; ++p) folded[p] = text::FoldCase(tokens[p]);

    // Gold start token: the token whose byte range covers char_start.
    std::size_t gold = 0;
    std::size_t cursor = 0;
    const std::size_t answer_start = ex.answer().char_start;
    for (std::size_t p = 0; p < n; ++p) {
      const auto at = context->raw.find(tokens[p], cursor);
      if (at == std::string::npos) break;
      if (at <= answer_start) gold = p;
      cursor = at + tokens[p].size();
    }

    std::vector<double> scores(n, 0.0);
    const auto w = static_cast<std::size_t>(window_);
    for (std::size_t p = 0; p < n; ++p) {
      const std::size_t lo = p >= w ? p - w : 0;
      const std::size_t hi = std::min(n - 1, p + w);
      std::set<std::string_view> hits;
      for (std::size_t q = lo; q <= hi; ++q) {
        if (q != p && question.count(folded[q]) > 0) hits.insert(folded[q]);
      }
      scores[p] = sharpness_ * static_cast<double>(hits.size());
      if (question.count(folded[p]) > 0) scores[p] -= sharpness_;
    }
    LossRecord record;
    record.loss = SoftmaxCrossEntropy(scores, static_cast<int>(gold));
    record.prediction = tokens[kernels::ArgMax(scores)];
    records.push_back(std::move(record));
  }
  return records;
}

json BuildLossRequest(std::span<const LabeledExample> candidates) {
  json examples = json::array();
  for (const auto& ex : candidates) {
    json segments = json::array();
    for (const auto& seg : ex.segments) {
      segments.push_back({{"role", std::string(RoleName(seg.role))}, {"text", seg.raw}});
    }
    json gold;
    if (ex.task == TaskKind::kClassification) {
      gold = {{"label", ex.class_label()}};
    } else {
      gold = {{"text", ex.answer().text}, {"char_start", ex.answer().char_start}};
    }
    examples.push_back({{"segments", std::move(segments)}, {"gold", std::move(gold)}});
  }
  const bool qa = !candidates.empty() && candidates.front().task == TaskKind::kSpanQa;
  return {{"task", qa ? "span_qa" : "classification"}, {"examples", std::move(examples)}};
}

RemoteOracle::RemoteOracle(OracleConfig cfg) : LossOracle(std::move(cfg)) {}

std::vector<LossRecord> RemoteOracle::Score(std::span<const LabeledExample> candidates) {
  const auto response =
      wire::PostJson(config().endpoint, "/v1/loss", BuildLossRequest(candidates),
                     config().retry);
  if (!response.contains("records") || !response["records"].is_array()) {
    throw OracleError("/v1/loss: response lacks a records array");
  }
  std::vector<LossRecord> records;
  for (const auto& r : response["records"]) {
    LossRecord record;
    try {
      record.loss = r.at("loss").get<double>();
      const auto& prediction = r.at("prediction");
      if (prediction.is_number_integer()) {
        record.prediction = prediction.get<int>();
      } else if (prediction.is_string()) {
        record.prediction = prediction.get<std::string>();
      } else {
        throw OracleError("/v1/loss: prediction must be an integer or a string");
      }
      if (r.contains("f1") && r["f1"].is_number()) record.f1 = r["f1"].get<double>();
    } catch (const json::exception& e) {
      throw OracleError(std::string("/v1/loss: malformed record: ") + e.what());
    }
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace codemix
