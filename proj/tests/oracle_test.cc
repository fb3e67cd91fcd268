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

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <limits>

#include "codemix/error.h"
#include "codemix/metrics.h"
#include "fake_server.h"

namespace codemix {
namespace {

using nlohmann::json;
using ::testing::HasSubstr;

const LanguageTag kEn = LanguageTag::Parse("en");

std::string Fixture(const std::string& name) {
  return ReadFile(std::string(CODEMIX_TEST_DATA) + "/wire/" + name);
}

LabeledExample Nli(const std::string& premise, const std::string& hypothesis, int label,
                   const std::string& id = "x") {
  LabeledExample x;
  x.id = id;
  x.segments = {Segment::FromText(SegmentRole::kPremise, premise, kEn),
                Segment::FromText(SegmentRole::kHypothesis, hypothesis, kEn)};
  x.label = label;
  return x;
}

LabeledExample Qa() {
  return ParseSpanQaJson(R"({"data":[{"paragraphs":[{"context":"The cat sat on the mat.","qas":[
      {"id":"q1","question":"Where did the cat sit?","answers":[{"text":"on the mat","answer_start":12}]}]}]}]})")
      .examples.front();
}

OracleConfig RemoteConfig(const std::string& url) {
  OracleConfig cfg;
  cfg.backend = OracleBackend::kRemote;
  cfg.endpoint = url;
  cfg.retry.initial_backoff = std::chrono::milliseconds(1);
  return cfg;
}

TEST(SurrogateTest, ZeroWeightsGiveLogThree) {
  SurrogateModel model;
  model.num_classes = 3;
  SurrogateOracle oracle(model);
  const std::vector<LabeledExample> batch = {Nli("a b", "c", 0), Nli("x", "y z", 2)};
  for (const auto& r : oracle.Query(batch)) EXPECT_NEAR(r.loss, std::log(3.0), 1e-12);
  EXPECT_EQ(oracle.queries(), 2u);
}

TEST(SurrogateTest, DominantToken) {
  SurrogateModel model;
  model.num_classes = 3;
  model.token_weights["not"] = {10.0, 0.0, 0.0};
  SurrogateOracle oracle(model);
  const std::vector<LabeledExample> batch = {Nli("he is NOT here", "he left", 0)};
  const auto r = oracle.Query(batch).front();
  EXPECT_EQ(std::get<int>(r.prediction), 0);
  EXPECT_FALSE(r.success);
  // softmax(10, 0, 0) at class 0.
  EXPECT_NEAR(r.loss, std::log(1.0 + 2.0 * std::exp(-10.0)), 1e-12);
}

TEST(SurrogateTest, SuccessIffPredictionDiffers) {
  SurrogateModel model;
  model.num_classes = 3;
  model.token_weights["cat"] = {0.0, 0.0, 5.0};
  SurrogateOracle oracle(model);
  const std::vector<LabeledExample> batch = {Nli("cat", "dog", 2), Nli("cat", "dog", 1),
                                             Nli("bird", "dog", 1)};
  const auto records = oracle.Query(batch);
  for (std::size_t k = 0; k < batch.size(); ++k) {
    EXPECT_GE(records[k].loss, 0.0);
    EXPECT_EQ(records[k].success,
              std::get<int>(records[k].prediction) != batch[k].class_label());
  }
}

TEST(SurrogateTest, BatchContract) {
  SurrogateModel model;
  model.num_classes = 3;
  SurrogateOracle oracle(model);
  EXPECT_THROW(oracle.Query({}), Error);
  std::vector<LabeledExample> mixed = {Nli("a", "b", 0), Qa()};
  EXPECT_THROW(oracle.Query(mixed), Error);
}

TEST(SurrogateTest, JsonRoundTrip) {
  SurrogateModel model;
  model.num_classes = 3;
  model.bias = {0.1, 0.2, 0.3};
  model.token_weights["no"] = {1, 2, 3};
  model.overlap_buckets = 2;
  model.overlap_weights = {{0, 0, 1}, {1, 0, 0}};
  const auto again = SurrogateModel::FromJson(model.ToJson());
  EXPECT_EQ(again.bias, model.bias);
  EXPECT_EQ(again.token_weights, model.token_weights);
  EXPECT_EQ(again.overlap_weights, model.overlap_weights);
  auto bad = model.ToJson();
  bad["bias"] = {1.0};
  EXPECT_THROW(SurrogateModel::FromJson(bad), Error);
}

TEST(OverlapTest, Buckets) {
  const auto x = Nli("a b c d", "a b c e f", 0);  // 3 of 5 distinct hypothesis tokens
  EXPECT_DOUBLE_EQ(TokenOverlap(x), 0.6);
  EXPECT_EQ(OverlapBucket(x, 10), 6);
  EXPECT_EQ(OverlapBucket(Nli("a", "a", 0), 10), 9);  // full overlap caps at B-1
  EXPECT_EQ(OverlapBucket(Nli("a", "", 0), 10), 0);
  EXPECT_EQ(OverlapBucket(Nli("A b", "a B", 0), 10), 9);  // case-folded
}

// Four-example toy set worked by hand with smoothing 1 and 10 buckets:
// two entailment pairs at overlap 1.0 (bucket 9), one contradiction at 0.5
// (bucket 5), one neutral at 0.0 (bucket 0).
TEST(OverlapSurrogateTest, HandFit) {
  Dataset train;
  train.examples = {Nli("a b c", "a b", 2, "1"), Nli("d e", "d e", 2, "2"),
                    Nli("f g", "f h", 0, "3"), Nli("i j", "k l", 1, "4")};
  const auto model = BuildOverlapSurrogate(train, 1.0);
  ASSERT_EQ(model.overlap_buckets, 10);
  // bias[c] = log((n_c + 1) / (4 + 3)).
  EXPECT_NEAR(model.bias[2], std::log(3.0 / 7.0), 1e-12);
  EXPECT_NEAR(model.bias[0], std::log(2.0 / 7.0), 1e-12);
  // w[9][entailment] = log((2 + 1) / (2 + 10)); w[9][contradiction] = log(1 / 11).
  EXPECT_NEAR(model.overlap_weights[9][2], std::log(3.0 / 12.0), 1e-12);
  EXPECT_NEAR(model.overlap_weights[9][0], std::log(1.0 / 11.0), 1e-12);

  SurrogateOracle oracle(model);
  const std::vector<LabeledExample> probe = {Nli("p q r s t", "p q r s t", 2),
                                             Nli("u v w x y z", "u v w x y", 2)};
  for (const auto& r : oracle.Query(probe)) EXPECT_EQ(std::get<int>(r.prediction), 2);
}

TEST(OverlapSurrogateTest, InfiniteSmoothingIsUniform) {
  Dataset train;
  train.examples = {Nli("a", "a", 2, "1"), Nli("b", "c", 0, "2")};
  SurrogateOracle oracle(BuildOverlapSurrogate(train, std::numeric_limits<double>::infinity()));
  const std::vector<LabeledExample> probe = {Nli("a", "a", 2), Nli("b", "c", 1)};
  for (const auto& r : oracle.Query(probe)) EXPECT_NEAR(r.loss, std::log(3.0), 1e-12);
}

TEST(OverlapSurrogateTest, SingleClass) {
  Dataset train;
  train.examples = {Nli("a", "a", 1, "1"), Nli("b", "c", 1, "2"), Nli("d e", "d f", 1, "3")};
  SurrogateOracle oracle(BuildOverlapSurrogate(train, 1.0));
  const std::vector<LabeledExample> probe = {Nli("a", "a", 0), Nli("x", "y", 0),
                                             Nli("m n", "m o", 0)};
  for (const auto& r : oracle.Query(probe)) EXPECT_EQ(std::get<int>(r.prediction), 1);
}

TEST(OverlapSurrogateTest, Contract) {
  EXPECT_THROW(BuildOverlapSurrogate({}, 1.0), Error);
  Dataset train;
  train.examples = {Nli("a", "a", 1)};
  EXPECT_THROW(BuildOverlapSurrogate(train, 0.0), Error);
  Dataset qa;
  qa.examples = {Qa()};
  EXPECT_THROW(BuildOverlapSurrogate(qa, 1.0), Error);
}

TEST(QaSurrogateTest, ScoresNearQuestionWords) {
  QaSurrogateOracle oracle;
  const std::vector<LabeledExample> batch = {Qa()};
  const auto r = oracle.Query(batch).front();
  EXPECT_GE(r.loss, 0.0);
  ASSERT_TRUE(r.f1.has_value());
  EXPECT_EQ(r.success, *r.f1 < 0.5);
  EXPECT_EQ(*r.f1, metrics::TokenF1(std::get<std::string>(r.prediction), "on the mat"));
}

TEST(MetricsTest, SquadStyle) {
  EXPECT_EQ(metrics::NormalizeAnswer("The  Cat, sat!"), (std::vector<std::string>{"cat", "sat"}));
  EXPECT_DOUBLE_EQ(metrics::ExactMatch("the mat", "Mat"), 1.0);
  // pred {on, mat} vs gold {mat}: p = 1/2, r = 1.
  EXPECT_DOUBLE_EQ(metrics::TokenF1("on the mat", "the mat"), 2.0 / 3.0);
  // pred {on, mat} vs gold {mat, floor}: p = 1/2, r = 1/2.
  EXPECT_DOUBLE_EQ(metrics::TokenF1("on mat", "mat floor"), 0.5);
  EXPECT_DOUBLE_EQ(metrics::TokenF1("dog", "cat"), 0.0);
}

TEST(SoftmaxTest, CrossEntropy) {
  const std::vector<double> scores = {1.0, 2.0, 3.0};
  const double z = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
  EXPECT_NEAR(SoftmaxCrossEntropy(scores, 0), -std::log(std::exp(1.0) / z), 1e-12);
  const std::vector<double> huge = {1000.0, 0.0};
  EXPECT_NEAR(SoftmaxCrossEntropy(huge, 0), 0.0, 1e-12);
  EXPECT_TRUE(std::isfinite(SoftmaxCrossEntropy(huge, 1)));
}

// ---------------------------------------------------------------------------
// Wire protocol

std::vector<LabeledExample> FixtureBatch() {
  return {Nli("A man is sleeping on the couch .", "A man is resting .", 2, "a"),
          Nli("A man is sleeping on the couch .", "A man 在 resting .", 2, "b")};
}

TEST(WireTest, GoldenClassificationRequest) {
  const auto batch = FixtureBatch();
  EXPECT_EQ(BuildLossRequest(batch), json::parse(Fixture("loss_classification_request.json")));
}

TEST(WireTest, GoldenSpanQaRequest) {
  const std::vector<LabeledExample> batch = {Qa()};
  EXPECT_EQ(BuildLossRequest(batch), json::parse(Fixture("loss_span_qa_request.json")));
}

TEST(WireTest, ReplayClassification) {
  testing::FakeServer server;
  const auto expected = json::parse(Fixture("loss_classification_request.json"));
  server.On("/v1/loss", [&](const json& body) {
    EXPECT_EQ(body, expected);
    return std::make_pair(200, Fixture("loss_classification_response.json"));
  });
  server.Start();
  RemoteOracle oracle(RemoteConfig(server.url()));
  const auto batch = FixtureBatch();
  const auto first = oracle.Query(batch);
  ASSERT_EQ(first.size(), 2u);
  EXPECT_DOUBLE_EQ(first[0].loss, 0.41);
  EXPECT_EQ(std::get<int>(first[0].prediction), 2);
  EXPECT_FALSE(first[0].success);
  EXPECT_TRUE(first[1].success);
  EXPECT_FALSE(first[0].f1.has_value());
  EXPECT_EQ(oracle.Query(batch), first);  // deterministic replay
  EXPECT_EQ(server.requests().size(), 2u);
  EXPECT_EQ(oracle.queries(), 4u);
}

TEST(WireTest, ReplaySpanQa) {
  testing::FakeServer server;
  server.On("/v1/loss", [&](const json&) {
    return std::make_pair(200, Fixture("loss_span_qa_response.json"));
  });
  server.Start();
  RemoteOracle oracle(RemoteConfig(server.url()));
  const std::vector<LabeledExample> batch = {Qa()};
  const auto r = oracle.Query(batch).front();
  EXPECT_EQ(std::get<std::string>(r.prediction), "the mat");
  EXPECT_DOUBLE_EQ(*r.f1, 0.8);  // server F1 is kept
  EXPECT_FALSE(r.success);
  EXPECT_DOUBLE_EQ(*r.exact_match, 0.0);
}

TEST(WireTest, BatchesByCeilingDivision) {
  testing::FakeServer server;
  server.On("/v1/loss", [](const json& body) {
    json records = json::array();
    for (std::size_t k = 0; k < body["examples"].size(); ++k) {
      records.push_back({{"loss", 0.5}, {"prediction", 0}, {"f1", nullptr}});
    }
    return std::make_pair(200, json{{"records", records}}.dump());
  });
  server.Start();
  auto cfg = RemoteConfig(server.url());
  cfg.batch_size = 64;
  RemoteOracle oracle(cfg);
  std::vector<LabeledExample> batch;
  for (int k = 0; k < 130; ++k) batch.push_back(Nli("a", "b", 1, std::to_string(k)));
  EXPECT_EQ(oracle.Query(batch).size(), 130u);
  const auto requests = server.requests();
  ASSERT_EQ(requests.size(), 3u);
  EXPECT_EQ(json::parse(requests[2].body)["examples"].size(), 2u);
  EXPECT_EQ(oracle.queries(), 130u);
}

TEST(WireTest, RetriesServerErrors) {
  testing::FakeServer server;
  int calls = 0;
  server.On("/v1/loss", [&](const json&) {
    if (++calls < 3) return std::make_pair(503, std::string(R"({"error":"warming up"})"));
    return std::make_pair(200, Fixture("loss_classification_response.json"));
  });
  server.Start();
  RemoteOracle oracle(RemoteConfig(server.url()));
  const auto batch = FixtureBatch();
  EXPECT_EQ(oracle.Query(batch).size(), 2u);
  EXPECT_EQ(calls, 3);
}

TEST(WireTest, GivesUpAfterRetries) {
  testing::FakeServer server;
  server.On("/v1/loss", [](const json&) {
    return std::make_pair(500, std::string(R"({"error":"model crashed"})"));
  });
  server.Start();
  RemoteOracle oracle(RemoteConfig(server.url()));
  const auto batch = FixtureBatch();
  try {
    oracle.Query(batch);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kOracle);
    EXPECT_THAT(e.what(), HasSubstr("model crashed"));
  }
  EXPECT_EQ(server.requests().size(), 4u);  // first try + 3 retries
}

TEST(WireTest, ClientErrorNotRetried) {
  testing::FakeServer server;
  server.On("/v1/loss", [](const json&) {
    return std::make_pair(400, Fixture("error_response.json"));
  });
  server.Start();
  RemoteOracle oracle(RemoteConfig(server.url()));
  const auto batch = FixtureBatch();
  EXPECT_THROW(oracle.Query(batch), Error);
  EXPECT_EQ(server.requests().size(), 1u);
}

TEST(WireTest, MalformedAndShortResponses) {
  testing::FakeServer server;
  server.On("/v1/loss", [](const json& body) {
    if (body["examples"].size() == 1) {
      return std::make_pair(200, std::string(R"({"records":[{"loss":-1,"prediction":0}]})"));
    }
    return std::make_pair(200, std::string(R"({"records":[{"loss":0.2,"prediction":0}]})"));
  });
  server.Start();
  RemoteOracle oracle(RemoteConfig(server.url()));
  const auto two = FixtureBatch();
  EXPECT_THROW(oracle.Query(two), Error);  // 1 record for 2 candidates
  const std::vector<LabeledExample> one = {two.front()};
  EXPECT_THROW(oracle.Query(one), Error);  // negative loss
}

TEST(WireTest, UnreachableServer) {
  auto cfg = RemoteConfig("http://127.0.0.1:1");
  cfg.retry.retries = 1;
  RemoteOracle oracle(cfg);
  const auto batch = FixtureBatch();
  try {
    oracle.Query(batch);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kOracle);
  }
}

TEST(ConfigTest, EndpointResolution) {
  ::setenv("CODEMIX_ORACLE_URL", "http://env:1", 1);
  EXPECT_EQ(ResolveOracleEndpoint("http://flag:2"), "http://flag:2");
  EXPECT_EQ(ResolveOracleEndpoint(""), "http://env:1");
  ::unsetenv("CODEMIX_ORACLE_URL");
  EXPECT_EQ(ResolveOracleEndpoint(""), "");
  OracleConfig cfg;
  cfg.backend = OracleBackend::kRemote;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg.endpoint = "http://x";
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.Validate(), Error);
}

}  // namespace
}  // namespace codemix
