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

#include "codemix/alignment.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "codemix/error.h"
#include "fake_server.h"
#include "oracles.h"

namespace codemix {
namespace {

using testing::BruteForcePair;
using testing::BruteForcePhrases;
using testing::Flatten;
using testing::Links;

const LanguageTag kFr = LanguageTag::Parse("fr");
const LanguageTag kDe = LanguageTag::Parse("de");

// Straightforward EM with string-keyed maps, no kernels.
std::map<std::pair<std::string, std::string>, double> ReferenceIbm1(const Bitext& bitext,
                                                                    int iterations) {
  std::map<std::string, std::set<std::string>> cooc;
  for (const auto& [s, t] : bitext) {
    for (const auto& e : s) cooc[e].insert(t.begin(), t.end());
  }
  std::map<std::pair<std::string, std::string>, double> p;
  for (const auto& [e, fs] : cooc) {
    for (const auto& f : fs) p[{e, f}] = 1.0 / static_cast<double>(fs.size());
  }
  for (int it = 0; it < iterations; ++it) {
    std::map<std::pair<std::string, std::string>, double> count;
    std::map<std::string, double> total;
    for (const auto& [s, t] : bitext) {
      for (const auto& f : t) {
        double z = 0.0;
        for (const auto& e : s) z += p[{e, f}];
        for (const auto& e : s) {
          const double c = p[{e, f}] / z;
          count[{e, f}] += c;
          total[e] += c;
        }
      }
    }
    for (auto& [key, value] : p) value = count[key] / total[key.first];
  }
  return p;
}

TEST(Ibm1Test, SingleCooccurrence) {
  const auto table = TrainIbm1({{{"a"}, {"x"}}}, 1);
  EXPECT_DOUBLE_EQ(table.Get("a", "x"), 1.0);
}

TEST(Ibm1Test, HandWorkedExample) {
  const Bitext bitext = {{{"a"}, {"x"}}, {{"a", "b"}, {"x", "y"}}};
  const auto table = TrainIbm1(bitext, 5);
  EXPECT_GT(table.Get("a", "x"), table.Get("a", "y"));
  // After one iteration: counts for a are x: 1 + 1/2, y: 1/2, so p(x|a) = 3/4.
  EXPECT_NEAR(TrainIbm1(bitext, 1).Get("a", "x"), 0.75, 1e-15);
  EXPECT_NEAR(TrainIbm1(bitext, 1).Get("b", "y"), 0.5, 1e-15);
}

TEST(Ibm1Test, MatchesReferenceEm) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Bitext bitext;
    const int pairs = 3 + static_cast<int>(rng() % 6);
    for (int p = 0; p < pairs; ++p) {
      TokenList s, t;
      const auto ls = 1 + rng() % 5, lt = 1 + rng() % 5;
      for (std::size_t i = 0; i < ls; ++i) s.push_back("s" + std::to_string(rng() % 6));
      for (std::size_t i = 0; i < lt; ++i) t.push_back("t" + std::to_string(rng() % 6));
      bitext.emplace_back(s, t);
    }
    const int iters = 1 + trial % 5;
    const auto table = TrainIbm1(bitext, iters);
    const auto ref = ReferenceIbm1(bitext, iters);
    for (const auto& [key, value] : ref) {
      EXPECT_NEAR(table.Get(key.first, key.second), value, 1e-12);
    }
  }
}

TEST(Ibm1Test, RowsStayNormalized) {
  const Bitext bitext = {{{"the", "cat"}, {"le", "chat"}},
                         {{"the", "dog"}, {"le", "chien"}},
                         {{"a", "cat"}, {"un", "chat"}}};
  for (int iters = 1; iters <= 6; ++iters) {
    const auto table = TrainIbm1(bitext, iters);
    for (const auto& [source, row] : table.rows()) {
      EXPECT_NEAR(table.RowSum(source), 1.0, 1e-12) << source << " @" << iters;
    }
  }
}

TEST(Ibm1Test, Contract) {
  EXPECT_THROW(TrainIbm1({{{"a"}, {"x"}}}, 0), Error);
  EXPECT_THROW(TrainIbm1({}, 5), Error);
  Ibm1Stats stats;
  TrainIbm1({{{"a"}, {"x"}}, {{}, {"y"}}}, 1, &stats);
  EXPECT_EQ(stats.skipped_pairs, 1u);
}

TEST(AlignPairTest, Identity) {
  TranslationProbTable t;
  t.Set("a", "x", 1.0);
  EXPECT_EQ(AlignPair({"a"}, {"x"}, t, AlignMethod::kMatch).links, (Links{{0, 0}}));
  EXPECT_EQ(AlignPair({"a"}, {"x"}, t, AlignMethod::kIntersect).links, (Links{{0, 0}}));
}

TEST(AlignPairTest, AllZero) {
  const TranslationProbTable t;
  EXPECT_TRUE(AlignPair({"a", "b"}, {"x", "y"}, t, AlignMethod::kMatch).links.empty());
  EXPECT_TRUE(AlignPair({"a", "b"}, {"x", "y"}, t, AlignMethod::kIntersect).links.empty());
}

TEST(MatchingTest, TwoByTwoEnumeration) {
  const std::vector<double> w = {0.9, 0.1, 0.1, 0.9};
  // The two perfect matchings weigh 1.8 (diagonal) and 0.2 (anti-diagonal).
  EXPECT_EQ(MaxWeightMatching(w, 2, 2).links, (Links{{0, 0}, {1, 1}}));
  const std::vector<double> anti = {0.1, 0.9, 0.9, 0.1};
  EXPECT_EQ(MaxWeightMatching(anti, 2, 2).links, (Links{{0, 1}, {1, 0}}));
}

double Weight(const std::vector<double>& w, std::size_t cols, const Links& links) {
  double s = 0.0;
  for (const auto& [i, j] : links) s += w[i * cols + j];
  return s;
}

// Best total weight over every partial injection rows -> cols.
double BruteForceMatching(const std::vector<double>& w, std::size_t rows, std::size_t cols,
                          std::size_t i, std::vector<bool>& used) {
  if (i == rows) return 0.0;
  double best = BruteForceMatching(w, rows, cols, i + 1, used);
  for (std::size_t j = 0; j < cols; ++j) {
    if (used[j]) continue;
    used[j] = true;
    best = std::max(best, w[i * cols + j] + BruteForceMatching(w, rows, cols, i + 1, used));
    used[j] = false;
  }
  return best;
}

TEST(MatchingTest, HungarianMatchesBruteForce) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = 1 + rng() % 6, cols = 1 + rng() % 6;
    std::vector<double> w(rows * cols);
    for (auto& x : w) x = rng() % 4 == 0 ? 0.0 : dist(rng);
    const auto links = MaxWeightMatching(w, rows, cols).links;
    std::vector<bool> used(cols, false);
    EXPECT_NEAR(Weight(w, cols, links), BruteForceMatching(w, rows, cols, 0, used), 1e-12);
    std::set<std::size_t> seen_i, seen_j;
    for (const auto& [i, j] : links) {
      EXPECT_TRUE(seen_i.insert(i).second);
      EXPECT_TRUE(seen_j.insert(j).second);
      EXPECT_GT(w[i * cols + j], 0.0);
    }
  }
}

TEST(MatchingTest, GreedyIsOneToOne) {
  const std::vector<double> w = {0.5, 0.4, 0.45, 0.0};
  EXPECT_EQ(GreedyMatching(w, 2, 2).links, (Links{{0, 0}}));
}

TEST(MatchingTest, LongSentencesUseGreedy) {
  TokenList a, b;
  TranslationProbTable t;
  for (std::size_t i = 0; i < kExactMatchingLimit + 1; ++i) {
    a.push_back("w" + std::to_string(i));
    b.push_back("v" + std::to_string(i));
    t.Set(a.back(), b.back(), 1.0);
  }
  const auto links = AlignPair(a, b, t, AlignMethod::kMatch);
  EXPECT_EQ(links.solver, AlignmentLinks::Solver::kGreedy);
  EXPECT_EQ(links.links.size(), a.size());
  a.pop_back();
  b.pop_back();
  EXPECT_EQ(AlignPair(a, b, t, AlignMethod::kMatch).solver, AlignmentLinks::Solver::kExact);
}

TEST(IntersectTest, MutualArgmax) {
  // Row 0 prefers column 0, column 0 prefers row 1 -> no link for row 0.
  const std::vector<double> w = {0.6, 0.4, 0.7, 0.8};
  EXPECT_EQ(IntersectArgmax(w, 2, 2).links, (Links{{1, 1}}));
}

TEST(PharaohTest, RoundTripAndErrors) {
  AlignmentLinks links;
  links.links = {{0, 0}, {1, 2}, {2, 1}};
  EXPECT_EQ(FormatPharaoh(links), "0-0 1-2 2-1");
  EXPECT_EQ(ParsePharaoh("2-1 0-0 1-2  "), links);
  EXPECT_TRUE(ParsePharaoh("").links.empty());
  EXPECT_THROW(ParsePharaoh("1--2"), Error);
  EXPECT_THROW(ParsePharaoh("a-b"), Error);
  EXPECT_THROW(ParsePharaoh("3"), Error);
}

// ---------------------------------------------------------------------------
// Phrase extraction

TokenList Words(std::size_t n, const std::string& prefix) {
  TokenList out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

TEST(PhraseTest, Diagonal) {
  AlignmentLinks links;
  links.links = {{0, 0}, {1, 1}};
  const auto pairs = ExtractPhrasePairs(links, {"the", "cat"}, {"le", "chat"}, 4, kFr);
  const std::vector<BruteForcePair> expected = {
      {0, 0, 0, 0, true}, {0, 1, 0, 1, true}, {1, 1, 1, 1, true}};
  EXPECT_EQ(Flatten(pairs), expected);
  EXPECT_EQ(pairs[1].embedded_text, (TokenList{"le", "chat"}));
}

TEST(PhraseTest, Crossing) {
  AlignmentLinks links;
  links.links = {{0, 1}, {1, 0}};
  const auto pairs = ExtractPhrasePairs(links, {"a", "b"}, {"x", "y"}, 4, kFr);
  // The single-word pairs are consistent too; only the full span reorders.
  const auto full = std::find_if(pairs.begin(), pairs.end(), [](const PhrasePair& p) {
    return p.matrix_span.length() == 2;
  });
  ASSERT_NE(full, pairs.end());
  EXPECT_FALSE(full->monotonic);
  EXPECT_EQ(Flatten(pairs), BruteForcePhrases(links.links, 2, 2, 4));
}

TEST(PhraseTest, EmptyLinks) {
  EXPECT_TRUE(ExtractPhrasePairs({}, {"a"}, {"x"}, 4).empty());
  EXPECT_THROW(ExtractPhrasePairs({}, {"a"}, {"x"}, 0), Error);
}

TEST(PhraseTest, MatchesBruteForce) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + rng() % 8, n = 1 + rng() % 8;
    AlignmentLinks links;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (rng() % 5 == 0) links.links.emplace_back(i, j);
      }
    }
    const std::size_t max_len = 1 + rng() % 5;
    auto got = Flatten(ExtractPhrasePairs(links, Words(m, "m"), Words(n, "e"), max_len));
    auto want = BruteForcePhrases(links.links, m, n, max_len);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    EXPECT_EQ(got, want) << "trial " << trial;
  }
}

// ---------------------------------------------------------------------------
// Candidate tables

LabeledExample Nli(const std::string& premise, const std::string& hypothesis) {
  LabeledExample x;
  x.id = "x";
  x.segments = {Segment::FromText(SegmentRole::kPremise, premise, x.matrix_language),
                Segment::FromText(SegmentRole::kHypothesis, hypothesis, x.matrix_language)};
  x.label = 2;
  return x;
}

// Aligns token i to token i.
class DiagonalAligner : public Aligner {
 public:
  AlignmentLinks Align(const TokenList& a, const TokenList& b, const LanguageTag&) override {
    AlignmentLinks out;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) out.links.emplace_back(i, i);
    return out;
  }
};

TranslationView ViewFor(const LabeledExample& x, const std::string& lang,
                        const std::string& premise, const std::string& hypothesis) {
  const auto tag = LanguageTag::Parse(lang);
  TranslationView view;
  view[SegmentRole::kPremise].emplace(
      lang, Segment::FromText(SegmentRole::kPremise, premise, tag));
  view[SegmentRole::kHypothesis].emplace(
      lang, Segment::FromText(SegmentRole::kHypothesis, hypothesis, tag));
  (void)x;
  return view;
}

TEST(CandidateTableTest, IdentityHasUnitPairs) {
  const auto x = Nli("the cat sat", "a cat");
  DiagonalAligner aligner;
  const auto view = ViewFor(x, "fr", "the cat sat", "a cat");
  const auto table = BuildCandidateTable(x, view, {kFr}, aligner);
  ASSERT_EQ(table.positions(), 5u);
  for (std::size_t p = 0; p < 5; ++p) {
    const auto& entries = table.at(p);
    EXPECT_TRUE(std::any_of(entries.begin(), entries.end(), [](const TableEntry& e) {
      return e.pair.matrix_span.length() == 1;
    })) << p;
  }
  EXPECT_EQ(table.at(3).front().role, SegmentRole::kHypothesis);
  EXPECT_EQ(table.at(3).front().pair.matrix_span.start, 0u);  // segment-local
}

TEST(CandidateTableTest, TwoLanguagesIsUnion) {
  const auto x = Nli("the cat sat", "a cat");
  DiagonalAligner aligner;
  auto view = ViewFor(x, "fr", "le chat assis", "un chat");
  for (auto& [role, by_lang] : ViewFor(x, "de", "die Katze saß", "eine Katze")) {
    for (auto& [lang, seg] : by_lang) view[role].emplace(lang, seg);
  }
  const auto fr = BuildCandidateTable(x, view, {kFr}, aligner);
  const auto de = BuildCandidateTable(x, view, {kDe}, aligner);
  const auto both = BuildCandidateTable(x, view, {kFr, kDe}, aligner);
  EXPECT_EQ(both.total(), fr.total() + de.total());
  EXPECT_EQ(both.RestrictTo({kFr}).total(), fr.total());
}

TEST(CandidateTableTest, SpanLengthBounded) {
  const std::string ten = "a b c d e f g h i j";
  const auto x = Nli(ten, "k");
  DiagonalAligner aligner;
  const auto view = ViewFor(x, "fr", ten, "k");
  CandidateTableConfig cfg;
  cfg.max_phrase_len = 4;
  const auto table = BuildCandidateTable(x, view, {kFr}, aligner, cfg);
  for (std::size_t p = 0; p < table.positions(); ++p) {
    for (const auto& e : table.at(p)) {
      EXPECT_LE(e.pair.matrix_span.length(), 4u);
      EXPECT_LE(e.pair.embedded_span.length(), 4u);
    }
  }
  EXPECT_GT(table.total(), 10u);
}

TEST(CandidateTableTest, MissingTranslation) {
  const auto x = Nli("a", "b");
  DiagonalAligner aligner;
  EXPECT_THROW(BuildCandidateTable(x, {}, {kFr}, aligner), Error);
}

TEST(AlignerTest, SyntheticLexiconRecall) {
  // One-to-one lexicon, shuffled target order.
  std::mt19937_64 rng(23);
  Bitext bitext;
  std::vector<Links> gold;
  for (int p = 0; p < 200; ++p) {
    const std::size_t len = 4 + rng() % 6;
    TokenList s, t(len);
    std::vector<std::size_t> perm(len);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    // Distinct words per sentence, so the gold links are identifiable.
    std::vector<int> vocab(50);
    std::iota(vocab.begin(), vocab.end(), 0);
    std::shuffle(vocab.begin(), vocab.end(), rng);
    Links g;
    for (std::size_t i = 0; i < len; ++i) {
      const auto w = vocab[i];
      s.push_back("s" + std::to_string(w));
      t[perm[i]] = "t" + std::to_string(w);
      g.emplace_back(i, perm[i]);
    }
    bitext.emplace_back(s, t);
    gold.push_back(g);
  }
  const auto probs = TrainIbm1(bitext, 5);
  std::size_t hit = 0, total = 0;
  for (std::size_t p = 0; p < bitext.size(); ++p) {
    const auto links = AlignPair(bitext[p].first, bitext[p].second, probs,
                                 AlignMethod::kIntersect);
    for (const auto& link : gold[p]) {
      ++total;
      hit += std::binary_search(links.links.begin(), links.links.end(), link) ? 1 : 0;
    }
  }
  const double recall = static_cast<double>(hit) / static_cast<double>(total);
  EXPECT_GE(recall, 0.95);
  RecordProperty("recall", std::to_string(recall));
}

TEST(AlignerTest, TrainFromStore) {
  Dataset ds;
  ds.examples.push_back(Nli("the cat", "a cat"));
  TranslationStore store;
  store.Insert({"x", SegmentRole::kPremise, "fr"},
               Segment::FromText(SegmentRole::kPremise, "le chat", kFr));
  store.Insert({"x", SegmentRole::kHypothesis, "fr"},
               Segment::FromText(SegmentRole::kHypothesis, "un chat", kFr));
  auto aligner = TrainAlignerFromStore(ds, store, {kFr}, 5, AlignMethod::kMatch);
  EXPECT_TRUE(aligner.HasTable(kFr));
  EXPECT_GT(aligner.LinkScore("cat", "chat", kFr), aligner.LinkScore("cat", "le", kFr));
  EXPECT_THROW(TrainAlignerFromStore(ds, store, {kDe}, 5, AlignMethod::kMatch), Error);
}

TEST(RemoteAlignerTest, WireShape) {
  testing::FakeServer server;
  server.On("/v1/align", [](const nlohmann::json& body) {
    EXPECT_EQ(body["src_tokens"], (nlohmann::json{"the", "cat"}));
    return std::make_pair(200, std::string(R"({"links":[[1,1],[0,0]]})"));
  });
  server.Start();
  RemoteAligner aligner(server.url());
  EXPECT_EQ(aligner.Align({"the", "cat"}, {"le", "chat"}, kFr).links, (Links{{0, 0}, {1, 1}}));
}

TEST(RemoteAlignerTest, OutOfRangeLink) {
  testing::FakeServer server;
  server.On("/v1/align", [](const nlohmann::json&) {
    return std::make_pair(200, std::string(R"({"links":[[5,0]]})"));
  });
  server.Start();
  RemoteAligner aligner(server.url());
  try {
    aligner.Align({"a"}, {"b"}, kFr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kOracle);
  }
}

}  // namespace
}  // namespace codemix
