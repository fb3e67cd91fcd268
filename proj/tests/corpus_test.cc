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

#include "codemix/corpus.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <filesystem>

#include "codemix/error.h"

namespace codemix {
namespace {

using ::testing::HasSubstr;

const LanguageTag kEn = LanguageTag::Parse("en");
const LanguageTag kZh = LanguageTag::Parse("zh");

template <typename Fn>
std::string DataErrorMessage(Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
    return e.what();
  }
  ADD_FAILURE() << "expected a data error";
  return {};
}

TEST(LanguageTagTest, ScriptTable) {
  EXPECT_EQ(LanguageTag::Parse("zh").script(), Script::kHan);
  EXPECT_EQ(LanguageTag::Parse("th").script(), Script::kThai);
  EXPECT_EQ(LanguageTag::Parse("hi").script(), Script::kDevanagari);
  EXPECT_EQ(LanguageTag::Parse("fr").script(), Script::kLatin);
  EXPECT_THROW(LanguageTag::Parse("FR"), Error);
  EXPECT_THROW(LanguageTag::Parse("f"), Error);
  EXPECT_EQ(ParseLanguageList("fr, zh").size(), 2u);
  EXPECT_TRUE(ParseLanguageList("").empty());
}

TEST(TokenizeTest, Whitespace) {
  EXPECT_EQ(Tokenize("the cat sat", kEn), (std::vector<std::string>{"the", "cat", "sat"}));
  EXPECT_TRUE(Tokenize("", kEn).empty());
  EXPECT_EQ(Tokenize("  a\t b\n", kEn), (std::vector<std::string>{"a", "b"}));
}

TEST(TokenizeTest, HanPerCharacter) {
  EXPECT_EQ(Tokenize("你好吗", kZh), (std::vector<std::string>{"你", "好", "吗"}));
  // Same rule regardless of the declared language.
  EXPECT_EQ(Tokenize("I like 猫咪 a lot", kEn),
            (std::vector<std::string>{"I", "like", "猫", "咪", "a", "lot"}));
}

TEST(TokenizeTest, ThaiPerCharacter) {
  EXPECT_EQ(Tokenize("แมว", LanguageTag::Parse("th")).size(), 3u);
}

TEST(TokenizeTest, DetokenizeRoundTrip) {
  const std::vector<std::string> texts = {
      "the cat sat", "你好吗", "I like 猫咪 a lot", "le chat 很 好 ok", "แมว cat", "", "x"};
  for (const auto& s : texts) {
    const auto tokens = Tokenize(s, kEn);
    EXPECT_EQ(Tokenize(Detokenize(tokens), kEn), tokens) << s;
  }
  EXPECT_EQ(Detokenize({"你", "好", "cat"}), "你好 cat");
}

TEST(CharacterTokenizerTest, SplitsEverything) {
  CharacterTokenizer t;
  EXPECT_EQ(t.Tokenize("ab c", kEn), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(SegmentTest, FromTokensRebuildsRaw) {
  const auto seg = Segment::FromTokens(SegmentRole::kPremise, {"a", "你", "好"});
  EXPECT_EQ(seg.raw, "a 你好");
  EXPECT_EQ(seg.tokens.size(), 3u);
}

TEST(ClassificationJsonlTest, OneLine) {
  const auto ds = ParseClassificationJsonl(
      R"({"pair_id":"p1","premise":"A man sleeps.","hypothesis":"A man rests.","label":"entailment","language":"en"})"
      "\n");
  ASSERT_EQ(ds.examples.size(), 1u);
  const auto& x = ds.examples[0];
  EXPECT_EQ(x.id, "p1:en");
  EXPECT_EQ(x.class_label(), 2);
  EXPECT_EQ(x.Find(SegmentRole::kHypothesis)->tokens.size(), 3u);
  EXPECT_EQ(ds.label_names.size(), 3u);
}

TEST(ClassificationJsonlTest, EmptyFile) {
  EXPECT_TRUE(ParseClassificationJsonl("").examples.empty());
}

TEST(ClassificationJsonlTest, MissingLabel) {
  const auto msg = DataErrorMessage([] {
    ParseClassificationJsonl(
        R"({"pair_id":"p1","premise":"a","hypothesis":"b","language":"en"})");
  });
  EXPECT_THAT(msg, HasSubstr("line 1: missing field label"));
}

TEST(ClassificationJsonlTest, IntegerLabelsAndIds) {
  const auto ds = ParseClassificationJsonl(
      R"({"pair_id":7,"premise":"a","hypothesis":"b","label":0,"language":"fr"})"
      "\n"
      R"({"id":"custom","pair_id":8,"premise":"a","hypothesis":"b","label":1,"language":"en"})");
  ASSERT_EQ(ds.examples.size(), 2u);
  EXPECT_EQ(ds.examples[0].id, "7:fr");
  EXPECT_EQ(ds.examples[0].matrix_language.code(), "fr");
  EXPECT_EQ(ds.examples[1].id, "custom");
}

TEST(ClassificationJsonlTest, FormatRoundTrip) {
  const std::string in =
      R"({"pair_id":"p1","premise":"A man sleeps .","hypothesis":"He rests","label":"neutral","language":"en"})"
      "\n"
      R"({"id":"p1:en#cat1","pair_id":"p1","premise":"A 男人 sleeps .","hypothesis":"He rests","label":"neutral","language":"en"})"
      "\n";
  const auto ds = ParseClassificationJsonl(in);
  const auto again = ParseClassificationJsonl(FormatClassificationJsonl(ds));
  ASSERT_EQ(again.examples.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(again.examples[i].id, ds.examples[i].id);
    EXPECT_EQ(again.examples[i].segments[0].tokens, ds.examples[i].segments[0].tokens);
    EXPECT_EQ(again.examples[i].label, ds.examples[i].label);
  }
}

TEST(DatasetTest, DuplicateIds) {
  EXPECT_THROW(ParseClassificationJsonl(
                   R"({"pair_id":"p","premise":"a","hypothesis":"b","label":0,"language":"en"})"
                   "\n"
                   R"({"pair_id":"p","premise":"c","hypothesis":"d","label":0,"language":"en"})"),
               Error);
  Dataset ds;
  ds.examples.resize(2);
  ds.examples[0].id = ds.examples[1].id = "same";
  EXPECT_THROW(ds.CheckUniqueIds(), Error);
}

constexpr char kSquad[] = R"({"version":"1.1","data":[{"title":"t","paragraphs":[
  {"context":"The cat sat on the mat.","qas":[
    {"id":"q1","question":"Where did the cat sit?","answers":[{"text":"on the mat","answer_start":12}]},
    {"id":"q2","question":"Who sat?","answers":[{"text":"The cat","answer_start":0}]}]}]}]})";

TEST(SpanQaTest, SharedParagraph) {
  const auto ds = ParseSpanQaJson(kSquad);
  ASSERT_EQ(ds.examples.size(), 2u);
  EXPECT_EQ(ds.examples[0].task, TaskKind::kSpanQa);
  EXPECT_EQ(ds.examples[0].answer().text, "on the mat");
  EXPECT_EQ(ds.examples[0].answer().char_start, 12u);
  EXPECT_EQ(ds.examples[0].Find(SegmentRole::kContext)->raw,
            ds.examples[1].Find(SegmentRole::kContext)->raw);
  EXPECT_EQ(AttackableRoles(TaskKind::kSpanQa), std::vector<SegmentRole>{SegmentRole::kQuestion});
}

TEST(SpanQaTest, AnswerNotInContext) {
  const auto msg = DataErrorMessage([] {
    ParseSpanQaJson(R"({"data":[{"paragraphs":[{"context":"abc","qas":[
      {"id":"q","question":"?","answers":[{"text":"zzz","answer_start":0}]}]}]}]})");
  });
  EXPECT_THAT(msg, HasSubstr("answer not found in context"));
}

TEST(SpanQaTest, FormatRoundTrip) {
  const auto ds = ParseSpanQaJson(kSquad);
  const auto again = ParseSpanQaJson(FormatSpanQaJson(ds));
  ASSERT_EQ(again.examples.size(), 2u);
  EXPECT_EQ(again.examples[1].answer(), ds.examples[1].answer());
}

TEST(FileTest, LoadDispatchAndMissingFile) {
  const auto dir = std::filesystem::temp_directory_path() / "codemix_corpus_test";
  WriteFile(dir / "qa.json", kSquad);
  EXPECT_EQ(LoadDataset(dir / "qa.json").examples.size(), 2u);
  EXPECT_THROW(LoadDataset(dir / "absent.jsonl"), Error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace codemix
