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

#include "codemix/lexicon.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "codemix/error.h"

namespace codemix {
namespace {

using ::testing::ElementsAre;
using ::testing::IsEmpty;

const LanguageTag kEn = LanguageTag::Parse("en");
const LanguageTag kFr = LanguageTag::Parse("fr");
const LanguageTag kHi = LanguageTag::Parse("hi");

TEST(DictionaryTest, SingleEntry) {
  const auto d = ParseDictionaryTsv("cat chat\n", kEn, kFr);
  EXPECT_THAT(d.Lookup("cat"), ElementsAre("chat"));
  EXPECT_EQ(d.size(), 1u);
}

TEST(DictionaryTest, MultiSense) {
  const auto d = ParseDictionaryTsv("bank banque\nbank rive", kEn, kFr);
  EXPECT_THAT(d.Lookup("bank"), ElementsAre("banque", "rive"));
}

TEST(DictionaryTest, EmptyFile) {
  EXPECT_EQ(ParseDictionaryTsv("", kEn, kFr).size(), 0u);
}

TEST(DictionaryTest, LookupFoldsCase) {
  const auto d = ParseDictionaryTsv("cat chat\n", kEn, kFr);
  EXPECT_THAT(d.Lookup("Cat"), ElementsAre("chat"));
  EXPECT_THAT(d.Lookup("CAT"), ElementsAre("chat"));
  EXPECT_THAT(d.Lookup("xylophone"), IsEmpty());
}

TEST(DictionaryTest, TabAllowsMultiwordTarget) {
  const auto d = ParseDictionaryTsv("however\tpar contre\nbank\tbanque\n", kEn, kFr);
  EXPECT_THAT(d.Lookup("however"), ElementsAre("par contre"));
}

TEST(DictionaryTest, DuplicatesIgnored) {
  const auto d = ParseDictionaryTsv("a b\na b\nA b\n", kEn, kFr);
  EXPECT_THAT(d.Lookup("a"), ElementsAre("b"));
}

TEST(DictionaryTest, MalformedLine) {
  try {
    ParseDictionaryTsv("cat chat\nthree fields here\n", kEn, kFr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
    EXPECT_THAT(e.what(), ::testing::HasSubstr("line 2"));
  }
}

TEST(DictionaryTest, DumpLoadIdentity) {
  const auto d = ParseDictionaryTsv(
      "bank banque\nbank rive\ncat chat\nhowever\tpar contre\nÉté été\n", kEn, kFr);
  const auto again = ParseDictionaryTsv(d.ToTsv(), kEn, kFr);
  EXPECT_EQ(again, d);
}

TEST(TransliterationTest, MappedUnmappedEmpty) {
  const auto t = ParseTransliterationTsv("नमस्ते\tnamaste\n", Script::kDevanagari, Script::kLatin);
  EXPECT_EQ(t.Transliterate("नमस्ते"), "namaste");
  EXPECT_EQ(t.Transliterate("घर"), std::nullopt);
  const TransliterationTable empty(Script::kDevanagari, Script::kLatin);
  EXPECT_EQ(empty.Transliterate("नमस्ते"), std::nullopt);
  EXPECT_EQ(empty.Transliterate(""), std::nullopt);
  (void)kHi;
}

}  // namespace
}  // namespace codemix
