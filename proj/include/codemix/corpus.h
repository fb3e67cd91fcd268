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

#ifndef CODEMIX_CORPUS_H_
#define CODEMIX_CORPUS_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace codemix {

enum class Script { kLatin, kDevanagari, kArabic, kCyrillic, kHan, kThai, kGreek, kOther };

std::string_view ScriptName(Script script);

// A language code plus the script its words are written in.
class LanguageTag {
 public:
  // Validates `code` against [a-z]{2,3}; throws a config error otherwise.
  LanguageTag(std::string code, Script script);

  // Uses the built-in code -> script table (Latin when unknown).
  static LanguageTag Parse(std::string_view code);

  const std::string& code() const { return code_; }
  Script script() const { return script_; }

  friend bool operator==(const LanguageTag& a, const LanguageTag& b) {
    return a.code_ == b.code_;
  }
  friend auto operator<=>(const LanguageTag& a, const LanguageTag& b) {
    return a.code_ <=> b.code_;
  }

 private:
  std::string code_;
  Script script_;
};

// Parses a comma-separated list such as "fr,zh".
std::vector<LanguageTag> ParseLanguageList(std::string_view csv);

enum class SegmentRole { kPremise, kHypothesis, kContext, kQuestion };

std::string_view RoleName(SegmentRole role);
SegmentRole ParseRole(std::string_view name);

// Tokenizers are pluggable per language; the built-in ones never need
// external resources.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<std::string> Tokenize(std::string_view text,
                                            const LanguageTag& lang) const = 0;
};

// Splits on Unicode whitespace. Runs of Han/Thai characters inside a chunk
// are split into single-character tokens.
class WhitespaceTokenizer : public Tokenizer {
 public:
  std::vector<std::string> Tokenize(std::string_view text,
                                    const LanguageTag& lang) const override;
};

// Every non-space code point is its own token.
class CharacterTokenizer : public Tokenizer {
 public:
  std::vector<std::string> Tokenize(std::string_view text,
                                    const LanguageTag& lang) const override;
};

// Default tokenization for `lang` (see WhitespaceTokenizer).
std::vector<std::string> Tokenize(std::string_view text, const LanguageTag& lang);

// Joins tokens with single spaces, except that two adjacent single-character
// Han/Thai tokens are joined with nothing.
std::string Detokenize(const std::vector<std::string>& tokens);

struct Segment {
  SegmentRole role;
  std::string raw;
  std::vector<std::string> tokens;

  static Segment FromText(SegmentRole role, std::string raw, const LanguageTag& lang);
  // Rebuilds raw text from tokens.
  static Segment FromTokens(SegmentRole role, std::vector<std::string> tokens);
};

enum class TaskKind { kClassification, kSpanQa };

struct AnswerSpan {
  std::string text;
  std::size_t char_start = 0;

  friend bool operator==(const AnswerSpan&, const AnswerSpan&) = default;
};

using Label = std::variant<int, AnswerSpan>;

struct LabeledExample {
  std::string id;
  std::vector<Segment> segments;
  TaskKind task = TaskKind::kClassification;
  Label label = 0;
  LanguageTag matrix_language = LanguageTag::Parse("en");

  const Segment* Find(SegmentRole role) const;
  Segment* Find(SegmentRole role);
  int class_label() const { return std::get<int>(label); }
  const AnswerSpan& answer() const { return std::get<AnswerSpan>(label); }
};

// Segments the attacks may perturb: premise and hypothesis for
// classification, only the question for span QA.
std::vector<SegmentRole> AttackableRoles(TaskKind task);

struct Dataset {
  std::vector<LabeledExample> examples;
  std::vector<std::string> label_names;

  // Throws a data error on duplicate ids.
  void CheckUniqueIds() const;
};

// NLI label strings in class-index order.
inline constexpr std::string_view kNliLabels[] = {"contradiction", "neutral",
                                                   "entailment"};

// Classification JSONL: {pair_id, premise, hypothesis, label, language}
// per line, plus an optional "id" that overrides pair_id:language.
Dataset LoadClassificationJsonl(const std::filesystem::path& path);
Dataset ParseClassificationJsonl(std::string_view contents);
std::string FormatClassificationJsonl(const Dataset& dataset);

// SQuAD 1.1 layout. The first gold answer of each question is kept.
Dataset LoadSpanQaJson(const std::filesystem::path& path);
Dataset ParseSpanQaJson(std::string_view contents);
std::string FormatSpanQaJson(const Dataset& dataset);

// Dispatches on extension: .jsonl is classification, .json is span QA.
Dataset LoadDataset(const std::filesystem::path& path);
void WriteDataset(const Dataset& dataset, const std::filesystem::path& path);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

}  // namespace codemix

#endif  // CODEMIX_CORPUS_H_
