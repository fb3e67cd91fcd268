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

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "codemix/error.h"
#include "codemix/text.h"
#include "json.hpp"

namespace codemix {

using nlohmann::json;

std::string_view ScriptName(Script script) {
  switch (script) {
    case Script::kLatin: return "Latin";
    case Script::kDevanagari: return "Devanagari";
    case Script::kArabic: return "Arabic";
    case Script::kCyrillic: return "Cyrillic";
    case Script::kHan: return "Han";
    case Script::kThai: return "Thai";
    case Script::kGreek: return "Greek";
    case Script::kOther: return "Other";
  }
  return "Other";
}

LanguageTag::LanguageTag(std::string code, Script script)
    : code_(std::move(code)), script_(script) {
  const bool valid_length = code_.size() == 2 || code_.size() == 3;
  bool valid_chars = true;
  for (const char c : code_) valid_chars &= (c >= 'a' && c <= 'z');
  if (!valid_length || !valid_chars) {
    throw ConfigError("invalid language code '" + code_ + "'");
  }
}

LanguageTag LanguageTag::Parse(std::string_view code) {
  static const std::map<std::string, Script, std::less<>> kScripts = {
      {"zh", Script::kHan},        {"ja", Script::kHan},
      {"th", Script::kThai},       {"hi", Script::kDevanagari},
      {"mr", Script::kDevanagari}, {"ne", Script::kDevanagari},
      {"ar", Script::kArabic},     {"ur", Script::kArabic},
      {"fa", Script::kArabic},     {"ru", Script::kCyrillic},
      {"bg", Script::kCyrillic},   {"uk", Script::kCyrillic},
      {"el", Script::kGreek},      {"ko", Script::kOther},
      {"he", Script::kOther},      {"ka", Script::kOther},
  };
  const auto it = kScripts.find(code);
  return LanguageTag(std::string(code),
                     it == kScripts.end() ? Script::kLatin : it->second);
}

std::vector<LanguageTag> ParseLanguageList(std::string_view csv) {
  std::vector<LanguageTag> langs;
  for (const auto& part : text::SplitOn(csv, ',')) {
    const auto code = text::Trim(part);
    if (code.empty()) continue;
    auto tag = LanguageTag::Parse(code);
    bool seen = false;
    for (const auto& l : langs) seen |= (l == tag);
    if (!seen) langs.push_back(std::move(tag));
  }
  return langs;
}

std::string_view RoleName(SegmentRole role) {
  switch (role) {
    case SegmentRole::kPremise: return "premise";
    case SegmentRole::kHypothesis: return "hypothesis";
    case SegmentRole::kContext: return "context";
    case SegmentRole::kQuestion: return "question";
  }
  return "premise";
}

SegmentRole ParseRole(std::string_view name) {
  if (name == "premise") return SegmentRole::kPremise;
  if (name == "hypothesis") return SegmentRole::kHypothesis;
  if (name == "context") return SegmentRole::kContext;
  if (name == "question") return SegmentRole::kQuestion;
  throw DataError("unknown segment role '" + std::string(name) + "'");
}

std::vector<std::string> WhitespaceTokenizer::Tokenize(
    std::string_view input, const LanguageTag& /*lang*/) const {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (const auto& cp : text::Decode(input)) {
    if (text::IsSpace(cp.value)) {
      flush();
    } else if (text::IsUnsegmented(cp.value)) {
      flush();
      tokens.emplace_back(input.substr(cp.offset, cp.length));
    } else {
      current.append(input.substr(cp.offset, cp.length));
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> CharacterTokenizer::Tokenize(
    std::string_view input, const LanguageTag& /*lang*/) const {
  std::vector<std::string> tokens;
  for (const auto& cp : text::Decode(input)) {
    if (!text::IsSpace(cp.value)) {
      tokens.emplace_back(input.substr(cp.offset, cp.length));
    }
  }
  return tokens;
}

std::vector<std::string> Tokenize(std::string_view input, const LanguageTag& lang) {
  static const WhitespaceTokenizer kDefault;
  return kDefault.Tokenize(input, lang);
}

std::string Detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  bool prev_unsegmented = false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const bool unsegmented = text::IsUnsegmentedToken(tokens[i]);
    if (i > 0 && !(prev_unsegmented && unsegmented)) out.push_back(' ');
    out.append(tokens[i]);
    prev_unsegmented = unsegmented;
  }
  return out;
}

Segment Segment::FromText(SegmentRole role, std::string raw, const LanguageTag& lang) {
  auto tokens = Tokenize(raw, lang);
  return Segment{role, std::move(raw), std::move(tokens)};
}

Segment Segment::FromTokens(SegmentRole role, std::vector<std::string> tokens) {
  auto raw = Detokenize(tokens);
  return Segment{role, std::move(raw), std::move(tokens)};
}

const Segment* LabeledExample::Find(SegmentRole role) const {
  for (const auto& s : segments) {
    if (s.role == role) return &s;
  }
  return nullptr;
}

Segment* LabeledExample::Find(SegmentRole role) {
  for (auto& s : segments) {
    if (s.role == role) return &s;
  }
  return nullptr;
}

std::vector<SegmentRole> AttackableRoles(TaskKind task) {
  if (task == TaskKind::kSpanQa) return {SegmentRole::kQuestion};
  return {SegmentRole::kPremise, SegmentRole::kHypothesis};
}

void Dataset::CheckUniqueIds() const {
  std::set<std::string_view> seen;
  for (const auto& ex : examples) {
    if (!seen.insert(ex.id).second) {
      throw DataError("duplicate example id '" + ex.id + "'");
    }
  }
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

namespace {

std::string LinePrefix(std::size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

std::string RequireString(const json& obj, const char* field, std::size_t line_no) {
  const auto it = obj.find(field);
  if (it == obj.end()) {
    throw DataError(LinePrefix(line_no) + "missing field " + field);
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw DataError(LinePrefix(line_no) + "field " + field + " must be a string");
}

int ParseNliLabel(const json& value, std::size_t line_no) {
  if (value.is_number_integer()) {
    const int label = value.get<int>();
    if (label >= 0 && label <= 2) return label;
  } else if (value.is_string()) {
    const auto name = value.get<std::string>();
    for (int i = 0; i < 3; ++i) {
      if (name == kNliLabels[i]) return i;
    }
    throw DataError(LinePrefix(line_no) + "unknown label '" + name + "'");
  }
  throw DataError(LinePrefix(line_no) + "unknown label " + value.dump());
}

}  // namespace

Dataset ParseClassificationJsonl(std::string_view contents) {
  Dataset dataset;
  dataset.label_names.assign(std::begin(kNliLabels), std::end(kNliLabels));
  std::size_t line_no = 0;
  for (const auto& line : text::SplitOn(contents, '\n')) {
    ++line_no;
    if (text::Trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(LinePrefix(line_no) + "malformed JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw DataError(LinePrefix(line_no) + "expected an object");
    const auto pair_id = RequireString(obj, "pair_id", line_no);
    const auto premise = RequireString(obj, "premise", line_no);
    const auto hypothesis = RequireString(obj, "hypothesis", line_no);
    if (!obj.contains("label")) {
      throw DataError(LinePrefix(line_no) + "missing field label");
    }
    const int label = ParseNliLabel(obj["label"], line_no);
    const auto lang = LanguageTag::Parse(RequireString(obj, "language", line_no));

    LabeledExample ex;
    ex.id = obj.contains("id") ? RequireString(obj, "id", line_no)
                               : pair_id + ":" + lang.code();
    ex.task = TaskKind::kClassification;
    ex.label = label;
    ex.matrix_language = lang;
    ex.segments.push_back(Segment::FromText(SegmentRole::kPremise, premise, lang));
    ex.segments.push_back(Segment::FromText(SegmentRole::kHypothesis, hypothesis, lang));
    dataset.examples.push_back(std::move(ex));
  }
  dataset.CheckUniqueIds();
  return dataset;
}

Dataset LoadClassificationJsonl(const std::filesystem::path& path) {
  return ParseClassificationJsonl(ReadFile(path));
}

namespace {

// pair_id is the id up to the language suffix, when that suffix is present.
std::string PairIdOf(const LabeledExample& ex) {
  const std::string suffix = ":" + ex.matrix_language.code();
  if (ex.id.size() > suffix.size() &&
      ex.id.compare(ex.id.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return ex.id.substr(0, ex.id.size() - suffix.size());
  }
  return ex.id;
}

}  // namespace

std::string FormatClassificationJsonl(const Dataset& dataset) {
  std::string out;
  for (const auto& ex : dataset.examples) {
    if (ex.task != TaskKind::kClassification) {
      throw DataError("example '" + ex.id + "' is not a classification example");
    }
    const auto* premise = ex.Find(SegmentRole::kPremise);
    const auto* hypothesis = ex.Find(SegmentRole::kHypothesis);
    if (premise == nullptr || hypothesis == nullptr) {
      throw DataError("example '" + ex.id + "' lacks premise or hypothesis");
    }
    json obj;
    obj["pair_id"] = PairIdOf(ex);
    obj["premise"] = premise->raw;
    obj["hypothesis"] = hypothesis->raw;
    obj["label"] = std::string(kNliLabels[ex.class_label()]);
    obj["language"] = ex.matrix_language.code();
    if (ex.id != PairIdOf(ex) + ":" + ex.matrix_language.code()) obj["id"] = ex.id;
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

Dataset ParseSpanQaJson(std::string_view contents) {
  json root;
  try {
    root = json::parse(contents);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed SQuAD JSON (") + e.what() + ")");
  }
  if (!root.contains("data") || !root["data"].is_array()) {
    throw DataError("SQuAD JSON lacks a data array");
  }
  const auto lang = LanguageTag::Parse(root.value("language", std::string("en")));
  Dataset dataset;
  for (const auto& article : root["data"]) {
    for (const auto& paragraph : article.value("paragraphs", json::array())) {
      const auto context = paragraph.at("context").get<std::string>();
      for (const auto& qa : paragraph.value("qas", json::array())) {
        const auto id = qa.at("id").is_string()
                            ? qa.at("id").get<std::string>()
                            : qa.at("id").dump();
        if (!qa.contains("answers") || !qa["answers"].is_array()) {
          throw DataError("question '" + id + "': missing answers array");
        }
        if (qa["answers"].empty()) {
          throw DataError("question '" + id + "': answers array is empty");
        }
        const auto& first = qa["answers"][0];
        AnswerSpan answer{first.at("text").get<std::string>(),
                          first.at("answer_start").get<std::size_t>()};
        if (answer.char_start + answer.text.size() > context.size() ||
            context.compare(answer.char_start, answer.text.size(), answer.text) != 0) {
          throw DataError("question '" + id + "': answer not found in context");
        }
        LabeledExample ex;
        ex.id = id;
        ex.task = TaskKind::kSpanQa;
        ex.label = answer;
        ex.matrix_language = lang;
        ex.segments.push_back(Segment::FromText(SegmentRole::kContext, context, lang));
        ex.segments.push_back(Segment::FromText(
            SegmentRole::kQuestion, qa.at("question").get<std::string>(), lang));
        dataset.examples.push_back(std::move(ex));
      }
    }
  }
  dataset.CheckUniqueIds();
  return dataset;
}

Dataset LoadSpanQaJson(const std::filesystem::path& path) {
  return ParseSpanQaJson(ReadFile(path));
}

std::string FormatSpanQaJson(const Dataset& dataset) {
  json paragraphs = json::array();
  std::string lang = "en";
  for (const auto& ex : dataset.examples) {
    if (ex.task != TaskKind::kSpanQa) {
      throw DataError("example '" + ex.id + "' is not a span QA example");
    }
    lang = ex.matrix_language.code();
    const auto& answer = ex.answer();
    json qa = {{"id", ex.id},
               {"question", ex.Find(SegmentRole::kQuestion)->raw},
               {"answers", json::array({{{"text", answer.text},
                                          {"answer_start", answer.char_start}}})}};
    paragraphs.push_back({{"context", ex.Find(SegmentRole::kContext)->raw},
                          {"qas", json::array({qa})}});
  }
  json root = {{"version", "1.1"},
               {"language", lang},
               {"data", json::array({{{"title", "codemix"},
                                      {"paragraphs", paragraphs}}})}};
  return root.dump(1) + "\n";
}

Dataset LoadDataset(const std::filesystem::path& path) {
  if (path.extension() == ".json") return LoadSpanQaJson(path);
  return LoadClassificationJsonl(path);
}

void WriteDataset(const Dataset& dataset, const std::filesystem::path& path) {
  const bool qa = !dataset.examples.empty() &&
                  dataset.examples.front().task == TaskKind::kSpanQa;
  WriteFile(path, qa ? FormatSpanQaJson(dataset) : FormatClassificationJsonl(dataset));
}

}  // namespace codemix
