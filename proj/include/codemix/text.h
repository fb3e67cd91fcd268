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

#ifndef CODEMIX_TEXT_H_
#define CODEMIX_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by the tokenizer, the lexicon and the metrics.
namespace codemix::text {

// One decoded code point and the byte range it occupied.
struct CodePoint {
  char32_t value;
  std::size_t offset;
  std::size_t length;
};

// Decodes `s`; invalid bytes decode to U+FFFD one byte at a time.
std::vector<CodePoint> Decode(std::string_view s);

void AppendUtf8(char32_t cp, std::string* out);

bool IsSpace(char32_t cp);
bool IsHan(char32_t cp);
bool IsThai(char32_t cp);
bool IsPunctuation(char32_t cp);

// True for code points that the tokenizer emits as single-character tokens
// (scripts written without word delimiters).
inline bool IsUnsegmented(char32_t cp) { return IsHan(cp) || IsThai(cp); }

// True iff `token` is exactly one unsegmented-script code point.
bool IsUnsegmentedToken(std::string_view token);

// Simple case folding for ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic. Other scripts pass through unchanged.
std::string FoldCase(std::string_view s);

std::vector<std::string> SplitOn(std::string_view s, char delim);
std::string_view Trim(std::string_view s);
std::string Join(const std::vector<std::string>& parts, std::string_view sep);

// FNV-1a, stable across platforms (std::hash is not).
std::uint64_t Fnv1a64(std::string_view s, std::uint64_t seed = 14695981039346656037ULL);

}  // namespace codemix::text

#endif  // CODEMIX_TEXT_H_
