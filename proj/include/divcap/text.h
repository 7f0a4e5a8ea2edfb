//
// Copyright 2026 The divcap Authors
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
//

#ifndef DIVCAP_TEXT_H_
#define DIVCAP_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace divcap {

// Strips ASCII whitespace from both ends.
std::string_view Trim(std::string_view s);

// Whitespace-delimited words. This is the notion of "word" used for word
// budgets (paragraph length, summary targets, outlier filtering).
std::vector<std::string_view> SplitWhitespace(std::string_view s);
std::size_t CountWords(std::string_view s);

std::string Join(const std::vector<std::string>& parts, std::string_view sep);

// Analysis tokenizer: lowercase, split on anything that is not alphanumeric.
// Bytes >= 0x80 are kept inside tokens so UTF-8 words survive intact.
std::vector<std::string> Tokenize(std::string_view text);

// Number of alphanumeric characters in a token, counting each UTF-8 code point
// once.
std::size_t CharCount(std::string_view token);

std::string ToLower(std::string_view s);

// 64-bit FNV-1a.
std::uint64_t Fnv1a64(std::string_view data);
std::string Hex64(std::uint64_t value);

}  // namespace divcap

#endif  // DIVCAP_TEXT_H_
