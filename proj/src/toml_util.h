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

// TOML helpers shared by the train and sweep configuration readers.

#ifndef DIVCAP_SRC_TOML_UTIL_H_
#define DIVCAP_SRC_TOML_UTIL_H_

#include <string>
#include <string_view>

#include "divcap/train.h"
#include "toml.hpp"

namespace divcap::train::internal {

// Parses TOML text, converting syntax errors to Error(kInvalidArgument).
toml::table ParseToml(std::string_view text, std::string_view source);

// Overrides the fields named in `table` (keys as in TrainConfig). Keys listed
// in `skip` are ignored; any other unknown key is an error.
void ApplyTrainConfig(const toml::table& table, TrainConfig* config,
                      std::initializer_list<std::string_view> skip = {});

double GetDouble(const toml::node& node, std::string_view key);
std::uint64_t GetUnsigned(const toml::node& node, std::string_view key);
std::vector<CaptionKind> GetKinds(const toml::node& node, std::string_view key);

}  // namespace divcap::train::internal

#endif  // DIVCAP_SRC_TOML_UTIL_H_
