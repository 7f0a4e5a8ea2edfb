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

#ifndef DIVCAP_CAPTION_H_
#define DIVCAP_CAPTION_H_

#include <array>
#include <optional>
#include <string_view>

namespace divcap {

// The eleven caption variants kept per video. kSE/kSI/kSU are the simplified
// short summaries (s+e, s+i, s+u).
enum class CaptionKind { kF, kP, kS, kM, kL, kE, kI, kU, kSE, kSI, kSU };

inline constexpr std::array<CaptionKind, 11> kAllKinds = {
    CaptionKind::kF,  CaptionKind::kP,  CaptionKind::kS, CaptionKind::kM,
    CaptionKind::kL,  CaptionKind::kE,  CaptionKind::kI, CaptionKind::kU,
    CaptionKind::kSE, CaptionKind::kSI, CaptionKind::kSU};

// Kinds produced by the language model (everything but f and p), in the
// column order of the automatic-statistics table.
inline constexpr std::array<CaptionKind, 9> kGeneratedKinds = {
    CaptionKind::kS,  CaptionKind::kM,  CaptionKind::kL,
    CaptionKind::kE,  CaptionKind::kI,  CaptionKind::kU,
    CaptionKind::kSE, CaptionKind::kSI, CaptionKind::kSU};

std::string_view KindName(CaptionKind kind);
std::optional<CaptionKind> ParseKind(std::string_view name);

}  // namespace divcap

#endif  // DIVCAP_CAPTION_H_
