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

#include "divcap/caption.h"

namespace divcap {

std::string_view KindName(CaptionKind kind) {
  switch (kind) {
    case CaptionKind::kF: return "f";
    case CaptionKind::kP: return "p";
    case CaptionKind::kS: return "s";
    case CaptionKind::kM: return "m";
    case CaptionKind::kL: return "l";
    case CaptionKind::kE: return "e";
    case CaptionKind::kI: return "i";
    case CaptionKind::kU: return "u";
    case CaptionKind::kSE: return "se";
    case CaptionKind::kSI: return "si";
    case CaptionKind::kSU: return "su";
  }
  return "?";
}

std::optional<CaptionKind> ParseKind(std::string_view name) {
  for (CaptionKind kind : kAllKinds) {
    if (KindName(kind) == name) return kind;
  }
  // Accept the s+e style spelling too.
  if (name == "s+e") return CaptionKind::kSE;
  if (name == "s+i") return CaptionKind::kSI;
  if (name == "s+u") return CaptionKind::kSU;
  return std::nullopt;
}

}  // namespace divcap
