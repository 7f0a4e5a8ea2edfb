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

#ifndef DIVCAP_SWEEP_H_
#define DIVCAP_SWEEP_H_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "divcap/retrieval.h"
#include "divcap/synthetic.h"
#include "divcap/train.h"
#include "json.hpp"

namespace divcap::train {

// Group R@1 of one trained model on a held-out corpus.
struct GroupRecall {
  double full = 0.0;
  double all = 0.0;
  double shorts = 0.0;
  double longs = 0.0;
  double partial = 0.0;
};

GroupRecall GroupRecallOf(const retrieval::EvalReport& report);

// Train/eval corpora for one seed: the training corpus draws its videos from
// `seed`, the held-out corpus from a seed derived from it.
struct SeedData {
  std::uint64_t seed = 0;
  SyntheticCorpus train;
  SyntheticCorpus eval;
};

SeedData MakeSeedData(const SyntheticSpec& spec, std::uint64_t seed);

// Fits on data.train with config.seed = data.seed and evaluates raw text
// embeddings against video embeddings on data.eval.
retrieval::EvalReport TrainAndEvaluate(const TrainConfig& config,
                                       const SeedData& data);

// Mean over seeds.
GroupRecall MeanGroupRecall(const TrainConfig& config,
                            const std::vector<SeedData>& seeds);

struct SweepCell {
  double eta = 0.75;
  double alpha_t2t = 0.1;
  double alpha_proj = 0.1;
  std::vector<CaptionKind> allowed_kinds;
};

struct SweepGrid {
  TrainConfig base;
  SyntheticSpec spec;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::vector<SweepCell> cells;
};

// TOML layout:
//   seeds = [1, 2, 3]
//   [base]       train config keys
//   [synthetic]  synthetic spec keys
//   [grid]       eta / alpha_t2t / alpha_proj / allowed_kinds lists; the
//                cells are their cartesian product
//   [[cell]]     explicit cells instead of [grid]; omitted keys take [base]
SweepGrid ParseSweepGrid(std::string_view toml_text);
SweepGrid LoadSweepGrid(const std::string& path);

// One row per cell in grid order. A failing cell is reported with its error
// and the sweep continues. `progress` is called after each cell.
nlohmann::json RunSweep(
    const SweepGrid& grid,
    const std::function<void(std::size_t done, std::size_t total)>& progress =
        nullptr);

}  // namespace divcap::train

#endif  // DIVCAP_SWEEP_H_
