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

#ifndef DIVCAP_SYNTHETIC_H_
#define DIVCAP_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "divcap/corpus.h"
#include "divcap/embeddings.h"
#include "divcap/pool.h"

namespace divcap::train {

// A world of K topics. Each video has features e_topic + noise * g (then
// normalized) for a Gaussian g, and its caption words are drawn from its
// topic's vocabulary with probability proportional to exp(beta * <a_w, g>)
// for fixed random unit directions a_w. Detail and summary vocabularies are
// disjoint and differ between topics, so short captions share no words with
// paragraphs.
struct SyntheticSpec {
  std::size_t topics = 10;
  std::size_t videos_per_topic = 50;
  std::size_t detail_vocab_per_topic = 40;
  std::size_t summary_vocab_per_topic = 20;
  double noise = 1.0;
  // Seeds the world (vocabularies and word directions); the seed passed to
  // GenerateSynthetic draws the videos.
  std::uint64_t seed = 0;
  std::size_t feature_dim = 32;
  double detail_beta = 16.0;
  double summary_beta = 16.0;
  std::size_t events = 4;
  std::size_t gt_words = 40;
  std::size_t long_words = 30;
  std::size_t medium_words = 20;
  std::size_t short_words = 6;

  bool operator==(const SyntheticSpec&) const = default;
};

// Throws Error(kInvalidArgument).
void ValidateSpec(const SyntheticSpec& spec);

SyntheticSpec ParseSyntheticSpec(std::string_view toml_text);
SyntheticSpec LoadSyntheticSpec(const std::string& path);

struct SyntheticCorpus {
  corpus::Dataset dataset;
  std::vector<augment::CaptionPool> pools;
  EmbeddingTable video;  // features keyed by video_id
};

// Paragraphs are gt_words detail words split over `events` segments; l and m
// keep an order-preserving subsample of the paragraph; s draws short_words
// summary words; e/i/u and se/si/su are reading-level rewrites of l and s; p
// is a contiguous half of the events.
SyntheticCorpus GenerateSynthetic(const SyntheticSpec& spec,
                                  std::uint64_t seed);

// Writes dataset.jsonl, pools.jsonl and video.dvec into `dir`.
void WriteSynthetic(const SyntheticCorpus& corpus, const std::string& dir);

}  // namespace divcap::train

#endif  // DIVCAP_SYNTHETIC_H_
