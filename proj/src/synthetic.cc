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

#include "divcap/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "divcap/backend.h"
#include "divcap/error.h"
#include "divcap/rng.h"
#include "divcap/text.h"
#include "toml_util.h"

namespace divcap::train {
namespace {

using Direction = std::vector<double>;

struct Vocabulary {
  std::vector<std::string> words;
  std::vector<Direction> directions;
};

Direction RandomUnit(std::size_t dim, Rng& rng) {
  Direction v(dim);
  double norm = 0.0;
  for (double& x : v) {
    x = rng.Normal();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

Vocabulary MakeVocabulary(std::size_t topic, char type, std::size_t size,
                          std::size_t dim, Rng& rng) {
  Vocabulary vocab;
  for (std::size_t k = 0; k < size; ++k) {
    char word[32];
    std::snprintf(word, sizeof(word), "k%zu%c%zu", topic, type, k);
    vocab.words.push_back(word);
    vocab.directions.push_back(RandomUnit(dim, rng));
  }
  return vocab;
}

// Cumulative distribution of exp(beta * <a_w, g>) over the vocabulary.
std::vector<double> WordCdf(const Vocabulary& vocab, const Direction& g,
                            double beta) {
  std::vector<double> logits;
  for (const Direction& a : vocab.directions) {
    double dot = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) dot += a[k] * g[k];
    logits.push_back(beta * dot);
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> cdf;
  double total = 0.0;
  for (double l : logits) {
    total += std::exp(l - m);
    cdf.push_back(total);
  }
  for (double& c : cdf) c /= total;
  return cdf;
}

std::vector<std::string> Draw(const Vocabulary& vocab,
                              const std::vector<double>& cdf, std::size_t n,
                              Rng& rng) {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.UniformDouble();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t k = std::min<std::size_t>(it - cdf.begin(),
                                                cdf.size() - 1);
    words.push_back(vocab.words[k]);
  }
  return words;
}

std::string Sentence(const std::vector<std::string>& words, std::size_t lo,
                     std::size_t hi) {
  std::string out;
  for (std::size_t i = lo; i < hi; ++i) {
    if (i > lo) out += ' ';
    out += words[i];
  }
  return out + ".";
}

// Order-preserving sample of n of the words.
std::vector<std::string> Subsample(const std::vector<std::string>& words,
                                   std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(words.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  rng.Shuffle(idx);
  idx.resize(std::min(n, idx.size()));
  std::sort(idx.begin(), idx.end());
  std::vector<std::string> out;
  for (std::size_t i : idx) out.push_back(words[i]);
  return out;
}

}  // namespace

void ValidateSpec(const SyntheticSpec& s) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorCode::kInvalidArgument, field, field + " " + why);
  };
  if (s.topics < 1) fail("topics", "must be >= 1");
  if (s.videos_per_topic < 1) fail("videos_per_topic", "must be >= 1");
  if (s.detail_vocab_per_topic < 1) fail("detail_vocab_per_topic", "must be >= 1");
  if (s.summary_vocab_per_topic < 1) {
    fail("summary_vocab_per_topic", "must be >= 1");
  }
  if (s.feature_dim < s.topics) fail("feature_dim", "must be >= topics");
  if (!(s.noise >= 0.0)) fail("noise", "must be >= 0");
  if (s.events < 1) fail("events", "must be >= 1");
  if (s.gt_words < s.events) fail("gt_words", "must be >= events");
  if (s.long_words < 1 || s.long_words > s.gt_words) {
    fail("long_words", "must be in [1, gt_words]");
  }
  if (s.medium_words < 1 || s.medium_words > s.gt_words) {
    fail("medium_words", "must be in [1, gt_words]");
  }
  if (s.short_words < 1) fail("short_words", "must be >= 1");
}

SyntheticSpec ParseSyntheticSpec(std::string_view toml_text) {
  const toml::table table = internal::ParseToml(toml_text, "synthetic spec");
  SyntheticSpec s;
  for (const auto& [key_node, node] : table) {
    const std::string_view key = key_node.str();
    auto count = [&]() {
      return static_cast<std::size_t>(internal::GetUnsigned(node, key));
    };
    if (key == "topics") {
      s.topics = count();
    } else if (key == "videos_per_topic") {
      s.videos_per_topic = count();
    } else if (key == "detail_vocab_per_topic") {
      s.detail_vocab_per_topic = count();
    } else if (key == "summary_vocab_per_topic") {
      s.summary_vocab_per_topic = count();
    } else if (key == "noise") {
      s.noise = internal::GetDouble(node, key);
    } else if (key == "seed") {
      s.seed = internal::GetUnsigned(node, key);
    } else if (key == "feature_dim") {
      s.feature_dim = count();
    } else if (key == "detail_beta") {
      s.detail_beta = internal::GetDouble(node, key);
    } else if (key == "summary_beta") {
      s.summary_beta = internal::GetDouble(node, key);
    } else if (key == "events") {
      s.events = count();
    } else if (key == "gt_words") {
      s.gt_words = count();
    } else if (key == "long_words") {
      s.long_words = count();
    } else if (key == "medium_words") {
      s.medium_words = count();
    } else if (key == "short_words") {
      s.short_words = count();
    } else {
      throw Error(ErrorCode::kInvalidArgument, std::string(key),
                  "unknown synthetic spec key '" + std::string(key) + "'");
    }
  }
  ValidateSpec(s);
  return s;
}

SyntheticSpec LoadSyntheticSpec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, path, "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseSyntheticSpec(text.str());
}

SyntheticCorpus GenerateSynthetic(const SyntheticSpec& spec,
                                  std::uint64_t seed) {
  ValidateSpec(spec);
  const std::size_t dim = spec.feature_dim;
  Rng world(DeriveSeed(spec.seed, "synthetic/world"));
  std::vector<Vocabulary> detail, summary;
  for (std::size_t t = 0; t < spec.topics; ++t) {
    detail.push_back(
        MakeVocabulary(t, 'd', spec.detail_vocab_per_topic, dim, world));
    summary.push_back(
        MakeVocabulary(t, 's', spec.summary_vocab_per_topic, dim, world));
  }

  SyntheticCorpus out{{"synthetic", std::to_string(seed), {}}, {},
                      EmbeddingTable(dim)};
  Rng rng(DeriveSeed(seed, "synthetic/videos"));
  const std::size_t per_event = spec.gt_words / spec.events;
  for (std::size_t t = 0; t < spec.topics; ++t) {
    for (std::size_t n = 0; n < spec.videos_per_topic; ++n) {
      char id[48];
      std::snprintf(id, sizeof(id), "t%02zuv%04zu", t, n);
      const Direction g = RandomUnit(dim, rng);

      std::vector<double> features(dim, 0.0);
      features[t] = 1.0;
      double norm = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        features[k] += spec.noise * g[k];
        norm += features[k] * features[k];
      }
      norm = std::sqrt(norm);
      for (double& x : features) x /= norm;
      out.video.Add(id, std::span<const double>(features));

      const auto gt = Draw(detail[t], WordCdf(detail[t], g, spec.detail_beta),
                           spec.gt_words, rng);
      corpus::Video video;
      video.video_id = id;
      for (std::size_t e = 0; e < spec.events; ++e) {
        const std::size_t lo = e * per_event;
        const std::size_t hi = e + 1 == spec.events ? gt.size() : lo + per_event;
        video.events.push_back({10.0 * e, 10.0 * (e + 1), Sentence(gt, lo, hi)});
      }
      video.duration_s = 10.0 * spec.events;

      const auto l = Subsample(gt, spec.long_words, rng);
      const auto m = Subsample(gt, spec.medium_words, rng);
      const auto s =
          Draw(summary[t], WordCdf(summary[t], g, spec.summary_beta),
               spec.short_words, rng);

      augment::CaptionPool pool;
      pool.video_id = id;
      const std::string long_text = Sentence(l, 0, l.size());
      const std::string short_text = Sentence(s, 0, s.size());
      using augment::ReadingLevel;
      pool.captions[CaptionKind::kF] = corpus::FullParagraph(video);
      pool.captions[CaptionKind::kL] = long_text;
      pool.captions[CaptionKind::kM] = Sentence(m, 0, m.size());
      pool.captions[CaptionKind::kS] = short_text;
      pool.captions[CaptionKind::kE] =
          augment::RewriteForLevel(long_text, ReadingLevel::kElementary);
      pool.captions[CaptionKind::kI] =
          augment::RewriteForLevel(long_text, ReadingLevel::kIntermediate);
      pool.captions[CaptionKind::kU] =
          augment::RewriteForLevel(long_text, ReadingLevel::kUniversity);
      pool.captions[CaptionKind::kSE] =
          augment::RewriteForLevel(short_text, ReadingLevel::kElementary);
      pool.captions[CaptionKind::kSI] =
          augment::RewriteForLevel(short_text, ReadingLevel::kIntermediate);
      pool.captions[CaptionKind::kSU] =
          augment::RewriteForLevel(short_text, ReadingLevel::kUniversity);
      if (spec.events == 1) {
        pool.partial_first = pool.partial_last = 0;
      } else {
        const std::size_t half = spec.events / 2;
        pool.partial_first = rng.UniformIndex(spec.events - half + 1);
        pool.partial_last = pool.partial_first + half - 1;
      }
      pool.captions[CaptionKind::kP] =
          corpus::JoinEventRange(video, pool.partial_first, pool.partial_last);
      pool.provenance.backend_id = "synthetic";
      pool.provenance.attempts = 1;
      pool.provenance.targets = augment::ComputeWordTargets(spec.gt_words);
      augment::ValidatePool(pool, &video);

      out.dataset.videos.push_back(std::move(video));
      out.pools.push_back(std::move(pool));
    }
  }
  return out;
}

void WriteSynthetic(const SyntheticCorpus& corpus, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path root(dir);
  corpus::WriteDatasetFile(corpus.dataset, (root / "dataset.jsonl").string());
  augment::WritePools(corpus.pools, (root / "pools.jsonl").string());
  SaveDvec(corpus.video, (root / "video.dvec").string());
}

}  // namespace divcap::train
