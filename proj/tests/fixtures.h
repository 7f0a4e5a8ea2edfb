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

#ifndef DIVCAP_TESTS_FIXTURES_H_
#define DIVCAP_TESTS_FIXTURES_H_

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "divcap/corpus.h"
#include "divcap/rng.h"

namespace divcap::testing {

// Caption-like sentences mixing plain words with words that have entries in
// the mock backend's synonym tables.
inline std::string FixtureSentence(Rng& rng) {
  static const std::vector<std::string> kSubjects = {
      "A man", "The individuals", "Two kids", "A person", "The woman",
      "People", "A boy", "The gentleman"};
  static const std::vector<std::string> kVerbs = {
      "rides", "pushes", "commences to paddle", "walks beneath", "holds",
      "throws", "purchase", "cleans", "jumps over", "opens"};
  static const std::vector<std::string> kObjects = {
      "a big car", "the small bike", "a substantial rock", "the automobile",
      "a red ball", "the kayak", "a tunnel", "the wooden fence", "a dog",
      "the vehicle"};
  static const std::vector<std::string> kTails = {
      "", " in the water", " on the street", " near the house",
      " while people watch", " and then they go home"};
  return kSubjects[rng.UniformIndex(kSubjects.size())] + " " +
         kVerbs[rng.UniformIndex(kVerbs.size())] + " " +
         kObjects[rng.UniformIndex(kObjects.size())] +
         kTails[rng.UniformIndex(kTails.size())] + ".";
}

inline corpus::Video FixtureVideo(const std::string& id, std::size_t events,
                                  Rng& rng) {
  corpus::Video v;
  v.video_id = id;
  double t = 0.0;
  for (std::size_t k = 0; k < events; ++k) {
    const double len = 1.0 + rng.UniformDouble() * 9.0;
    v.events.push_back({t, t + len, FixtureSentence(rng)});
    t += len;
  }
  v.duration_s = t + 1.0;
  return v;
}

inline corpus::Dataset FixtureDataset(std::size_t n, std::uint64_t seed,
                                      std::size_t max_events = 6) {
  Rng rng(seed);
  corpus::Dataset d{"fixture", "val", {}};
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "vid%04zu", i);
    d.videos.push_back(FixtureVideo(id, 1 + rng.UniformIndex(max_events), rng));
  }
  return d;
}

}  // namespace divcap::testing

#endif  // DIVCAP_TESTS_FIXTURES_H_
