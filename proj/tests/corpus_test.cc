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

#include "divcap/corpus.h"

#include <sstream>
#include <string>
#include <vector>

#include "divcap/error.h"
#include "divcap/rng.h"
#include "divcap/text.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace divcap::corpus {
namespace {

using ::divcap::testing::ScratchDir;

Video MakeVideo(const std::string& id, const std::vector<std::string>& captions,
                double step = 5.0) {
  Video v;
  v.video_id = id;
  for (std::size_t i = 0; i < captions.size(); ++i) {
    v.events.push_back({step * i, step * (i + 1), captions[i]});
  }
  v.duration_s = step * captions.size();
  return v;
}

std::string Words(std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += "w" + std::to_string(i);
  }
  return out;
}

TEST(ParseDatasetTest, MinimalRecord) {
  std::istringstream in(
      R"({"video_id":"v1","duration_s":10.0,"events":[{"start_s":0,"end_s":5,"caption":"a"},{"start_s":5,"end_s":10,"caption":"b"}]})"
      "\n");
  Dataset d = ParseDatasetStream(in);
  ASSERT_EQ(d.videos.size(), 1u);
  EXPECT_EQ(d.videos[0].video_id, "v1");
  EXPECT_EQ(d.videos[0].events.size(), 2u);
  EXPECT_EQ(d.videos[0].events[1].caption, "b");
  EXPECT_FALSE(d.videos[0].feature_ref.has_value());
}

TEST(ParseDatasetTest, EventsOutOfOrder) {
  std::istringstream in(
      R"({"video_id":"v1","duration_s":10.0,"events":[{"start_s":5,"end_s":10,"caption":"b"},{"start_s":0,"end_s":5,"caption":"a"}]})");
  try {
    ParseDatasetStream(in);
    FAIL() << "expected a violation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvariantViolation);
    EXPECT_EQ(e.subject(), "v1");
    EXPECT_NE(std::string(e.what()).find("sorted"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
}

TEST(ParseDatasetTest, DuplicateId) {
  std::istringstream in(
      R"({"video_id":"v7","duration_s":1,"events":[{"start_s":0,"end_s":1,"caption":"a"}]})"
      "\n"
      R"({"video_id":"v7","duration_s":1,"events":[{"start_s":0,"end_s":1,"caption":"b"}]})"
      "\n");
  EXPECT_DIVCAP_ERROR_SUBJECT(ParseDatasetStream(in), ErrorCode::kDuplicateId,
                              "v7");
}

TEST(ParseDatasetTest, MalformedLinesCarryLineNumbers) {
  const std::vector<std::string> bad = {
      "not json",
      R"({"video_id":"v1","duration_s":1})",
      R"({"video_id":"v1","duration_s":1,"events":[],"extra":1})",
      R"({"video_id":3,"duration_s":1,"events":[]})",
  };
  for (const auto& line : bad) {
    std::istringstream in("\n" + line + "\n");
    try {
      ParseDatasetStream(in);
      ADD_FAILURE() << line;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kMalformedLine) << line;
      EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos)
          << e.what();
    }
  }
}

TEST(ValidateVideoTest, EachRule) {
  auto expect_rule = [](const Video& v, const std::string& rule) {
    try {
      ValidateVideo(v);
      ADD_FAILURE() << rule;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvariantViolation);
      EXPECT_NE(std::string(e.what()).find(rule), std::string::npos)
          << e.what();
    }
  };
  Video v = MakeVideo("x", {"a", "b"});
  ValidateVideo(v);
  Video empty = v;
  empty.events.clear();
  expect_rule(empty, "events_nonempty");
  Video negative = v;
  negative.events[0].start_s = -1;
  expect_rule(negative, "nonnegative_start");
  Video inverted = v;
  inverted.events[0].end_s = 0;
  expect_rule(inverted, "start_before_end");
  Video blank = v;
  blank.events[1].caption = "  \t";
  expect_rule(blank, "caption_nonempty");
  Video overrun = v;
  overrun.duration_s = 9;
  expect_rule(overrun, "end_within_duration");
}

TEST(SerializeTest, RoundTripRandomDatasets) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Dataset d;
    const std::size_t n = 1 + rng.UniformIndex(6);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> caps;
      const std::size_t e = 1 + rng.UniformIndex(5);
      for (std::size_t k = 0; k < e; ++k) {
        caps.push_back("caption \"" + std::to_string(rng.Next()) + "\" ü\\");
      }
      Video v = MakeVideo("vid" + std::to_string(trial) + "_" +
                              std::to_string(i),
                          caps, 0.1 + rng.UniformDouble() * 10);
      if (rng.UniformIndex(2)) v.feature_ref = "row" + std::to_string(i);
      d.videos.push_back(v);
    }
    std::stringstream buf;
    WriteDataset(d, buf);
    EXPECT_EQ(ParseDatasetStream(buf), d);
  }
}

TEST(SerializeTest, FileRoundTrip) {
  ScratchDir dir;
  Dataset d{"anet", "val", {MakeVideo("a", {"x.", "y."})}};
  WriteDatasetFile(d, dir.File("d.jsonl"));
  EXPECT_EQ(ParseDataset(dir.File("d.jsonl"), "anet", "val"), d);
  EXPECT_DIVCAP_ERROR(ParseDataset(dir.File("missing.jsonl")), ErrorCode::kIo);
}

TEST(FullParagraphTest, TableOneKayakVideo) {
  Video v = MakeVideo("kayak",
                      {"People are sitting in kayaks paddling in the water.",
                       "They go under a rock and through a tunnel."});
  EXPECT_EQ(FullParagraph(v),
            "People are sitting in kayaks paddling in the water. They go "
            "under a rock and through a tunnel.");
  EXPECT_EQ(JoinEventRange(v, 1, 1),
            "They go under a rock and through a tunnel.");
}

TEST(FullParagraphTest, SingleEventIsIdentity) {
  EXPECT_EQ(FullParagraph(MakeVideo("a", {"x."})), "x.");
}

TEST(FullParagraphTest, FuzzedWhitespaceMatchesStringOracle) {
  Rng rng(11);
  const std::string pads[] = {"", " ", "  ", "\t", " \n "};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> raw, clean;
    const std::size_t e = 1 + rng.UniformIndex(6);
    for (std::size_t k = 0; k < e; ++k) {
      std::string core = "s" + std::to_string(trial) + " w" + std::to_string(k);
      clean.push_back(core);
      raw.push_back(pads[rng.UniformIndex(5)] + core + pads[rng.UniformIndex(5)]);
    }
    std::string expected;
    for (std::size_t k = 0; k < clean.size(); ++k) {
      if (k) expected += " ";
      expected += clean[k];
    }
    const std::string got = FullParagraph(MakeVideo("v", raw));
    EXPECT_EQ(got, expected);
    EXPECT_EQ(got.find("  "), std::string::npos);
  }
}

TEST(FullParagraphTest, WordCountIsSumOfSegments) {
  Video v = MakeVideo("v", {"a b c", " d  e ", "f"});
  std::size_t sum = 0;
  for (const auto& e : v.events) sum += CountWords(e.caption);
  EXPECT_EQ(CountWords(FullParagraph(v)), sum);
}

TEST(FilterOutliersTest, RemovesLongParagraph) {
  Dataset d{"d", "s", {MakeVideo("long", {Words(600)}),
                       MakeVideo("short", {Words(10)})}};
  FilterResult r = FilterOutliers(d, 512);
  ASSERT_EQ(r.removed, std::vector<std::string>{"long"});
  ASSERT_EQ(r.kept.videos.size(), 1u);
  EXPECT_EQ(r.kept.videos[0].video_id, "short");
}

TEST(FilterOutliersTest, UnchangedWhenAllFit) {
  Dataset d{"d", "s", {MakeVideo("a", {Words(5)}), MakeVideo("b", {Words(512)})}};
  FilterResult r = FilterOutliers(d);
  EXPECT_EQ(r.kept, d);
  EXPECT_TRUE(r.removed.empty());
}

TEST(FilterOutliersTest, MatchesBruteForceCounterAndIsIdempotent) {
  const std::size_t sizes[] = {10, 60, 50, 51, 3};
  Dataset d{"d", "s", {}};
  for (std::size_t i = 0; i < 5; ++i) {
    // Two segments so the count spans the join.
    const std::size_t half = sizes[i] / 2;
    d.videos.push_back(MakeVideo("v" + std::to_string(i),
                                 {Words(half), Words(sizes[i] - half)}));
  }
  std::vector<std::string> expected;
  for (const auto& v : d.videos) {
    std::size_t words = 0;
    bool in_word = false;
    for (const auto& e : v.events) {
      for (char c : e.caption + " ") {
        const bool space = c == ' ';
        if (!space && !in_word) ++words;
        in_word = !space;
      }
    }
    if (words > 50) expected.push_back(v.video_id);
  }
  FilterResult r = FilterOutliers(d, 50);
  EXPECT_EQ(r.removed, expected);
  EXPECT_EQ(r.removed, (std::vector<std::string>{"v1", "v3"}));
  FilterResult again = FilterOutliers(r.kept, 50);
  EXPECT_EQ(again.kept, r.kept);
  EXPECT_TRUE(again.removed.empty());
}

TEST(FindVideoTest, LooksUpById) {
  Dataset d{"d", "s", {MakeVideo("a", {"x"}), MakeVideo("b", {"y"})}};
  ASSERT_NE(FindVideo(d, "b"), nullptr);
  EXPECT_EQ(FindVideo(d, "b")->events[0].caption, "y");
  EXPECT_EQ(FindVideo(d, "c"), nullptr);
}

}  // namespace
}  // namespace divcap::corpus
