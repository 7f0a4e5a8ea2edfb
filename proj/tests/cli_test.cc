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

// End-to-end runs of the divcap binary.

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "divcap/corpus.h"
#include "divcap/embeddings.h"
#include "divcap/pool.h"
#include "divcap/survey.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "survey_fixtures.h"
#include "test_util.h"

namespace divcap {
namespace {

using nlohmann::json;
using testing::ReadFile;
using testing::ScratchDir;

// Runs the CLI with `args`; stdout goes to `out`, stderr to `out`.err.
int Divcap(const std::string& args, const std::string& out) {
  const std::string cmd = std::string("'") + DIVCAP_CLI + "' " + args + " >'" +
                          out + "' 2>'" + out + ".err'";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

TEST(CliTest, CorpusValidateSummarizesAndFlagsViolations) {
  ScratchDir dir;
  corpus::WriteDatasetFile(testing::FixtureDataset(12, 3), dir.File("ok.jsonl"));
  ASSERT_EQ(Divcap("corpus validate --input " + dir.File("ok.jsonl"),
                   dir.File("ok.out")),
            0);
  const json summary = json::parse(ReadFile(dir.File("ok.out")));
  EXPECT_TRUE(summary["valid"].get<bool>());
  EXPECT_EQ(summary["videos"].get<int>(), 12);

  std::ofstream(dir.File("bad.jsonl"))
      << R"({"video_id":"a","duration_s":10,"events":[{"start_s":4,"end_s":2,"caption":"x."}]})"
      << "\n";
  EXPECT_EQ(Divcap("corpus validate --input " + dir.File("bad.jsonl"),
                   dir.File("bad.out")),
            2);
  EXPECT_FALSE(json::parse(ReadFile(dir.File("bad.out")))["valid"].get<bool>());
}

TEST(CliTest, ApiKeyIsNotAcceptedAsAFlag) {
  ScratchDir dir;
  EXPECT_NE(Divcap("augment --input x --output y --api-key secret", dir.File("o")), 0);
  Divcap("augment --help", dir.File("help"));
  const std::string help = ReadFile(dir.File("help"));
  EXPECT_NE(help.find("--api-key-env"), std::string::npos);
  EXPECT_EQ(help.find("--api-key "), std::string::npos);
}

TEST(CliTest, MockAugmentThenStats) {
  ScratchDir dir;
  corpus::WriteDatasetFile(testing::FixtureDataset(10, 4), dir.File("d.jsonl"));
  ASSERT_EQ(Divcap("augment --backend mock --seed 2 --input " + dir.File("d.jsonl") +
                       " --output " + dir.File("p.jsonl"),
                   dir.File("aug.out")),
            0)
      << ReadFile(dir.File("aug.out.err"));
  EXPECT_EQ(augment::ReadPools(dir.File("p.jsonl")).size(), 10u);
  ASSERT_EQ(Divcap("stats --pools " + dir.File("p.jsonl") + " --source " +
                       dir.File("d.jsonl") + " --out " + dir.File("s.json"),
                   dir.File("stats.out")),
            0);
  EXPECT_TRUE(json::parse(ReadFile(dir.File("s.json"))).contains("columns"));
}

TEST(CliTest, SyntheticTrainEncodeEvalChart) {
  ScratchDir dir;
  std::ofstream(dir.File("spec.toml")) << "topics = 3\nvideos_per_topic = 8\n";
  std::ofstream(dir.File("train.toml")) << "epochs = 2\nbatch_n = 8\n";
  const std::string syn = dir.File("syn");
  ASSERT_EQ(Divcap("synth --seed 5 --spec " + dir.File("spec.toml") + " --out-dir " + syn,
                   dir.File("synth.out")),
            0)
      << ReadFile(dir.File("synth.out.err"));
  const std::string data = " --corpus " + syn + "/dataset.jsonl --pools " + syn +
                           "/pools.jsonl --video-emb " + syn + "/video.dvec";
  ASSERT_EQ(Divcap("train --config " + dir.File("train.toml") + data + " --out " +
                       dir.File("p.bin") + " --history " + dir.File("h.json"),
                   dir.File("train.out")),
            0)
      << ReadFile(dir.File("train.out.err"));
  ASSERT_EQ(Divcap("encode --config " + dir.File("train.toml") + data + " --params " +
                       dir.File("p.bin") + " --text-out " + dir.File("t.dvec") +
                       " --video-out " + dir.File("v.dvec"),
                   dir.File("enc.out")),
            0)
      << ReadFile(dir.File("enc.out.err"));
  ASSERT_EQ(Divcap("eval --dual-softmax --dataset syn --text-emb " + dir.File("t.dvec") +
                       " --video-emb " + dir.File("v.dvec") + " --pools " + syn +
                       "/pools.jsonl --report " + dir.File("r.json"),
                   dir.File("eval.out")),
            0)
      << ReadFile(dir.File("eval.out.err"));
  const json report = json::parse(ReadFile(dir.File("r.json")));
  EXPECT_TRUE(report.contains("groups"));
  ASSERT_EQ(Divcap("chart overlap --reports " + dir.File("r.json"), dir.File("ov.out")),
            0);
  const json overlap = json::parse(ReadFile(dir.File("ov.out")));
  EXPECT_EQ(overlap["series"][0]["videos"].get<int>(), 24);
  ASSERT_EQ(Divcap("chart deltas --reports " + dir.File("r.json"), dir.File("dl.out")),
            0);
}

TEST(CliTest, SurveyMakeAndAggregateMatchTheLibrary) {
  ScratchDir dir;
  const testing::SurveyFixture f = testing::MakeSurveyFixture(150);
  corpus::WriteDatasetFile(f.dataset, dir.File("d.jsonl"));
  augment::WritePools(f.pools, dir.File("p.jsonl"));
  SaveDvec(f.embeddings, dir.File("gt.dvec"));
  ASSERT_EQ(Divcap("survey make --versions 5 --seed 1 --corpus " + dir.File("d.jsonl") +
                       " --pools " + dir.File("p.jsonl") + " --gt-emb " +
                       dir.File("gt.dvec") + " --out-dir " + dir.File("surveys") +
                       " --keys-dir " + dir.File("keys"),
                   dir.File("make.out")),
            0)
      << ReadFile(dir.File("make.out.err"));
  const auto docs = survey::LoadSurveys(dir.File("surveys"), dir.File("keys"));
  ASSERT_EQ(docs.size(), 5u);

  Rng rng(9);
  std::ofstream log(dir.File("r.jsonl"));
  for (const auto& doc : docs) {
    for (const char* annotator : {"a1", "a2", "a3"}) {
      for (const auto& item : doc.items) {
        log << testing::ScriptedResponse(annotator, doc.version_id, item, rng).dump()
            << "\n";
      }
    }
  }
  log.close();
  ASSERT_EQ(Divcap("survey aggregate --responses " + dir.File("r.jsonl") +
                       " --surveys " + dir.File("surveys") + " --keys " +
                       dir.File("keys") + " --out " + dir.File("agg.json"),
                   dir.File("agg.out")),
            0)
      << ReadFile(dir.File("agg.out.err"));
  const std::string expected = survey::ReportText(
      survey::Aggregate(survey::ReadResponses(dir.File("r.jsonl"), docs), docs));
  EXPECT_EQ(ReadFile(dir.File("agg.json")), expected);
}

TEST(CliTest, LibraryErrorsExitNonZeroWithAMessage) {
  ScratchDir dir;
  EXPECT_EQ(Divcap("stats --pools /nonexistent --source /nonexistent", dir.File("o")), 1);
  EXPECT_NE(ReadFile(dir.File("o.err")).find("divcap:"), std::string::npos);
}

}  // namespace
}  // namespace divcap
