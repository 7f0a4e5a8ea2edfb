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

// divcap: command-line front end for the caption-diversity toolkit.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "divcap/backend.h"
#include "divcap/corpus.h"
#include "divcap/embeddings.h"
#include "divcap/error.h"
#include "divcap/pipeline.h"
#include "divcap/pool.h"
#include "divcap/retrieval.h"
#include "divcap/service.h"
#include "divcap/survey.h"
#include "divcap/sweep.h"
#include "divcap/synthetic.h"
#include "divcap/text.h"
#include "divcap/textstats.h"
#include "divcap/train.h"
#include "json.hpp"

namespace {

using nlohmann::json;
using namespace divcap;

// Exit status for input that parses but breaks a dataset invariant.
constexpr int kExitViolation = 2;

void Emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, path, "cannot write " + path);
}

void EmitJson(const json& j, const std::string& path) {
  Emit(j.dump(2) + "\n", path);
}

json ReadJson(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, path, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedLine, path, path + ": " + e.what());
  }
}

const textstats::PosLexicon& Lexicon(const std::string& path,
                                     textstats::PosLexicon* storage) {
  if (path.empty()) return textstats::PosLexicon::Bundled();
  *storage = textstats::PosLexicon::LoadTsv(path);
  return *storage;
}

// ---------------------------------------------------------------- corpus

struct CorpusArgs {
  std::string input;
  std::size_t max_words = corpus::kDefaultMaxWords;
};

int RunCorpusValidate(const CorpusArgs& a) {
  corpus::Dataset dataset;
  try {
    dataset = corpus::ParseDataset(a.input);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    EmitJson({{"valid", false},
              {"code", std::string(ErrorCodeName(e.code()))},
              {"subject", e.subject()},
              {"error", e.what()}},
             "");
    return kExitViolation;
  }
  std::size_t events = 0, words = 0, longest = 0;
  for (const corpus::Video& v : dataset.videos) {
    events += v.events.size();
    const std::size_t n = CountWords(corpus::FullParagraph(v));
    words += n;
    longest = std::max(longest, n);
  }
  const corpus::FilterResult filtered = corpus::FilterOutliers(dataset, a.max_words);
  const double nv = static_cast<double>(std::max<std::size_t>(dataset.videos.size(), 1));
  EmitJson({{"valid", true},
            {"videos", dataset.videos.size()},
            {"events", events},
            {"mean_paragraph_words", static_cast<double>(words) / nv},
            {"max_paragraph_words", longest},
            {"max_words", a.max_words},
            {"over_max_words", filtered.removed}},
           "");
  return 0;
}

// ---------------------------------------------------------------- augment

struct AugmentArgs {
  std::string input, output, backend = "mock", checkpoint, errors;
  augment::BackendConfig config;
  std::uint64_t seed = 0;
  std::size_t min_target = augment::kDefaultMinTarget;
};

int RunAugment(const AugmentArgs& a) {
  const corpus::Dataset dataset = corpus::ParseDataset(a.input);
  augment::PipelineOptions options;
  options.out_path = a.output;
  options.checkpoint_path = a.checkpoint;
  options.errors_path = a.errors;
  options.seed = a.seed;
  options.max_in_flight = a.config.max_in_flight;
  options.retry = augment::RetryPolicyFrom(a.config);
  options.min_target = a.min_target;

  augment::PipelineReport report;
  if (a.backend == "mock") {
    augment::MockBackend backend;
    report = augment::RunPipeline(dataset, backend, options);
  } else {
    augment::ValidateBackendConfig(a.config);
    if (std::getenv(a.config.api_key_env.c_str()) == nullptr) {
      std::cerr << "divcap augment: warning: $" << a.config.api_key_env
                << " is not set; requests go out without credentials\n";
    }
    augment::ChatCompletionBackend backend(a.config);
    report = augment::RunPipeline(dataset, backend, options);
  }
  EmitJson({{"videos", report.total},
            {"resumed", report.resumed},
            {"generated", report.generated},
            {"failed", report.failed},
            {"output", a.output}},
           "");
  return report.failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------- stats

struct StatsArgs {
  std::string pools, source, tagger, out;
};

int RunStats(const StatsArgs& a) {
  textstats::PosLexicon storage;
  const auto& lexicon = Lexicon(a.tagger, &storage);
  const auto report = textstats::ComputeDeltaReport(
      augment::ReadPools(a.pools), corpus::ParseDataset(a.source), lexicon);
  EmitJson(textstats::DeltaReportToJson(report), a.out);
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string text_emb, video_emb, pools, report, dataset, model;
  bool dual_softmax = false;
  double lambda = retrieval::kDefaultDualSoftmaxLambda;
};

int RunEval(const EvalArgs& a) {
  std::vector<std::string> ids;
  for (const auto& pool : augment::ReadPools(a.pools)) ids.push_back(pool.video_id);
  retrieval::EvalOptions options;
  options.dual_softmax = a.dual_softmax;
  options.lambda = a.lambda;
  options.dataset = a.dataset;
  options.model = a.model;
  const auto report = retrieval::Evaluate(LoadEmbeddings(a.text_emb),
                                          LoadEmbeddings(a.video_emb), ids, options);
  EmitJson(retrieval::EvalReportToJson(report), a.report);
  return 0;
}

struct ChartArgs {
  std::vector<std::string> reports;
  std::string out;
};

int RunChartDeltas(const ChartArgs& a) {
  std::vector<retrieval::DatasetRecall> recalls;
  for (const auto& path : a.reports) {
    recalls.push_back(retrieval::DatasetRecallFromJson(ReadJson(path)));
  }
  EmitJson(retrieval::DeltaChartToJson(retrieval::DeltaChart(recalls)), a.out);
  return 0;
}

int RunChartOverlap(const ChartArgs& a) {
  json series = json::array();
  for (const auto& path : a.reports) {
    const json report = ReadJson(path);
    std::vector<std::set<std::string>> sets;
    std::set<std::string> universe;
    retrieval::Rank1SetsFromJson(report, &sets, &universe);
    json entry = retrieval::OverlapToJson(retrieval::OverlapHistogram(
        sets, std::vector<std::string>(universe.begin(), universe.end())));
    entry["report"] = path;
    entry["dataset"] = report.value("dataset", "");
    entry["model"] = report.value("model", "");
    series.push_back(entry);
  }
  EmitJson({{"series", series}}, a.out);
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string config, corpus, pools, video_emb, out, history;
  std::size_t workers = 0;
};

train::TrainConfig LoadConfigOrDefault(const std::string& path) {
  return path.empty() ? train::TrainConfig{} : train::LoadTrainConfig(path);
}

int RunTrain(const TrainArgs& a) {
  train::TrainConfig config = LoadConfigOrDefault(a.config);
  if (a.workers > 0) config.workers = a.workers;
  const corpus::Dataset dataset = corpus::ParseDataset(a.corpus);
  const auto examples = train::PrepareExamples(
      dataset, augment::ReadPools(a.pools), LoadEmbeddings(a.video_emb), config);
  const train::FitResult fit = train::Fit(examples, config);
  train::SaveParams(fit.params, a.out);
  const json history = train::HistoryToJson(fit.history, config);
  if (!a.history.empty()) EmitJson(history, a.history);
  const auto& last = fit.history.back();
  std::cerr << "divcap train: " << fit.history.size() << " epochs, final L="
            << last.loss << "\n";
  return 0;
}

struct EncodeArgs {
  std::string config, params, corpus, pools, video_emb, text_out, video_out;
};

int RunEncode(const EncodeArgs& a) {
  const train::TrainConfig config = LoadConfigOrDefault(a.config);
  const auto encoded = train::EncodeCorpus(
      train::LoadParams(a.params), config, corpus::ParseDataset(a.corpus),
      augment::ReadPools(a.pools), LoadEmbeddings(a.video_emb));
  SaveDvec(encoded.text, a.text_out);
  SaveDvec(encoded.video, a.video_out);
  return 0;
}

struct SynthArgs {
  std::string spec, out_dir;
  std::uint64_t seed = 0;
};

int RunSynth(const SynthArgs& a) {
  const train::SyntheticSpec spec =
      a.spec.empty() ? train::SyntheticSpec{} : train::LoadSyntheticSpec(a.spec);
  train::WriteSynthetic(train::GenerateSynthetic(spec, a.seed), a.out_dir);
  return 0;
}

struct SweepArgs {
  std::string grid, out;
};

int RunSweep(const SweepArgs& a) {
  const train::SweepGrid grid = train::LoadSweepGrid(a.grid);
  const json table = train::RunSweep(grid, [](std::size_t done, std::size_t total) {
    std::cerr << "divcap sweep: " << done << "/" << total << " cells\n";
  });
  EmitJson(table, a.out);
  return 0;
}

// ---------------------------------------------------------------- survey

struct SurveyMakeArgs {
  std::string corpus, pools, gt_emb, tagger, out_dir, keys_dir;
  survey::MakeOptions options;
};

int RunSurveyMake(const SurveyMakeArgs& a) {
  textstats::PosLexicon storage;
  const auto docs = survey::MakeSurveys(
      corpus::ParseDataset(a.corpus), augment::ReadPools(a.pools),
      LoadEmbeddings(a.gt_emb), Lexicon(a.tagger, &storage), a.options);
  survey::WriteSurveys(docs, a.out_dir, a.keys_dir);
  EmitJson({{"versions", docs.size()},
            {"items", docs.size() * survey::kItemsPerVersion},
            {"surveys", a.out_dir},
            {"keys", a.keys_dir}},
           "");
  return 0;
}

struct SurveyAggregateArgs {
  std::string responses, surveys, keys, out;
};

int RunSurveyAggregate(const SurveyAggregateArgs& a) {
  const auto docs = survey::LoadSurveys(a.surveys, a.keys);
  Emit(survey::ReportText(
           survey::Aggregate(survey::ReadResponses(a.responses, docs), docs)),
       a.out);
  return 0;
}

struct ServeArgs {
  service::ServiceOptions options;
  std::string host = "127.0.0.1";
  int port = 8080;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"divcap: caption diversity toolkit"};
  app.require_subcommand(1);
  int status = 0;

  // corpus
  CorpusArgs corpus_args;
  auto* corpus_cmd = app.add_subcommand("corpus", "Dataset utilities");
  corpus_cmd->require_subcommand(1);
  auto* validate = corpus_cmd->add_subcommand("validate", "Check a dataset JSONL file");
  validate->add_option("--input", corpus_args.input, "Dataset JSONL")->required();
  validate->add_option("--max-words", corpus_args.max_words,
                       "Paragraph length above which videos are reported");
  validate->callback([&] { status = RunCorpusValidate(corpus_args); });

  // augment
  AugmentArgs aug;
  auto* augment_cmd = app.add_subcommand("augment", "Generate caption pools");
  augment_cmd->add_option("--input", aug.input, "Dataset JSONL")->required();
  augment_cmd->add_option("--output", aug.output, "Pool JSONL to write")->required();
  augment_cmd->add_option("--backend", aug.backend, "api or mock")
      ->check(CLI::IsMember({"api", "mock"}));
  augment_cmd->add_option("--endpoint", aug.config.endpoint,
                          "Chat-completions URL (api backend)");
  augment_cmd->add_option("--model", aug.config.model_name, "Model name (api backend)");
  augment_cmd->add_option("--api-key-env", aug.config.api_key_env,
                          "Environment variable holding the API key");
  augment_cmd->add_option("--seed", aug.seed, "Seed for duration subsets");
  augment_cmd->add_option("--retries", aug.config.retries, "Retries per prompt");
  augment_cmd->add_option("--in-flight", aug.config.max_in_flight,
                          "Concurrent videos");
  augment_cmd->add_option("--timeout", aug.config.timeout_s, "Request timeout, seconds");
  augment_cmd->add_option("--checkpoint", aug.checkpoint, "Resumable checkpoint JSONL");
  augment_cmd->add_option("--errors", aug.errors, "Per-video failure JSONL");
  augment_cmd->add_option("--min-target", aug.min_target,
                          "Smallest summary word target");
  augment_cmd->callback([&] { status = RunAugment(aug); });

  // stats
  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Noun/verb deltas per caption kind");
  stats_cmd->add_option("--pools", stats.pools, "Pool JSONL")->required();
  stats_cmd->add_option("--source", stats.source, "Dataset JSONL")->required();
  stats_cmd->add_option("--tagger", stats.tagger, "Lexicon TSV (default: bundled)");
  stats_cmd->add_option("--out", stats.out, "Output JSON (default: stdout)");
  stats_cmd->callback([&] { status = RunStats(stats); });

  // eval
  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Text-to-video retrieval metrics");
  eval_cmd->add_option("--text-emb", eval.text_emb, "Caption embeddings (vid#kind)")
      ->required();
  eval_cmd->add_option("--video-emb", eval.video_emb, "Video embeddings")->required();
  eval_cmd->add_option("--pools", eval.pools, "Pool JSONL naming the videos")->required();
  eval_cmd->add_flag("--dual-softmax", eval.dual_softmax, "Rerank with dual softmax");
  eval_cmd->add_option("--lambda", eval.lambda, "Dual softmax inverse temperature");
  eval_cmd->add_option("--dataset", eval.dataset, "Dataset label for the report");
  eval_cmd->add_option("--model", eval.model, "Model label for the report");
  eval_cmd->add_option("--report", eval.report, "Output JSON (default: stdout)");
  eval_cmd->callback([&] { status = RunEval(eval); });

  // chart
  ChartArgs chart;
  auto* chart_cmd = app.add_subcommand("chart", "Figure data from eval reports");
  chart_cmd->require_subcommand(1);
  for (const char* name : {"deltas", "overlap"}) {
    auto* sub = chart_cmd->add_subcommand(
        name, std::string(name) == "deltas"
                  ? "Relative R@1 change of each kind versus f"
                  : "How many kinds retrieve each video first");
    sub->add_option("--reports", chart.reports, "Eval report JSON files")
        ->required()
        ->expected(1, -1);
    sub->add_option("--out", chart.out, "Output JSON (default: stdout)");
    const bool deltas = std::string(name) == "deltas";
    sub->callback([&, deltas] {
      status = deltas ? RunChartDeltas(chart) : RunChartOverlap(chart);
    });
  }

  // train / encode / synth / sweep
  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Fit the dual encoder");
  train_cmd->add_option("--config", tr.config, "Train config TOML");
  train_cmd->add_option("--corpus", tr.corpus, "Dataset JSONL")->required();
  train_cmd->add_option("--pools", tr.pools, "Pool JSONL")->required();
  train_cmd->add_option("--video-emb", tr.video_emb, "Video features")->required();
  train_cmd->add_option("--out", tr.out, "Params file to write")->required();
  train_cmd->add_option("--history", tr.history, "Per-epoch loss JSON");
  train_cmd->add_option("--workers", tr.workers, "Threads (overrides config)");
  train_cmd->callback([&] { status = RunTrain(tr); });

  EncodeArgs enc;
  auto* encode_cmd = app.add_subcommand("encode", "Embed captions and videos with trained params");
  encode_cmd->add_option("--config", enc.config, "Train config TOML used for training");
  encode_cmd->add_option("--params", enc.params, "Params file")->required();
  encode_cmd->add_option("--corpus", enc.corpus, "Dataset JSONL")->required();
  encode_cmd->add_option("--pools", enc.pools, "Pool JSONL")->required();
  encode_cmd->add_option("--video-emb", enc.video_emb, "Video features")->required();
  encode_cmd->add_option("--text-out", enc.text_out, "Caption embeddings DVEC")->required();
  encode_cmd->add_option("--video-out", enc.video_out, "Video embeddings DVEC")->required();
  encode_cmd->callback([&] { status = RunEncode(enc); });

  SynthArgs syn;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic corpus");
  synth_cmd->add_option("--spec", syn.spec, "Synthetic spec TOML");
  synth_cmd->add_option("--seed", syn.seed, "Video seed");
  synth_cmd->add_option("--out-dir", syn.out_dir, "Output directory")->required();
  synth_cmd->callback([&] { status = RunSynth(syn); });

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Ablation grid on synthetic data");
  sweep_cmd->add_option("--grid", sw.grid, "Grid TOML")->required();
  sweep_cmd->add_option("--out", sw.out, "Output JSON (default: stdout)");
  sweep_cmd->callback([&] { status = RunSweep(sw); });

  // survey
  auto* survey_cmd = app.add_subcommand("survey", "Annotator study");
  survey_cmd->require_subcommand(1);
  SurveyMakeArgs mk;
  auto* make = survey_cmd->add_subcommand("make", "Build survey versions");
  make->add_option("--versions", mk.options.versions, "Number of versions");
  make->add_option("--seed", mk.options.seed, "Sampling seed");
  make->add_option("--corpus", mk.corpus, "Dataset JSONL")->required();
  make->add_option("--pools", mk.pools, "Pool JSONL")->required();
  make->add_option("--gt-emb", mk.gt_emb, "Paragraph embeddings keyed by video id")
      ->required();
  make->add_option("--tagger", mk.tagger, "Lexicon TSV (default: bundled)");
  make->add_option("--out-dir", mk.out_dir, "Public survey directory")->required();
  make->add_option("--keys-dir", mk.keys_dir, "Private key directory")->required();
  make->callback([&] { status = RunSurveyMake(mk); });

  SurveyAggregateArgs ag;
  auto* aggregate = survey_cmd->add_subcommand("aggregate", "Agreement report");
  aggregate->add_option("--responses", ag.responses, "Responses JSONL")->required();
  aggregate->add_option("--surveys", ag.surveys, "Public survey directory")->required();
  aggregate->add_option("--keys", ag.keys, "Private key directory")->required();
  aggregate->add_option("--out", ag.out, "Output JSON (default: stdout)");
  aggregate->callback([&] { status = RunSurveyAggregate(ag); });

  // serve
  ServeArgs sv;
  auto* serve = app.add_subcommand("serve", "Survey HTTP API");
  serve->add_option("--host", sv.host, "Bind address");
  serve->add_option("--port", sv.port, "Port");
  serve->add_option("--surveys", sv.options.survey_dir, "Public survey directory")
      ->required();
  serve->add_option("--keys", sv.options.key_dir,
                    "Private key directory (enables /api/aggregate)");
  serve->add_option("--log", sv.options.log_path, "Responses JSONL")->required();
  serve->add_option("--static", sv.options.static_dir, "Static files served at /");
  serve->callback([&] { service::Serve(sv.options, sv.host, sv.port); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "divcap: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "divcap: " << e.what() << "\n";
    return 1;
  }
  return status;
}
