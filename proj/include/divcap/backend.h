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

#ifndef DIVCAP_BACKEND_H_
#define DIVCAP_BACKEND_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace divcap::augment {

// A text-completion service. Implementations throw Error(kTransport) when a
// request cannot be completed; callers retry.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  virtual std::string Complete(const std::string& prompt,
                               std::uint64_t seed) = 0;
};

struct BackendConfig {
  std::string endpoint;  // full URL of the chat-completions route
  std::string model_name;
  std::string api_key_env = "DIVCAP_API_KEY";
  std::size_t max_in_flight = 4;
  std::size_t retries = 3;
  double timeout_s = 60.0;
  double initial_backoff_s = 1.0;
  double max_backoff_s = 30.0;
};

// Throws Error(kInvalidArgument) when the config breaks its invariants.
void ValidateBackendConfig(const BackendConfig& config);

// Chat-completion style HTTP client: POSTs {"model", "messages", "seed",
// "temperature"} and reads choices[0].message.content.
class ChatCompletionBackend : public Backend {
 public:
  explicit ChatCompletionBackend(BackendConfig config);
  std::string id() const override;
  std::string Complete(const std::string& prompt, std::uint64_t seed) override;

 private:
  BackendConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

enum class ReadingLevel { kElementary, kIntermediate, kUniversity };

// Word-by-word rewrite using the bundled synonym tables: elementary maps long
// words to short synonyms, university maps short words to long ones,
// intermediate leaves the text alone. Punctuation and leading capitals are
// preserved.
std::string RewriteForLevel(std::string_view text, ReadingLevel level);

// True when the word (case-insensitive, punctuation stripped) has an entry in
// either synonym table.
bool HasSynonym(std::string_view word);

// First n whitespace words of the text, cycling when the text is shorter,
// with the final word's trailing punctuation replaced by a period.
std::string ExtractiveSummary(std::string_view text, std::size_t n);

// Deterministic offline stand-in for a language model. Summaries are
// extractive, simplifications use RewriteForLevel. The seed only varies the
// response layout (label order and markdown decoration), never the content.
class MockBackend : public Backend {
 public:
  std::string id() const override { return "mock"; }
  std::string Complete(const std::string& prompt, std::uint64_t seed) override;
};

}  // namespace divcap::augment

#endif  // DIVCAP_BACKEND_H_
