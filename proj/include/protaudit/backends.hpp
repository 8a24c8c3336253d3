#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "protaudit/inference.hpp"
#include "protaudit/protagonist.hpp"

namespace protaudit {

// Runs argv[0] with `input` on stdin and returns its stdout. A spawn failure,
// a non-zero exit or a timeout raises a retriable BackendError.
std::string RunCommand(const std::vector<std::string>& argv, const std::string& input,
                       std::chrono::milliseconds timeout);

// One process per request. The request is a JSON line
//   {"sentence": "...", "dimension": "xAttr", "beam_size": 5}
// and the process prints {"phrases": ["..."]}.
class CommandInferenceBackend final : public InferenceBackend {
 public:
  CommandInferenceBackend(std::vector<std::string> argv, std::string id, std::string version,
                          std::chrono::milliseconds timeout = std::chrono::seconds(60),
                          std::size_t max_input_chars = 0);

  std::string Id() const override { return id_; }
  std::string Version() const override { return version_; }
  std::size_t MaxInputChars() const override { return max_input_chars_; }
  std::vector<std::string> Generate(const InferenceRequest& request) override;

 private:
  std::vector<std::string> argv_;
  std::string id_;
  std::string version_;
  std::chrono::milliseconds timeout_;
  std::size_t max_input_chars_;
};

// One process per story. The request is a JSON line
//   {"story_id": "...", "text": "...", "sentence_offsets": [[0, 9], ...]}
// and the process prints {"clusters": [[[sentence, start, end], ...], ...]}
// with offsets relative to each sentence.
class CommandCorefBackend final : public CorefBackend {
 public:
  CommandCorefBackend(std::vector<std::string> argv, std::string id, std::string version,
                      std::chrono::milliseconds timeout = std::chrono::seconds(120));

  std::string Id() const override { return id_; }
  std::string Version() const override { return version_; }
  std::vector<std::vector<CorefSpan>> Resolve(const CorefRequest& request) override;

 private:
  std::vector<std::string> argv_;
  std::string id_;
  std::string version_;
  std::chrono::milliseconds timeout_;
};

}  // namespace protaudit
