#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "protaudit/backends.hpp"
#include "protaudit/inference.hpp"
#include "protaudit/protagonist.hpp"
#include "protaudit/serialize.hpp"

namespace protaudit {

// Effective run settings. Relative paths in a config file resolve against the
// file's directory; paths given on the command line resolve against the
// working directory.
struct Config {
  std::uint64_t seed = 13;

  std::filesystem::path corpus_path;
  std::string corpus_format = "jsonl";
  std::optional<std::string> corpus_name;
  std::vector<std::string> abbreviations;  // added to the default list

  std::string coref_backend = "fallback";  // fallback | command
  std::vector<std::string> coref_command;
  std::string coref_id = "command-coref";
  std::string coref_version = "unversioned";
  int coref_timeout_seconds = 120;

  std::string inference_backend = "stub";  // stub | command
  std::filesystem::path inference_fixture;
  std::vector<std::string> inference_command;
  std::string inference_id = "command-inference";
  std::string inference_version = "unversioned";
  int inference_timeout_seconds = 60;
  std::size_t max_input_chars = 0;
  int beam_size = 5;
  std::size_t threads = 1;
  bool cache = true;

  std::filesystem::path embeddings;
  std::string embeddings_format = "text";
  std::vector<std::filesystem::path> appearance;
  std::vector<std::filesystem::path> intellect;
  std::vector<std::filesystem::path> power_strong;
  std::vector<std::filesystem::path> power_weak;
  std::filesystem::path affect;
  std::filesystem::path categories;

  std::string pooling = "story";       // story | token
  std::string probe_unit = "sentence";  // sentence | story

  SplitterOptions Splitter() const;

  // Settings with every path reduced to its file name, for the config digest.
  Json Canonical() const;
};

// A "section.key=value" override. The value is read as a TOML value when it
// parses as one and as a bare string otherwise.
struct Override {
  std::string key;
  std::string value;
};

// Defaults, then the TOML file (when given), then overrides in order. Throws
// ValidationError for unknown keys and ill-typed values.
Config LoadConfig(const std::optional<std::filesystem::path>& file, const std::vector<Override>& overrides);

inline constexpr std::array<const char*, 7> kStages = {"ingest", "annotate", "infer", "score",
                                                       "regress", "probe",    "report"};

// Exclusive handle on a workspace directory. The lock file is created with
// O_EXCL and removed on destruction.
class Workspace {
 public:
  explicit Workspace(std::filesystem::path dir);
  ~Workspace();
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path Path(const std::string& name) const { return dir_ / name; }

  Json& manifest() { return manifest_; }
  const Json& manifest() const { return manifest_; }

  bool StageComplete(const std::string& stage) const;

  // Throws StageOrderError("run `audit <stage>` first") unless the stage
  // completed and its artifacts are still present.
  void Require(const std::string& stage) const;

  // Records artifact digests and a timestamp, and forgets every stage that
  // depends on this one.
  void Complete(const std::string& stage, const std::vector<std::string>& artifacts);

  // The manifest as embedded in reports: no timestamps and no entry for the
  // report stage itself.
  Json ReportManifest() const;

  void Save() const;

 private:
  std::filesystem::path dir_;
  std::filesystem::path lock_;
  Json manifest_;
};

std::unique_ptr<CorefBackend> MakeCorefBackend(const Config& config);
std::unique_ptr<InferenceBackend> MakeInferenceBackend(const Config& config);

struct StageContext {
  const Config& config;
  Workspace& workspace;
  std::ostream& log;
};

// Each stage reads earlier artifacts from the workspace and writes its own.
// Return values are process exit codes; errors are thrown.
int RunIngest(StageContext& ctx);
int RunAnnotate(StageContext& ctx);
int RunInfer(StageContext& ctx);  // 2 when any story failed
int RunScore(StageContext& ctx);
int RunRegress(StageContext& ctx);
int RunProbe(StageContext& ctx);
int RunReport(StageContext& ctx);
int RunAll(StageContext& ctx);

}  // namespace protaudit
