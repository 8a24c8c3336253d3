#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "protaudit/annotation.hpp"
#include "protaudit/protagonist.hpp"

namespace protaudit {

enum class SocialAxis { kPrAtt, kPrMe, kOtMePr, kPrMeOt, kPrMot };

inline constexpr std::array<SocialAxis, 5> kAllAxes = {SocialAxis::kPrAtt, SocialAxis::kPrMe,
                                                       SocialAxis::kOtMePr, SocialAxis::kPrMeOt,
                                                       SocialAxis::kPrMot};

// Commonsense relation types.
enum class Dimension { kXAttr, kXReact, kOReact, kXIntent, kXWant, kXNeed };

inline constexpr std::array<Dimension, 6> kAllDimensions = {
    Dimension::kXAttr,   Dimension::kXReact, Dimension::kOReact,
    Dimension::kXIntent, Dimension::kXWant,  Dimension::kXNeed};

std::string_view ToString(SocialAxis a);  // "PR_ATT", ...
std::string_view ToString(Dimension d);   // "xAttr", ...
std::optional<SocialAxis> ParseAxis(std::string_view s);
std::optional<Dimension> ParseDimension(std::string_view s);

struct AxisMapping {
  std::vector<Dimension> dimensions;
  Role role;  // sentences eligible for this axis
};

//   PR_ATT   -> xAttr                  on PROT_AGENT sentences
//   PR_ME    -> xReact                 on PROT_AGENT
//   OT_ME_PR -> oReact                 on PROT_AGENT
//   PR_ME_OT -> oReact                 on OTHER_AGENT
//   PR_MOT   -> xIntent, xWant, xNeed  on PROT_AGENT
AxisMapping AxisToDimensions(SocialAxis axis);

struct InferenceRequest {
  std::string sentence;
  Dimension dimension = Dimension::kXAttr;
  int beam_size = 5;
};

// Commonsense inference adapter. Id() and Version() together identify the
// model so cached output is never served across versions. MaxInputChars() of
// 0 means unlimited.
class InferenceBackend {
 public:
  virtual ~InferenceBackend() = default;
  virtual std::string Id() const = 0;
  virtual std::string Version() const = 0;
  virtual bool ThreadSafe() const { return true; }
  virtual std::size_t MaxInputChars() const { return 0; }
  virtual std::vector<std::string> Generate(const InferenceRequest& request) = 0;
};

// Deterministic backend driven by a fixture table:
//
//   {"backend_id": "stub", "backend_version": "fixture-1",
//    "exact":    {"xAttr": {"PersonX won the race.": ["competitive", "athletic"]}},
//    "keywords": {"xAttr": {"won": ["competitive"]}},
//    "default":  ["none"]}
//
// An exact sentence entry wins. Otherwise the phrases of every keyword that
// occurs as a lowercase token are concatenated in token order, deduplicated
// and cut to the beam size. Sentences matching nothing get "default".
class StubInferenceBackend final : public InferenceBackend {
 public:
  using Table = std::map<std::string, std::map<std::string, std::vector<std::string>>>;

  StubInferenceBackend(std::string id, std::string version, Table exact, Table keywords,
                       std::vector<std::string> fallback = {"none"});

  static std::unique_ptr<StubInferenceBackend> FromFile(const std::filesystem::path& path);

  std::string Id() const override { return id_; }
  std::string Version() const override { return version_; }
  std::vector<std::string> Generate(const InferenceRequest& request) override;

  std::size_t calls() const { return calls_.load(); }

 private:
  std::string id_;
  std::string version_;
  Table exact_;
  Table keywords_;
  std::vector<std::string> fallback_;
  std::atomic<std::size_t> calls_{0};
};

struct CacheKey {
  std::string sentence_sha256;
  Dimension dimension = Dimension::kXAttr;
  std::string backend_id;
  std::string backend_version;

  std::string Serialize() const;
  static CacheKey For(std::string_view sentence, Dimension dimension, const InferenceBackend& backend);
};

// Key-value store of backend output backed by an append-only JSONL journal.
// Reads may run concurrently; writes are serialized.
class InferenceCache {
 public:
  InferenceCache() = default;  // memory only
  explicit InferenceCache(std::filesystem::path journal);

  InferenceCache(const InferenceCache&) = delete;
  InferenceCache& operator=(const InferenceCache&) = delete;

  std::optional<std::vector<std::string>> Get(const CacheKey& key) const;
  void Put(const CacheKey& key, const std::vector<std::string>& phrases);

  // Rewrites the journal with one line per key in key order.
  void Compact();

  std::size_t size() const;
  std::size_t corrupt_lines() const { return corrupt_lines_; }

 private:
  struct Entry {
    CacheKey key;
    std::vector<std::string> phrases;
  };

  std::optional<std::filesystem::path> journal_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, Entry> entries_;
  std::size_t corrupt_lines_ = 0;
};

using WarningSink = std::function<void(const std::string&)>;

struct InferOptions {
  int beam_size = 5;
  WarningSink warn;
};

// Backend phrases for one sentence, served from `cache` when present. A
// sentence longer than the backend limit is cut at the last whitespace
// before the limit, with a warning. Non-BackendError failures are rethrown as
// retriable BackendError.
std::vector<std::string> Infer(std::string_view sentence, Dimension dimension, InferenceBackend& backend,
                               InferenceCache* cache, const InferOptions& options = {});

// Lowercases, splits on whitespace, trims surrounding punctuation (inner
// hyphens and apostrophes stay), and drops stopwords, placeholders and
// punctuation-only tokens. Order and multiplicity are preserved.
std::vector<std::string> NormalizePhrases(std::span<const std::string> phrases);

bool IsNoneSentinel(std::string_view phrase);

struct InferenceRecord {
  std::string story_id;
  std::size_t sentence_index = 0;
  SocialAxis axis = SocialAxis::kPrAtt;
  Dimension dimension = Dimension::kXAttr;
  std::vector<std::string> phrases;  // never contains "none"
  std::string backend_id;
  std::string backend_version;

  bool operator==(const InferenceRecord&) const = default;
};

struct StoryFailure {
  std::string story_id;
  std::string message;
};

struct PassOptions {
  int beam_size = 5;
  std::size_t threads = 1;
  WarningSink warn;
};

struct PassResult {
  std::vector<InferenceRecord> records;  // ordered by (story, sentence, axis, dimension)
  std::vector<StoryFailure> failures;
  std::size_t skipped_unresolved = 0;
  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;
};

// One record per (gendered story, axis, eligible sentence, dimension). A story
// whose backend calls fail contributes no records and is listed in
// `failures`; the pass continues with the remaining stories.
PassResult RunInferencePass(std::span<const AnonymizedStory> stories,
                            std::span<const ProtagonistAnnotation> annotations, InferenceBackend& backend,
                            InferenceCache& cache, const PassOptions& options = {});

}  // namespace protaudit
