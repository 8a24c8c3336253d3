#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "protaudit/annotation.hpp"
#include "protaudit/corpus.hpp"

namespace protaudit {

enum class MentionKind { kName, kPronoun, kNominal };

std::string_view ToString(MentionKind k);

struct Mention {
  std::size_t sentence_index = 0;
  std::size_t char_start = 0;  // into the sentence text
  std::size_t char_end = 0;
  std::string surface;
  MentionKind kind = MentionKind::kNominal;

  bool operator==(const Mention&) const = default;
};

// Mentions sorted by (sentence_index, char_start) and pairwise disjoint.
struct MentionCluster {
  int cluster_id = 0;
  std::vector<Mention> mentions;

  bool operator==(const MentionCluster&) const = default;
};

struct AnonymizedStory {
  std::string story_id;
  std::vector<Sentence> sentences;
  std::map<int, std::string> placeholder_map;  // cluster_id -> placeholder

  // The anonymized text as a Story carrying the original's title and source.
  Story ToStory(const Story& original) const;
};

// Span produced by a coreference backend.
struct CorefSpan {
  std::size_t sentence_index = 0;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
};

struct CorefRequest {
  std::string story_id;
  std::string text;  // sentences joined by single spaces
  // [begin, end) of each sentence inside `text`.
  std::vector<std::pair<std::size_t, std::size_t>> sentence_offsets;
};

// Backend adapters return one span list per character cluster. Adapters that
// cannot be called concurrently return false from ThreadSafe().
class CorefBackend {
 public:
  virtual ~CorefBackend() = default;
  virtual std::string Id() const = 0;
  virtual std::string Version() const = 0;
  virtual bool ThreadSafe() const { return true; }
  virtual std::vector<std::vector<CorefSpan>> Resolve(const CorefRequest& request) = 0;
};

// Rule-based resolver used for tests and offline runs.
//
// Names are capitalized alphanumeric tokens outside a fixed list of
// capitalized function words; adjacent name tokens (and an optional leading
// honorific such as "Mr.") form one mention, and identical surfaces form one
// cluster. A third-person gendered pronoun links to the earliest name of the
// nearest sentence (the current one first, names before the pronoun only)
// whose cluster has no pronoun of the other gender; failing that, to the
// earliest name of the nearest sentence holding names; failing that, to the
// latest pronoun-only cluster of the same gender, or a new one. First-person
// singular, first-person plural and third-person plural pronouns each form
// their own cluster and never link to names.
class FallbackCorefBackend final : public CorefBackend {
 public:
  explicit FallbackCorefBackend(SplitterOptions options = {}) : options_(std::move(options)) {}

  std::string Id() const override { return "fallback-rules"; }
  std::string Version() const override { return "1"; }
  std::vector<std::vector<CorefSpan>> Resolve(const CorefRequest& request) override;

 private:
  SplitterOptions options_;
};

CorefRequest MakeCorefRequest(const Story& story);

// Runs the backend and turns its spans into validated clusters, renumbered
// 0..n-1 in order of first mention. Any backend failure surfaces as a
// retriable BackendError carrying the story id; malformed spans raise
// ValidationError.
std::vector<MentionCluster> CorefAnnotate(const Story& story, CorefBackend& backend);

// Throws ValidationError when a cluster breaks the MentionCluster invariants
// or a mention does not fit its sentence.
void ValidateClusters(const Story& story, const std::vector<MentionCluster>& clusters);

// Largest cluster; ties go to the earliest first mention, then the smaller id.
// Throws NoProtagonistError on an empty list.
int SelectProtagonist(const std::vector<MentionCluster>& clusters);

// Majority of {he, him, his} against {she, her, hers}; ties, zero gendered
// pronouns and clusters containing a first-person pronoun are kUnresolved.
Gender ResolveGender(const MentionCluster& cluster);

// Lowercase pronoun -> count over the cluster's pronoun mentions.
std::map<std::string, int> PronounCounts(const MentionCluster& cluster);

// Protagonist mentions become "PersonX" ("PersonX's" for possessive
// pronouns); other clusters, ordered by first mention, become "PersonY",
// "PersonZ", then "PersonN<i>". Throws AnnotationConflictError when mentions
// of two clusters overlap.
AnonymizedStory Anonymize(const Story& story, const std::vector<MentionCluster>& clusters,
                          int protagonist, const SplitterOptions& options = {});

std::vector<Role> AssignSentenceRoles(const Story& story, const std::vector<MentionCluster>& clusters,
                                      int protagonist);

// Whole-token, case-insensitive occurrences in `anonymized` of any NAME
// surface or gendered pronoun belonging to `clusters`.
std::vector<std::string> FindLeakedSurfaces(const AnonymizedStory& anonymized,
                                            const std::vector<MentionCluster>& clusters);

struct AnnotatedStory {
  ProtagonistAnnotation annotation;
  AnonymizedStory anonymized;
  std::vector<MentionCluster> clusters;
};

// Full per-story annotation. A story without character mentions yields an
// kUnresolved annotation with protagonist_cluster -1, all-NO_AGENT roles and
// unchanged text.
AnnotatedStory AnnotateStory(const Story& story, CorefBackend& backend,
                             const SplitterOptions& options = {});

}  // namespace protaudit
