#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "protaudit/annotation.hpp"

namespace protaudit {

// Character span [char_start, char_end) into the owning sentence's text.
struct Token {
  std::string surface;
  std::size_t char_start = 0;
  std::size_t char_end = 0;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::size_t index = 0;
  std::string text;
  std::vector<Token> tokens;

  bool operator==(const Sentence&) const = default;
};

enum class Source { kGenerated, kHuman };

std::string_view ToString(Source s);
std::optional<Source> ParseSource(std::string_view s);

struct Story {
  std::string story_id;
  std::string title;
  std::vector<Sentence> sentences;
  Source source = Source::kHuman;
  std::size_t token_count = 0;

  // Sentence texts joined by single spaces. Re-splitting this text yields
  // the same sentences.
  std::string Text() const;

  bool operator==(const Story&) const = default;
};

struct Corpus {
  std::string name;
  std::string provenance;
  std::vector<Story> stories;

  // Linear lookup; nullptr when absent.
  const Story* Find(std::string_view story_id) const;
};

enum class CorpusFormat { kJsonl, kCsvTitleStory };

std::optional<CorpusFormat> ParseCorpusFormat(std::string_view s);

struct SplitterOptions {
  // Lowercase tokens, with their trailing period, that never end a sentence.
  std::set<std::string> abbreviations = {"mr.", "mrs.", "ms.", "dr.", "prof.", "sr.",
                                         "jr.", "st.", "mt.", "vs.", "etc.", "e.g.",
                                         "i.e.", "a.m.", "p.m.", "u.s."};
};

// Splits on runs of . ! ? (optionally followed by closing quotes or brackets)
// that are followed by whitespace or the end of text. Returned sentences are
// trimmed; empty segments are dropped.
std::vector<std::string> SplitSentences(std::string_view text, const SplitterOptions& options = {});

// Whitespace tokenization with leading/trailing punctuation detached into
// single-character tokens, a trailing "'s" clitic split off, and
// abbreviations kept whole. Offsets index into `sentence`.
std::vector<Token> Tokenize(std::string_view sentence, const SplitterOptions& options = {});

// Builds a validated Story from raw text. Throws ValidationError on empty text.
Story MakeStory(std::string story_id, std::string title, std::string_view text, Source source,
                const SplitterOptions& options = {});

// Checks every Story invariant; throws ValidationError naming the story.
void ValidateStory(const Story& story);

struct LoadOptions {
  SplitterOptions splitter;
  std::optional<std::string> name;  // defaults to the file stem
};

// Throws ParseError (with line number) for malformed records, EmptyCorpusError
// for a file without records and DuplicateIdError for repeated ids.
Corpus LoadCorpus(const std::filesystem::path& path, CorpusFormat format,
                  const LoadOptions& options = {});

// Canonical JSONL (id, title, text, source).
void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path);

struct StatsSummary {
  std::size_t story_count = 0;
  std::size_t annotated_count = 0;
  std::size_t female = 0;
  std::size_t male = 0;
  std::size_t unresolved = 0;
  double mean_tokens = 0.0;  // over all stories in the corpus
  double mean_tokens_female = 0.0;
  double mean_tokens_male = 0.0;
};

// Throws ValidationError for an annotation naming an unknown story or a story
// annotated twice.
StatsSummary CorpusStats(const Corpus& corpus, std::span<const ProtagonistAnnotation> annotations);

}  // namespace protaudit
