#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace protaudit {

enum class EmbeddingFormat { kTextW2v, kBinaryW2v };

std::optional<EmbeddingFormat> ParseEmbeddingFormat(std::string_view s);

// Word vectors of one shared dimension, stored row-major in doubles. Zero
// vectors are refused at insertion.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dimension);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  // Returns false (and stores nothing) for a duplicate word or a zero vector.
  // Throws ValidationError on a length mismatch.
  bool Add(std::string word, std::span<const double> vector);

  // Looks up the lowercased word first, then the exact spelling.
  std::optional<std::span<const double>> Lookup(std::string_view word) const;
  bool Contains(std::string_view word) const { return Lookup(word).has_value(); }

  // Copy with every vector multiplied by `factor`.
  EmbeddingStore Scaled(double factor) const;

 private:
  std::size_t dimension_;
  std::vector<std::string> words_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct EmbeddingLoadStats {
  std::size_t duplicates = 0;
  std::size_t zero_vectors = 0;
};

// Text: "<vocab> <dim>" header then "<word> <dim floats>" per line. Binary:
// the same ASCII header, then per word "<word> " and dim little-endian
// float32 values. Throws ParseError naming the offending word on a dimension
// mismatch, and when the body is shorter or longer than the header claims.
EmbeddingStore LoadEmbeddings(const std::filesystem::path& path, EmbeddingFormat format,
                              EmbeddingLoadStats* stats = nullptr);

void WriteTextEmbeddings(const EmbeddingStore& store, const std::filesystem::path& path);

// Throws UndefinedCosineError for a zero vector and ValidationError for
// unequal lengths. The result is clamped to [-1, 1].
double Cosine(std::span<const double> u, std::span<const double> v);

// Named, lowercase, deduplicated, non-empty word set.
struct Lexicon {
  std::string name;
  std::set<std::string> words;
};

Lexicon MakeLexicon(std::string name, std::span<const std::string> words);

// One word per line, "#" starts a comment. Named after the file stem unless
// `name` is given. Throws ValidationError when no word remains.
Lexicon LoadLexicon(const std::filesystem::path& path, std::optional<std::string> name = std::nullopt);

Lexicon UnionLexicons(std::string name, std::span<const Lexicon> parts);

struct AffectScore {
  double valence = 0.0;
  double arousal = 0.0;
};

class AffectLexicon {
 public:
  // Throws ValidationError when a score falls outside [0, 1].
  void Add(std::string word, AffectScore score);
  std::optional<AffectScore> Lookup(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, AffectScore> entries_;
};

// TSV "word<TAB>valence<TAB>arousal"; extra columns are ignored and a header
// line whose score columns are non-numeric is skipped.
AffectLexicon LoadAffectLexicon(const std::filesystem::path& path);

// Category -> patterns; a pattern is a literal word or a prefix ending in '*'.
class CategoryDictionary {
 public:
  // Throws ValidationError for uppercase patterns or a non-trailing '*'.
  void AddPattern(const std::string& category, const std::string& pattern);

  // Every category with a literal equal to `token` or a prefix of it.
  std::set<std::string> Match(std::string_view token) const;

  // Category names in sorted order, including categories without patterns.
  std::vector<std::string> Categories() const;
  void AddCategory(const std::string& category);

 private:
  std::map<std::string, std::vector<std::string>> categories_;
  std::unordered_map<std::string, std::set<std::string>> literals_;
  std::vector<std::pair<std::string, std::string>> prefixes_;  // (prefix, category)
};

// .dic layout: a "%" line, "<id><TAB><name>" lines, a second "%" line, then
// "<pattern><TAB><id> <id>..." lines.
CategoryDictionary LoadCategoryDictionary(const std::filesystem::path& path);

std::set<std::string> CategoryMatch(std::string_view token, const CategoryDictionary& dict);

}  // namespace protaudit
