#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "protaudit/annotation.hpp"
#include "protaudit/inference.hpp"
#include "protaudit/lexicons.hpp"

namespace protaudit {

// Mean cosine between a word and the in-vocabulary words of one lexicon.
// The lexicon side is reduced once to the mean of its unit vectors, so each
// score is a single dot product.
class LexiconScorer {
 public:
  // Throws LexiconUnusableError when no lexicon word is in the store.
  LexiconScorer(const Lexicon& lexicon, const EmbeddingStore& store);

  // nullopt when `word` is out of vocabulary.
  std::optional<double> Score(std::string_view word) const;

  std::size_t effective_size() const { return effective_size_; }
  const std::string& name() const { return name_; }

 private:
  const EmbeddingStore* store_;
  std::string name_;
  std::vector<double> mean_unit_;
  std::size_t effective_size_ = 0;
};

// S(x, L): mean over in-vocabulary a in L of cos(e(x), e(a)). nullopt when x
// is out of vocabulary; LexiconUnusableError when all of L is.
std::optional<double> AssociationScore(std::string_view word, const Lexicon& lexicon,
                                       const EmbeddingStore& store);

struct SemanticAxis {
  std::string name;
  std::vector<double> vector;
  std::pair<std::string, std::string> source_lexicons;  // (positive pole, negative pole)
};

// Mean embedding of A minus mean embedding of B. Throws LexiconUnusableError
// when either side has no in-vocabulary word and DegenerateAxisError when the
// difference vanishes.
SemanticAxis BuildSemanticAxis(const Lexicon& positive, const Lexicon& negative, const EmbeddingStore& store,
                               std::string name = "power");

// cos(e(x), axis); positive values lean toward the positive pole.
std::optional<double> AxisScore(std::string_view word, const SemanticAxis& axis, const EmbeddingStore& store);

using TokenScorer = std::function<std::optional<double>(std::string_view)>;

// Mean over the tokens the scorer can score; nullopt when there are none.
std::optional<double> StoryAxisAggregate(std::span<const std::string> tokens, const TokenScorer& scorer);

// (v - mean) / population std. Throws ValidationError for fewer than two
// values and ConstantScoreError when the spread is zero.
std::vector<double> ZScores(std::span<const double> values);

struct GenderValue {
  Gender gender;
  double value;
};

struct GroupMedians {
  std::optional<double> female;  // nullopt for an empty group
  std::optional<double> male;
  std::size_t n_female = 0;
  std::size_t n_male = 0;
};

// Lower median of a non-empty sample.
double LowerMedian(std::vector<double> values);

// Z-scores over both genders pooled, then the lower median per gender.
GroupMedians ZScoreGroupMedians(std::span<const GenderValue> values);

// Mean valence and arousal over the tokens found in the lexicon.
std::optional<AffectScore> AffectAggregate(std::span<const std::string> tokens, const AffectLexicon& affect);

// --- score tables ------------------------------------------------------------

struct ScoreRow {
  std::string story_id;
  Gender gender = Gender::kFemale;
  SocialAxis axis = SocialAxis::kPrAtt;
  std::string metric;
  std::optional<double> value;

  bool operator==(const ScoreRow&) const = default;
};

// One row per (story, axis, metric); genders are F or M only.
class ScoreTable {
 public:
  // Throws ValidationError on an unresolved gender or a repeated key.
  void Add(ScoreRow row);
  const std::vector<ScoreRow>& rows() const { return rows_; }

  // story_id,gender,axis,metric,value with an empty value for missing scores.
  void WriteCsv(const std::filesystem::path& path) const;
  static ScoreTable ReadCsv(const std::filesystem::path& path);

 private:
  std::vector<ScoreRow> rows_;
  std::map<std::tuple<std::string, SocialAxis, std::string>, std::size_t> keys_;
};

struct ScoringResources {
  const EmbeddingStore* embeddings = nullptr;
  Lexicon intellect;
  Lexicon appearance;
  Lexicon power_positive;
  Lexicon power_negative;
  const AffectLexicon* affect = nullptr;
};

// Portrayal metrics on PR_ATT and affect metrics on the mental-state axes.
inline constexpr std::array<std::string_view, 3> kPortrayalMetrics = {"intellect", "power", "appearance"};
inline constexpr std::array<SocialAxis, 3> kMentalStateAxes = {SocialAxis::kPrMe, SocialAxis::kPrMeOt,
                                                               SocialAxis::kOtMePr};
inline constexpr std::array<std::string_view, 2> kAffectMetrics = {"valence", "arousal"};

// Content tokens of one story's records on one axis, in record order.
std::map<std::pair<std::string, SocialAxis>, std::vector<std::string>> CollectAxisTokens(
    std::span<const InferenceRecord> records);

// Per-story means for every gendered story present in `genders`.
ScoreTable ScoreStories(std::span<const InferenceRecord> records, const std::map<std::string, Gender>& genders,
                        const ScoringResources& resources);

enum class Pooling { kStory, kToken };

struct MetricSummary {
  std::string metric;
  SocialAxis axis = SocialAxis::kPrAtt;
  GroupMedians medians;
  std::size_t missing = 0;  // rows excluded for lack of a score
  std::string note;         // set when the medians could not be computed
};

// Group medians per (metric, axis) from a ScoreTable.
std::vector<MetricSummary> SummarizeScores(const ScoreTable& table);

// Token-level variant: every scoreable token is one observation.
std::vector<MetricSummary> SummarizeTokenScores(std::span<const InferenceRecord> records,
                                                const std::map<std::string, Gender>& genders,
                                                const ScoringResources& resources);

}  // namespace protaudit
