#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "protaudit/annotation.hpp"
#include "protaudit/inference.hpp"
#include "protaudit/protagonist.hpp"

namespace protaudit {

struct ProbeResult {
  std::string name;
  double accuracy = 0.0;
  std::size_t train_size = 0;  // classified units
  std::size_t test_size = 0;
  std::size_t train_stories = 0;
  std::size_t test_stories = 0;
  std::uint64_t seed = 0;
  std::size_t excluded = 0;  // stories without a usable label or input
  std::string unit;          // "sentence" or "story"
  std::string classifier;

  bool operator==(const ProbeResult&) const = default;
};

struct StorySplit {
  std::vector<std::string> train;  // sorted
  std::vector<std::string> test;   // sorted
};

// Shuffles each gender's story ids with a seeded Fisher-Yates pass and holds
// out round(test_fraction * n) of them, at least one. Throws SplitError when a
// gender has fewer than two stories, since one side would then miss a class.
StorySplit StratifiedSplit(const std::map<std::string, Gender>& genders, std::uint64_t seed,
                           double test_fraction = 0.2);

// Binary text classifier over whitespace tokens. Label 1 is F, 0 is M.
class TextClassifier {
 public:
  virtual ~TextClassifier() = default;
  virtual std::string Id() const = 0;
  virtual void Fit(std::span<const std::string> texts, std::span<const int> labels) = 0;
  virtual int Predict(std::string_view text) const = 0;
};

// Token-count features with an L2-penalized logistic loss (the intercept is
// not penalized), minimized by L-BFGS. The vocabulary comes from the training
// texts only.
class BagOfWordsLogisticClassifier final : public TextClassifier {
 public:
  explicit BagOfWordsLogisticClassifier(double l2 = 1.0) : l2_(l2) {}

  std::string Id() const override { return "bow-logistic-l2"; }
  void Fit(std::span<const std::string> texts, std::span<const int> labels) override;
  int Predict(std::string_view text) const override;

  double Margin(std::string_view text) const;
  std::size_t vocabulary_size() const { return vocabulary_.size(); }

 private:
  double l2_;
  std::map<std::string, std::size_t, std::less<>> vocabulary_;
  std::vector<double> weights_;
  double bias_ = 0.0;
};

enum class ProbeUnit { kSentence, kStory };

// Predicts gender from the anonymized text. Train and test are split by story,
// and with kSentence every sentence of a story is one example. Throws
// ValidationError with fewer than 20 gendered stories of either gender.
ProbeResult BowLeakageProbe(std::span<const AnonymizedStory> stories, const std::map<std::string, Gender>& genders,
                            std::uint64_t seed, ProbeUnit unit = ProbeUnit::kSentence,
                            TextClassifier* classifier = nullptr);

inline constexpr std::string_view kSeparator = "[SEP]";
inline constexpr std::array<SocialAxis, 4> kClassifierAxes = {SocialAxis::kPrAtt, SocialAxis::kPrMe,
                                                              SocialAxis::kPrMeOt, SocialAxis::kPrMot};

struct ConcatenatedInferences {
  std::map<std::string, std::string> texts;  // story_id -> joined phrases
  std::size_t excluded = 0;                  // gendered stories missing an axis
};

// All phrases of the four classifier axes, in record order, joined by " [SEP] ".
ConcatenatedInferences ConcatenateInferences(std::span<const InferenceRecord> records,
                                             const std::map<std::string, Gender>& genders);

// Story-level gender classifier over concatenated inferences.
ProbeResult InferenceGenderClassifier(std::span<const InferenceRecord> records,
                                      const std::map<std::string, Gender>& genders, std::uint64_t seed,
                                      TextClassifier* classifier = nullptr);

}  // namespace protaudit
