#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "protaudit/annotation.hpp"
#include "protaudit/inference.hpp"
#include "protaudit/lexicons.hpp"

namespace protaudit {

struct LogisticFit {
  std::vector<double> coefficients;  // intercept first
  std::vector<double> std_errors;    // Wald, from the inverse Fisher information
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  bool separated = false;  // fitted probabilities reached 0 or 1
  bool singular = false;   // information matrix not invertible
};

// Unpenalized binomial GLM with logit link fitted by IRLS with step halving.
// `design` rows must include the intercept column.
LogisticFit FitLogistic(std::span<const std::vector<double>> design, std::span<const double> response,
                        int max_iterations = 100, double tolerance = 1e-10);

// Two-sided normal tail probability of a Wald statistic.
double TwoSidedNormalP(double z);

// Upper tail of the chi-square distribution with one degree of freedom.
double ChiSquare1P(double statistic);

struct StoryCategoryCounts {
  std::string story_id;
  Gender gender = Gender::kFemale;
  double total_tokens = 0.0;
  std::map<std::string, double> counts;  // category -> count
};

struct CategoryRegression {
  std::string category;
  double coefficient = 0.0;  // log-odds of F per unit count; +/-inf when separated
  double std_error = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  bool separated = false;  // p_value then comes from a likelihood-ratio test
  std::string mark;
};

struct SkippedCategory {
  std::string category;
  std::string reason;
};

struct RegressionResult {
  std::vector<CategoryRegression> categories;
  std::vector<SkippedCategory> skipped;
  std::size_t n = 0;
  std::size_t excluded = 0;  // stories with an unresolved gender
  bool word_count_controlled = true;
};

// "*" for p < 0.001, "†" for p < 0.01, "‡" for p < 0.05, "" otherwise.
std::string SignificanceMark(double p_value);

// For every category, gender (F = 1, M = 0) ~ 1 + category count + total
// tokens. The word-count covariate is dropped for all categories when it is
// constant. Categories that never vary are skipped with a note. Throws
// ValidationError with fewer than two stories of either gender.
RegressionResult MotivationRegression(std::span<const StoryCategoryCounts> stories,
                                      std::span<const std::string> categories);

// Category counts over each gendered story's PR_MOT content tokens; total is
// the number of those tokens.
std::vector<StoryCategoryCounts> CountMotivationCategories(std::span<const InferenceRecord> records,
                                                           const std::map<std::string, Gender>& genders,
                                                           const CategoryDictionary& dict);

}  // namespace protaudit
