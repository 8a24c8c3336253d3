#include <doctest.h>

#include <cmath>
#include <random>

#include "protaudit/error.hpp"
#include "protaudit/regression.hpp"
#include "test_support.hpp"

using namespace protaudit;
namespace ts = testsupport;

namespace {

struct NewtonFit {
  std::vector<long double> beta;
  std::vector<long double> se;
};

// Plain Newton-Raphson on the logistic log-likelihood with a hand-rolled
// Gauss-Jordan inverse.
NewtonFit ReferenceLogistic(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  const std::size_t p = x[0].size();
  std::vector<long double> beta(p, 0.0L);
  std::vector<std::vector<long double>> inv(p, std::vector<long double>(p));
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<long double> grad(p, 0.0L);
    std::vector<std::vector<long double>> h(p, std::vector<long double>(p, 0.0L));
    for (std::size_t i = 0; i < x.size(); ++i) {
      long double eta = 0;
      for (std::size_t j = 0; j < p; ++j) eta += beta[j] * x[i][j];
      const long double mu = 1.0L / (1.0L + std::exp(-eta));
      for (std::size_t j = 0; j < p; ++j) {
        grad[j] += (y[i] - mu) * x[i][j];
        for (std::size_t k = 0; k < p; ++k) h[j][k] += mu * (1 - mu) * x[i][j] * x[i][k];
      }
    }
    // invert h
    std::vector<std::vector<long double>> a = h;
    for (std::size_t j = 0; j < p; ++j) {
      inv[j].assign(p, 0.0L);
      inv[j][j] = 1.0L;
    }
    for (std::size_t c = 0; c < p; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < p; ++r) {
        if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
      }
      std::swap(a[c], a[piv]);
      std::swap(inv[c], inv[piv]);
      const long double d = a[c][c];
      for (std::size_t k = 0; k < p; ++k) {
        a[c][k] /= d;
        inv[c][k] /= d;
      }
      for (std::size_t r = 0; r < p; ++r) {
        if (r == c) continue;
        const long double f = a[r][c];
        for (std::size_t k = 0; k < p; ++k) {
          a[r][k] -= f * a[c][k];
          inv[r][k] -= f * inv[c][k];
        }
      }
    }
    long double step = 0;
    for (std::size_t j = 0; j < p; ++j) {
      long double d = 0;
      for (std::size_t k = 0; k < p; ++k) d += inv[j][k] * grad[k];
      beta[j] += d;
      step = std::max(step, std::abs(d));
    }
    if (step < 1e-14L) break;
  }
  NewtonFit out{beta, {}};
  for (std::size_t j = 0; j < p; ++j) out.se.push_back(std::sqrt(inv[j][j]));
  return out;
}

std::vector<std::vector<double>> Design(const std::vector<StoryCategoryCounts>& stories, bool with_words) {
  std::vector<std::vector<double>> x;
  for (const auto& s : stories) {
    auto it = s.counts.find("C");
    std::vector<double> row = {1.0, it == s.counts.end() ? 0.0 : it->second};
    if (with_words) row.push_back(s.total_tokens);
    x.push_back(row);
  }
  return x;
}

std::vector<double> Response(const std::vector<StoryCategoryCounts>& stories) {
  std::vector<double> y;
  for (const auto& s : stories) y.push_back(s.gender == Gender::kFemale ? 1.0 : 0.0);
  return y;
}

const std::vector<std::string> kC = {"C"};

}  // namespace

TEST_CASE("IRLS matches an independent Newton-Raphson fit") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal(0, 1);
  for (int round = 0; round < 30; ++round) {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    const double b0 = normal(rng) * 0.5, b1 = normal(rng), b2 = normal(rng) * 0.5;
    for (int i = 0; i < 300; ++i) {
      const double x1 = normal(rng), x2 = normal(rng) * 3 + 10;
      const double p = 1.0 / (1.0 + std::exp(-(b0 + b1 * x1 + b2 * (x2 - 10))));
      x.push_back({1.0, x1, x2});
      y.push_back(std::uniform_real_distribution<double>(0, 1)(rng) < p ? 1.0 : 0.0);
    }
    const LogisticFit fit = FitLogistic(x, y);
    const NewtonFit ref = ReferenceLogistic(x, y);
    REQUIRE(fit.converged);
    CHECK_FALSE(fit.separated);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(fit.coefficients[j] - static_cast<double>(ref.beta[j])) <= 1e-7);
      CHECK(std::abs(fit.std_errors[j] - static_cast<double>(ref.se[j])) <= 1e-7);
    }
  }
}

TEST_CASE("category regression coefficient matches the raw-scale reference fit") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto stories = ts::NullCategoryCorpus(seed, 200);
    const RegressionResult r = MotivationRegression(stories, kC);
    REQUIRE(r.categories.size() == 1);
    const NewtonFit ref = ReferenceLogistic(Design(stories, true), Response(stories));
    const auto& c = r.categories[0];
    CHECK(std::abs(c.coefficient - static_cast<double>(ref.beta[1])) <= 1e-7);
    CHECK(std::abs(c.std_error - static_cast<double>(ref.se[1])) <= 1e-7);
    const double z = static_cast<double>(ref.beta[1] / ref.se[1]);
    CHECK(std::abs(c.p_value - std::erfc(std::abs(z) / std::sqrt(2.0))) <= 1e-9);
    CHECK(c.n == 200);
    CHECK(r.word_count_controlled);
  }
}

TEST_CASE("constant word count drops the covariate") {
  const auto stories = ts::PlantedCategoryCorpus(3, 200, 0.7, 0.4);
  const RegressionResult r = MotivationRegression(stories, kC);
  CHECK_FALSE(r.word_count_controlled);
  const NewtonFit ref = ReferenceLogistic(Design(stories, false), Response(stories));
  CHECK(std::abs(r.categories[0].coefficient - static_cast<double>(ref.beta[1])) <= 1e-7);
}

TEST_CASE("planted category is recovered") {
  const auto stories = ts::PlantedCategoryCorpus(7, 200, 0.9, 0.1);
  const RegressionResult r = MotivationRegression(stories, kC);
  const auto& c = r.categories[0];
  CHECK(c.coefficient > 0);
  CHECK(c.p_value < 0.01);
  CHECK(c.mark == "*");
  const auto perm = ts::PermutationTest(stories, "C", 2000, 7);
  CHECK(perm.statistic > 0);
  CHECK(perm.p_value < 0.01);
}

TEST_CASE("sign recovery over replicates") {
  int positive = 0, negative = 0;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    positive += MotivationRegression(ts::PlantedCategoryCorpus(seed, 200, 0.6, 0.3), kC).categories[0].coefficient > 0;
    negative += MotivationRegression(ts::PlantedCategoryCorpus(seed, 200, 0.3, 0.6), kC).categories[0].coefficient < 0;
  }
  CHECK(positive == 20);
  CHECK(negative == 20);
}

TEST_CASE("null corpus rarely rejects") {
  int calm = 0;
  for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
    calm += MotivationRegression(ts::NullCategoryCorpus(seed, 200), kC).categories[0].p_value > 0.05;
  }
  CHECK(calm >= 90);
}

TEST_CASE("zero variance, separation and small samples") {
  auto stories = ts::NullCategoryCorpus(5, 40);
  for (auto& s : stories) s.counts["Never"] = 0;
  const std::vector<std::string> cats = {"C", "Never", "Absent"};
  const RegressionResult r = MotivationRegression(stories, cats);
  CHECK(r.categories.size() == 1);
  CHECK(r.skipped.size() == 2);

  auto sep = ts::PlantedCategoryCorpus(9, 40, 1.0, 0.0);
  const RegressionResult s = MotivationRegression(sep, kC);
  REQUIRE(s.categories.size() == 1);
  CHECK(s.categories[0].separated);
  CHECK(std::isinf(s.categories[0].coefficient));
  CHECK(s.categories[0].coefficient > 0);
  CHECK(s.categories[0].p_value >= 0.0);
  CHECK(s.categories[0].p_value < 0.001);

  std::vector<StoryCategoryCounts> tiny(ts::NullCategoryCorpus(2, 3));
  CHECK_THROWS_AS(MotivationRegression(tiny, kC), ValidationError);

  auto with_unresolved = ts::NullCategoryCorpus(6, 40);
  with_unresolved[0].gender = Gender::kUnresolved;
  const RegressionResult u = MotivationRegression(with_unresolved, kC);
  CHECK(u.excluded == 1);
  CHECK(u.n == 39);
}

TEST_CASE("significance marks and tails") {
  CHECK(SignificanceMark(0.0005) == "*");
  CHECK(SignificanceMark(0.005) == "†");
  CHECK(SignificanceMark(0.03) == "‡");
  CHECK(SignificanceMark(0.05) == "");
  CHECK(SignificanceMark(0.2) == "");
  CHECK(TwoSidedNormalP(1.959963984540054) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(TwoSidedNormalP(0) == 1.0);
  CHECK(ChiSquare1P(3.841458820694124) == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("category counts from motivation records") {
  CategoryDictionary dict;
  dict.AddPattern("Reward", "win*");
  dict.AddPattern("Affiliation", "friend*");
  const std::vector<InferenceRecord> recs = {
      {"a", 0, SocialAxis::kPrMot, Dimension::kXIntent, {"win", "friends"}, "s", "1"},
      {"a", 0, SocialAxis::kPrMot, Dimension::kXWant, {"winning", "rest"}, "s", "1"},
      {"a", 0, SocialAxis::kPrAtt, Dimension::kXAttr, {"winner"}, "s", "1"},
      {"b", 0, SocialAxis::kPrMot, Dimension::kXNeed, {"sleep"}, "s", "1"},
  };
  const std::map<std::string, Gender> genders = {{"a", Gender::kFemale}, {"b", Gender::kMale}};
  const auto counts = CountMotivationCategories(recs, genders, dict);
  REQUIRE(counts.size() == 2);
  CHECK(counts[0].story_id == "a");
  CHECK(counts[0].total_tokens == 4);
  CHECK(counts[0].counts.at("Reward") == 2);
  CHECK(counts[0].counts.at("Affiliation") == 1);
  CHECK(counts[1].total_tokens == 1);
}
