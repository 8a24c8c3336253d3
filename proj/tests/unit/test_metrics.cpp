#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "protaudit/error.hpp"
#include "protaudit/metrics.hpp"
#include "test_support.hpp"

using namespace protaudit;
namespace ts = testsupport;

namespace {

EmbeddingStore Store(std::initializer_list<std::pair<const char*, std::vector<double>>> rows) {
  EmbeddingStore s(2);
  for (const auto& [w, v] : rows) s.Add(w, v);
  return s;
}

Lexicon L(std::initializer_list<std::string> words) {
  const std::vector<std::string> v(words);
  return MakeLexicon("l", v);
}

std::vector<GenderValue> GV(const std::vector<double>& f, const std::vector<double>& m) {
  std::vector<GenderValue> out;
  for (double v : f) out.push_back({Gender::kFemale, v});
  for (double v : m) out.push_back({Gender::kMale, v});
  return out;
}

}  // namespace

TEST_CASE("association score examples") {
  const auto s = Store({{"x", {1, 0}}, {"a", {1, 0}}, {"b", {0, 1}}, {"c", {0.8, 0.6}}});
  CHECK(*AssociationScore("x", L({"a"}), s) == doctest::Approx(1.0));
  CHECK(*AssociationScore("x", L({"a", "b"}), s) == doctest::Approx(0.5));
  CHECK(*AssociationScore("x", L({"c", "oov"}), s) == doctest::Approx(0.8));
  CHECK(LexiconScorer(L({"c", "oov"}), s).effective_size() == 1);
  CHECK_FALSE(AssociationScore("missing", L({"a"}), s).has_value());
  CHECK_THROWS_AS(AssociationScore("x", L({"oov", "gone"}), s), LexiconUnusableError);
}

TEST_CASE("association score matches the reference loop") {
  std::mt19937_64 rng(8);
  const EmbeddingStore store = ts::RandomStore(rng, 200, 24);
  for (int round = 0; round < 100; ++round) {
    std::vector<std::string> lex;
    for (int k = 0; k < 1 + static_cast<int>(rng() % 12); ++k) lex.push_back("w" + std::to_string(rng() % 200));
    lex.push_back("not-in-store");
    const Lexicon lexicon = MakeLexicon("r", lex);
    const std::vector<std::string> words(lexicon.words.begin(), lexicon.words.end());
    const std::string x = "w" + std::to_string(rng() % 200);
    CHECK(std::abs(*AssociationScore(x, lexicon, store) - ts::ReferenceAssociation(x, words, store)) <= 1e-12);
  }
}

TEST_CASE("semantic axis examples") {
  const auto s = Store({{"a", {1, 0}}, {"b", {0, 1}}, {"a1", {1, 0}}, {"a2", {0, 1}}});
  CHECK(BuildSemanticAxis(L({"a"}), L({"b"}), s).vector == std::vector<double>{1, -1});
  const auto axis = BuildSemanticAxis(L({"a1", "a2"}), L({"b"}), s);
  CHECK(axis.vector[0] == doctest::Approx(0.5));
  CHECK(axis.vector[1] == doctest::Approx(-0.5));
  CHECK_THROWS_AS(BuildSemanticAxis(L({"a"}), L({"a"}), s), DegenerateAxisError);
  CHECK_THROWS_AS(BuildSemanticAxis(L({"zz"}), L({"b"}), s), LexiconUnusableError);
}

TEST_CASE("axis score examples") {
  const auto s = Store({{"a", {1, 0}}, {"b", {0, 1}}, {"p", {1, 0}}, {"q", {1, 1}}, {"r", {-1, 1}}});
  const auto axis = BuildSemanticAxis(L({"a"}), L({"b"}), s);
  CHECK(*AxisScore("p", axis, s) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(*AxisScore("q", axis, s) == doctest::Approx(0.0));
  CHECK(*AxisScore("r", axis, s) == doctest::Approx(-1.0));
  CHECK_FALSE(AxisScore("oov", axis, s).has_value());
}

TEST_CASE("axis flips sign when the poles swap") {
  std::mt19937_64 rng(9);
  const EmbeddingStore store = ts::RandomStore(rng, 60, 12);
  const auto a = L({"w1", "w2", "w3"});
  const auto b = L({"w4", "w5"});
  const auto fwd = BuildSemanticAxis(a, b, store);
  const auto rev = BuildSemanticAxis(b, a, store);
  const auto ref = ts::ReferenceAxis({"w1", "w2", "w3"}, {"w4", "w5"}, store);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK(std::abs(fwd.vector[i] - ref[i]) <= 1e-12);
    CHECK(fwd.vector[i] == -rev.vector[i]);
  }
  for (const auto& w : store.words()) CHECK(*AxisScore(w, fwd, store) == doctest::Approx(-*AxisScore(w, rev, store)));
}

TEST_CASE("story aggregate") {
  const TokenScorer scorer = [](std::string_view w) -> std::optional<double> {
    if (w == "a") return 0.2;
    if (w == "b") return 0.4;
    if (w == "c") return 0.8;
    return std::nullopt;
  };
  const std::vector<std::string> ab = {"a", "zz", "b"};
  CHECK(*StoryAxisAggregate(ab, scorer) == doctest::Approx(0.3));
  const std::vector<std::string> none = {"zz", "yy"};
  CHECK_FALSE(StoryAxisAggregate(none, scorer).has_value());
  const std::vector<std::string> c = {"c"};
  CHECK(*StoryAxisAggregate(c, scorer) == doctest::Approx(0.8));
}

TEST_CASE("z-scores and group medians") {
  const auto two = GV({1}, {3});
  const GroupMedians m = ZScoreGroupMedians(two);
  CHECK(*m.female == doctest::Approx(-1.0));
  CHECK(*m.male == doctest::Approx(1.0));
  CHECK(m.n_female == 1);
  CHECK(m.n_male == 1);
  CHECK_THROWS_AS(ZScoreGroupMedians(GV({2, 2}, {2})), ConstantScoreError);

  // pooled over all four values: mean 2, sigma sqrt(0.5)
  const GroupMedians pooled = ZScoreGroupMedians(GV({1, 2, 3}, {2}));
  CHECK(*pooled.female == doctest::Approx(0.0));
  CHECK(*pooled.male == doctest::Approx(0.0));
  const std::vector<double> vals = {1, 2, 3, 2};
  const auto z = ZScores(vals);
  CHECK(z[0] == doctest::Approx(-1.0 / std::sqrt(0.5)));

  CHECK(LowerMedian({4, 1, 3, 2}) == 2);
  CHECK(LowerMedian({5, 1, 3}) == 3);
  CHECK_FALSE(ZScoreGroupMedians(GV({1, 3}, {})).male.has_value());
  const std::vector<double> one = {1};
  CHECK_THROWS_AS(ZScores(one), ValidationError);
}

TEST_CASE("z-scores have zero mean and unit population spread") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> normal(3.0, 2.0);
  for (int round = 0; round < 100; ++round) {
    std::vector<double> v(2 + rng() % 50);
    for (auto& x : v) x = normal(rng);
    const auto z = ZScores(v);
    double mean = 0, var = 0;
    for (double x : z) mean += x / z.size();
    for (double x : z) var += (x - mean) * (x - mean) / z.size();
    CHECK(std::abs(mean) <= 1e-12);
    CHECK(std::abs(var - 1.0) <= 1e-12);
  }
}

TEST_CASE("raising male values never lowers the male median") {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> normal(0, 1);
  for (int round = 0; round < 200; ++round) {
    std::vector<double> f(3 + rng() % 10), m(3 + rng() % 10);
    for (auto& x : f) x = normal(rng);
    for (auto& x : m) x = normal(rng);
    const auto before = ZScoreGroupMedians(GV(f, m));
    for (auto& x : m) x += 0.5;
    const auto after = ZScoreGroupMedians(GV(f, m));
    CHECK(*after.male - *after.female >= *before.male - *before.female - 1e-12);
  }
}

TEST_CASE("affect aggregate") {
  AffectLexicon lex;
  lex.Add("happy", {0.9, 0.6});
  lex.Add("calm", {0.7, 0.2});
  lex.Add("meh", {0.5, 0.5});
  const std::vector<std::string> both = {"happy", "unknown", "calm"};
  const auto a = AffectAggregate(both, lex);
  CHECK(a->valence == doctest::Approx(0.8));
  CHECK(a->arousal == doctest::Approx(0.4));
  const std::vector<std::string> none = {"zz"};
  CHECK_FALSE(AffectAggregate(none, lex).has_value());
  const std::vector<std::string> one = {"meh"};
  CHECK(AffectAggregate(one, lex)->valence == 0.5);
  CHECK_THROWS_AS(lex.Add("bad", {1.2, 0.0}), ValidationError);
}

TEST_CASE("score table") {
  ScoreTable t;
  t.Add({"s1", Gender::kFemale, SocialAxis::kPrAtt, "intellect", 0.25});
  t.Add({"s1", Gender::kFemale, SocialAxis::kPrAtt, "power", std::nullopt});
  t.Add({"s2", Gender::kMale, SocialAxis::kPrMe, "valence", -1.0 / 3.0});
  CHECK_THROWS_AS(t.Add({"s1", Gender::kFemale, SocialAxis::kPrAtt, "intellect", 0.3}), ValidationError);
  CHECK_THROWS_AS(t.Add({"s3", Gender::kUnresolved, SocialAxis::kPrAtt, "intellect", 0.3}), ValidationError);
  ts::TempDir dir("scores");
  const auto p = dir.path() / "scores.csv";
  t.WriteCsv(p);
  CHECK(ScoreTable::ReadCsv(p).rows() == t.rows());
}

TEST_CASE("scoring on records") {
  const auto s = Store({{"brilliant", {1, 0}}, {"smart", {1, 0.1}}, {"pretty", {0, 1}}, {"strong", {0.6, 0.8}},
                        {"weak", {0.6, -0.8}}, {"happy", {0.3, 0.3}}});
  AffectLexicon affect;
  affect.Add("happy", {0.9, 0.6});
  ScoringResources res{&s, L({"smart"}), L({"pretty"}), L({"strong"}), L({"weak"}), &affect};
  const std::vector<InferenceRecord> recs = {
      {"f1", 0, SocialAxis::kPrAtt, Dimension::kXAttr, {"brilliant", "pretty"}, "stub", "1"},
      {"m1", 0, SocialAxis::kPrAtt, Dimension::kXAttr, {"unknown"}, "stub", "1"},
      {"m1", 0, SocialAxis::kPrMe, Dimension::kXReact, {"happy"}, "stub", "1"},
  };
  const std::map<std::string, Gender> genders = {{"f1", Gender::kFemale}, {"m1", Gender::kMale}};
  const ScoreTable t = ScoreStories(recs, genders, res);
  const auto find = [&](const std::string& id, SocialAxis axis, const std::string& metric) {
    for (const auto& r : t.rows()) {
      if (r.story_id == id && r.axis == axis && r.metric == metric) return r.value;
    }
    FAIL("row missing");
    return std::optional<double>{};
  };
  const double expected = (ts::ReferenceAssociation("brilliant", {"smart"}, s) +
                           ts::ReferenceAssociation("pretty", {"smart"}, s)) / 2.0;
  CHECK(*find("f1", SocialAxis::kPrAtt, "intellect") == doctest::Approx(expected));
  CHECK_FALSE(find("m1", SocialAxis::kPrAtt, "intellect").has_value());
  CHECK(*find("m1", SocialAxis::kPrMe, "valence") == doctest::Approx(0.9));
}
