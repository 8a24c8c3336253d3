#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "protaudit/error.hpp"
#include "protaudit/lexicons.hpp"
#include "test_support.hpp"

using namespace protaudit;
namespace ts = testsupport;

namespace {

std::filesystem::path WriteText(const ts::TempDir& dir, const std::string& name, const std::string& content) {
  const auto p = dir.path() / name;
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

// word2vec binary layout written by hand.
void WriteBinary(const std::filesystem::path& p, const std::vector<std::pair<std::string, std::vector<float>>>& rows,
                 std::size_t dim) {
  std::ofstream out(p, std::ios::binary);
  out << rows.size() << " " << dim << "\n";
  for (const auto& [w, v] : rows) {
    out << w << " ";
    for (float f : v) {
      unsigned char bytes[4];
      std::memcpy(bytes, &f, 4);
      out.write(reinterpret_cast<const char*>(bytes), 4);
    }
    out << "\n";
  }
}

std::vector<double> V(std::initializer_list<double> v) { return v; }

}  // namespace

TEST_CASE("text embeddings parse") {
  ts::TempDir dir("emb");
  const auto p = WriteText(dir, "e.txt", "2 3\nking 0.1 0.2 0.3\nqueen 0.1 0.25 0.3\n");
  const EmbeddingStore store = LoadEmbeddings(p, EmbeddingFormat::kTextW2v);
  CHECK(store.size() == 2);
  CHECK(store.dimension() == 3);
  const auto q = ts::VectorOf(store, "queen");
  CHECK(q == std::vector<double>{0.1, 0.25, 0.3});
  CHECK(store.Contains("King"));
  CHECK_FALSE(store.Contains("prince"));
}

TEST_CASE("embedding file errors") {
  ts::TempDir dir("emb");
  try {
    LoadEmbeddings(WriteText(dir, "d.txt", "2 3\nking 0.1 0.2 0.3\nqueen 0.1 0.2\n"), EmbeddingFormat::kTextW2v);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("queen") != std::string::npos);
  }
  CHECK_THROWS_AS(LoadEmbeddings(WriteText(dir, "s.txt", "3 2\na 1 0\nb 0 1\n"), EmbeddingFormat::kTextW2v),
                  ParseError);
  CHECK_THROWS_AS(LoadEmbeddings(WriteText(dir, "l.txt", "1 2\na 1 0\nb 0 1\n"), EmbeddingFormat::kTextW2v),
                  ParseError);
  CHECK_THROWS_AS(LoadEmbeddings(WriteText(dir, "h.txt", "two three\n"), EmbeddingFormat::kTextW2v), ParseError);
}

TEST_CASE("duplicates and zero vectors are counted and dropped") {
  ts::TempDir dir("emb");
  EmbeddingLoadStats stats;
  const auto store = LoadEmbeddings(WriteText(dir, "z.txt", "3 2\na 1 0\na 0 1\nz 0 0\n"),
                                    EmbeddingFormat::kTextW2v, &stats);
  CHECK(store.size() == 1);
  CHECK(stats.duplicates == 1);
  CHECK(stats.zero_vectors == 1);
  CHECK(ts::VectorOf(store, "a") == std::vector<double>{1, 0});

  EmbeddingStore s(2);
  CHECK_FALSE(s.Add("z", V({0, 0})));
  CHECK_THROWS_AS(s.Add("x", V({1, 2, 3})), ValidationError);
}

TEST_CASE("text embeddings round-trip") {
  ts::TempDir dir("emb");
  std::mt19937_64 rng(3);
  const EmbeddingStore store = ts::RandomStore(rng, 50, 16);
  const auto p = dir.path() / "out.txt";
  WriteTextEmbeddings(store, p);
  const EmbeddingStore back = LoadEmbeddings(p, EmbeddingFormat::kTextW2v);
  REQUIRE(back.size() == store.size());
  for (const auto& w : store.words()) {
    const auto a = ts::VectorOf(store, w);
    const auto b = ts::VectorOf(back, w);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-6);
  }
}

TEST_CASE("binary embeddings") {
  ts::TempDir dir("emb");
  const auto p = dir.path() / "e.bin";
  WriteBinary(p, {{"cat", {0.5f, -1.0f}}, {"dog", {0.25f, 2.0f}}}, 2);
  const auto store = LoadEmbeddings(p, EmbeddingFormat::kBinaryW2v);
  CHECK(store.size() == 2);
  CHECK(ts::VectorOf(store, "dog") == std::vector<double>{0.25, 2.0});
  const auto short_body = dir.path() / "s.bin";
  WriteBinary(short_body, {{"cat", {0.5f, -1.0f}}}, 2);
  {
    // claim two words
    std::string content = ts::Slurp(short_body);
    content[0] = '2';
    std::ofstream(short_body, std::ios::binary) << content;
  }
  CHECK_THROWS_AS(LoadEmbeddings(short_body, EmbeddingFormat::kBinaryW2v), ParseError);
  CHECK(ParseEmbeddingFormat("binary") == EmbeddingFormat::kBinaryW2v);
}

TEST_CASE("cosine") {
  CHECK(Cosine(V({1, 0}), V({1, 0})) == doctest::Approx(1.0));
  CHECK(Cosine(V({1, 0}), V({0, 1})) == doctest::Approx(0.0));
  CHECK(Cosine(V({1, 0}), V({-1, 0})) == doctest::Approx(-1.0));
  CHECK(Cosine(V({1, 1}), V({1, 0})) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(Cosine(V({0, 0}), V({1, 0})), UndefinedCosineError);
  CHECK_THROWS_AS(Cosine(V({1, 0}), V({1, 0, 0})), ValidationError);
}

TEST_CASE("cosine properties against a long double reference") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0, 1);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int round = 0; round < 500; ++round) {
    const std::size_t dim = 1 + rng() % 64;
    std::vector<double> u(dim), v(dim);
    for (auto& x : u) x = normal(rng);
    for (auto& x : v) x = normal(rng);
    const double c = Cosine(u, v);
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);
    CHECK(std::abs(c - Cosine(v, u)) <= 1e-15);
    CHECK(std::abs(c - ts::ReferenceCosine(u, v)) <= 1e-12);
    std::vector<double> su = u;
    const double k = scale(rng);
    for (auto& x : su) x *= k;
    CHECK(std::abs(Cosine(su, v) - c) <= 1e-12);
    CHECK(Cosine(u, u) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("lexicons") {
  const std::vector<std::string> words = {"Smart", "smart", "wise"};
  const Lexicon l = MakeLexicon("intellect", words);
  CHECK(l.words == std::set<std::string>{"smart", "wise"});
  ts::TempDir dir("lex");
  const auto p = WriteText(dir, "power.txt", "# strong words\nStrong\n\nmighty  # inline\n");
  const Lexicon loaded = LoadLexicon(p);
  CHECK(loaded.name == "power");
  CHECK(loaded.words == std::set<std::string>{"strong", "mighty"});
  CHECK(LoadLexicon(p, "other").name == "other");
  CHECK_THROWS_AS(LoadLexicon(WriteText(dir, "empty.txt", "# nothing\n\n")), ValidationError);
  const std::vector<Lexicon> parts = {l, loaded};
  CHECK(UnionLexicons("u", parts).words.size() == 4);
}

TEST_CASE("affect lexicon") {
  ts::TempDir dir("aff");
  const auto p = WriteText(dir, "a.tsv", "word\tvalence\tarousal\nhappy\t0.9\t0.6\textra\nsad\t0.1\t0.3\n");
  const AffectLexicon lex = LoadAffectLexicon(p);
  CHECK(lex.size() == 2);
  CHECK(lex.Lookup("happy")->valence == 0.9);
  CHECK(lex.Lookup("Sad")->arousal == 0.3);
  CHECK_FALSE(lex.Lookup("meh").has_value());
  CHECK_THROWS_AS(LoadAffectLexicon(WriteText(dir, "b.tsv", "loud\t0.5\t1.5\n")), ValidationError);
}

TEST_CASE("category dictionary") {
  ts::TempDir dir("dic");
  const auto p = WriteText(dir, "m.dic",
                           "%\n1\tAffiliation\n2\tAchieve\n3\tReward\n%\n"
                           "friend*\t1\nwin\t2 3\nsucceed*\t2\n");
  const CategoryDictionary dict = LoadCategoryDictionary(p);
  CHECK(dict.Categories() == std::vector<std::string>{"Achieve", "Affiliation", "Reward"});
  CHECK(CategoryMatch("friendship", dict) == std::set<std::string>{"Affiliation"});
  CHECK(CategoryMatch("friend", dict) == std::set<std::string>{"Affiliation"});
  CHECK(CategoryMatch("win", dict) == std::set<std::string>{"Achieve", "Reward"});
  CHECK(CategoryMatch("winner", dict).empty());
  CHECK(CategoryMatch("succeeded", dict) == std::set<std::string>{"Achieve"});
  CHECK(CategoryMatch("frien", dict).empty());

  CategoryDictionary d;
  CHECK_THROWS_AS(d.AddPattern("X", "Upper"), ValidationError);
  CHECK_THROWS_AS(d.AddPattern("X", "a*b"), ValidationError);
  d.AddCategory("Empty");
  CHECK(d.Categories() == std::vector<std::string>{"Empty"});

  CHECK_THROWS_AS(LoadCategoryDictionary(WriteText(dir, "bad.dic", "%\n1\tA\n%\nword\t9\n")), Error);
}
