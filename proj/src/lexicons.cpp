#include "protaudit/lexicons.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "protaudit/error.hpp"
#include "protaudit/text.hpp"

namespace protaudit {
namespace {

std::optional<double> ParseDouble(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::size_t> ParseSize(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::pair<std::size_t, std::size_t> ParseHeader(const std::string& file, const std::string& line) {
  const auto parts = text::SplitWhitespace(line);
  std::optional<std::size_t> vocab;
  std::optional<std::size_t> dim;
  if (parts.size() == 2) {
    vocab = ParseSize(parts[0]);
    dim = ParseSize(parts[1]);
  }
  if (!vocab || !dim || *dim == 0) throw ParseError(file, 1, "expected header '<vocab> <dim>'");
  return {*vocab, *dim};
}

EmbeddingStore LoadText(const std::string& file, EmbeddingLoadStats& stats) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open embedding file: " + file);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(file, 1, "empty embedding file");
  const auto [vocab, dim] = ParseHeader(file, line);
  EmbeddingStore store(dim);
  std::vector<double> vec(dim);
  std::size_t line_no = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto parts = text::SplitWhitespace(line);
    if (parts.empty()) continue;
    const std::string word(parts[0]);
    if (parts.size() - 1 != dim) {
      throw ParseError(file, line_no,
                       "word '" + word + "' has " + std::to_string(parts.size() - 1) + " values, expected " +
                           std::to_string(dim));
    }
    for (std::size_t i = 0; i < dim; ++i) {
      auto v = ParseDouble(parts[i + 1]);
      if (!v) throw ParseError(file, line_no, "word '" + word + "' has a non-numeric value");
      vec[i] = *v;
    }
    ++rows;
    if (std::all_of(vec.begin(), vec.end(), [](double x) { return x == 0.0; })) {
      ++stats.zero_vectors;
    } else if (!store.Add(word, vec)) {
      ++stats.duplicates;
    }
  }
  if (rows != vocab) {
    throw ParseError(file, line_no,
                     "header declares " + std::to_string(vocab) + " words, body has " + std::to_string(rows));
  }
  return store;
}

EmbeddingStore LoadBinary(const std::string& file, EmbeddingLoadStats& stats) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot open embedding file: " + file);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(file, 1, "empty embedding file");
  const auto [vocab, dim] = ParseHeader(file, line);
  EmbeddingStore store(dim);
  std::vector<double> vec(dim);
  std::vector<unsigned char> raw(dim * 4);
  for (std::size_t row = 0; row < vocab; ++row) {
    std::string word;
    int c = in.get();
    while (c == '\n' || c == '\r') c = in.get();
    while (c != EOF && c != ' ') {
      word.push_back(static_cast<char>(c));
      c = in.get();
    }
    if (c == EOF) {
      throw ParseError(file, 0,
                       "header declares " + std::to_string(vocab) + " words, body has " + std::to_string(row));
    }
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
      throw ParseError(file, 0, "word '" + word + "' is truncated, expected " + std::to_string(dim) + " values");
    }
    for (std::size_t i = 0; i < dim; ++i) {
      std::uint32_t bits = static_cast<std::uint32_t>(raw[4 * i]) |
                           (static_cast<std::uint32_t>(raw[4 * i + 1]) << 8) |
                           (static_cast<std::uint32_t>(raw[4 * i + 2]) << 16) |
                           (static_cast<std::uint32_t>(raw[4 * i + 3]) << 24);
      vec[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
    if (std::all_of(vec.begin(), vec.end(), [](double x) { return x == 0.0; })) {
      ++stats.zero_vectors;
    } else if (!store.Add(word, vec)) {
      ++stats.duplicates;
    }
  }
  for (int c = in.get(); c != EOF; c = in.get()) {
    if (!text::IsSpace(static_cast<char>(c))) {
      throw ParseError(file, 0, "body is longer than the declared " + std::to_string(vocab) + " words");
    }
  }
  return store;
}

}  // namespace

std::optional<EmbeddingFormat> ParseEmbeddingFormat(std::string_view s) {
  const std::string lower = text::ToLower(s);
  if (lower == "text" || lower == "text_w2v") return EmbeddingFormat::kTextW2v;
  if (lower == "binary" || lower == "binary_w2v") return EmbeddingFormat::kBinaryW2v;
  return std::nullopt;
}

EmbeddingStore::EmbeddingStore(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw ValidationError("embedding dimension must be positive");
}

bool EmbeddingStore::Add(std::string word, std::span<const double> vector) {
  if (vector.size() != dimension_) {
    throw ValidationError("vector for '" + word + "' has length " + std::to_string(vector.size()) +
                          ", store dimension is " + std::to_string(dimension_));
  }
  if (std::all_of(vector.begin(), vector.end(), [](double x) { return x == 0.0; })) return false;
  if (index_.count(word)) return false;
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  data_.insert(data_.end(), vector.begin(), vector.end());
  return true;
}

std::optional<std::span<const double>> EmbeddingStore::Lookup(std::string_view word) const {
  auto row = [&](std::size_t i) { return std::span<const double>(data_.data() + i * dimension_, dimension_); };
  if (auto it = index_.find(text::ToLower(word)); it != index_.end()) return row(it->second);
  if (auto it = index_.find(std::string(word)); it != index_.end()) return row(it->second);
  return std::nullopt;
}

EmbeddingStore EmbeddingStore::Scaled(double factor) const {
  EmbeddingStore out = *this;
  for (double& x : out.data_) x *= factor;
  return out;
}

EmbeddingStore LoadEmbeddings(const std::filesystem::path& path, EmbeddingFormat format,
                              EmbeddingLoadStats* stats) {
  EmbeddingLoadStats local;
  EmbeddingLoadStats& s = stats ? *stats : local;
  return format == EmbeddingFormat::kTextW2v ? LoadText(path.string(), s) : LoadBinary(path.string(), s);
}

void WriteTextEmbeddings(const EmbeddingStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << store.size() << ' ' << store.dimension() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& w : store.words()) {
    out << w;
    const std::span<const double> v = *store.Lookup(w);
    for (double x : v) out << ' ' << x;
    out << '\n';
  }
}

double Cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ValidationError("cosine of vectors with lengths " + std::to_string(u.size()) + " and " +
                          std::to_string(v.size()));
  }
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw UndefinedCosineError("cosine with a zero vector is undefined");
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

Lexicon MakeLexicon(std::string name, std::span<const std::string> words) {
  Lexicon lex{std::move(name), {}};
  for (const auto& w : words) {
    auto t = text::Trim(w);
    if (!t.empty()) lex.words.insert(text::ToLower(t));
  }
  if (lex.words.empty()) throw ValidationError("lexicon '" + lex.name + "' is empty");
  return lex;
}

Lexicon LoadLexicon(const std::filesystem::path& path, std::optional<std::string> name) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open lexicon file: " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto t = text::Trim(line);
    if (!t.empty()) words.emplace_back(t);
  }
  return MakeLexicon(name.value_or(path.stem().string()), words);
}

Lexicon UnionLexicons(std::string name, std::span<const Lexicon> parts) {
  Lexicon out{std::move(name), {}};
  for (const auto& p : parts) out.words.insert(p.words.begin(), p.words.end());
  if (out.words.empty()) throw ValidationError("lexicon '" + out.name + "' is empty");
  return out;
}

void AffectLexicon::Add(std::string word, AffectScore score) {
  auto in_range = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_range(score.valence) || !in_range(score.arousal)) {
    throw ValidationError("affect scores for '" + word + "' fall outside [0, 1]");
  }
  entries_.insert_or_assign(text::ToLower(word), score);
}

std::optional<AffectScore> AffectLexicon::Lookup(std::string_view word) const {
  auto it = entries_.find(text::ToLower(word));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

AffectLexicon LoadAffectLexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open affect lexicon: " + path.string());
  AffectLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::Trim(line).empty() || line.front() == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string col; std::getline(ss, col, '\t');) cols.push_back(col);
    if (cols.size() < 3) throw ParseError(path.string(), line_no, "expected word, valence, arousal columns");
    auto v = ParseDouble(text::Trim(cols[1]));
    auto a = ParseDouble(text::Trim(cols[2]));
    if (!v || !a) {
      if (line_no == 1) continue;  // header
      throw ParseError(path.string(), line_no, "non-numeric score for '" + cols[0] + "'");
    }
    try {
      lex.Add(std::string(text::Trim(cols[0])), {*v, *a});
    } catch (const ValidationError& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return lex;
}

void CategoryDictionary::AddCategory(const std::string& category) { categories_[category]; }

void CategoryDictionary::AddPattern(const std::string& category, const std::string& pattern) {
  if (pattern.empty()) throw ValidationError("empty pattern in category " + category);
  if (text::ToLower(pattern) != pattern) throw ValidationError("pattern '" + pattern + "' is not lowercase");
  const auto star = pattern.find('*');
  if (star != std::string::npos && star != pattern.size() - 1) {
    throw ValidationError("pattern '" + pattern + "' has a wildcard before its end");
  }
  categories_[category].push_back(pattern);
  if (star == std::string::npos) {
    literals_[pattern].insert(category);
  } else {
    prefixes_.emplace_back(pattern.substr(0, star), category);
  }
}

std::set<std::string> CategoryDictionary::Match(std::string_view token) const {
  std::set<std::string> out;
  if (auto it = literals_.find(std::string(token)); it != literals_.end()) out = it->second;
  for (const auto& [prefix, category] : prefixes_) {
    if (token.substr(0, prefix.size()) == prefix) out.insert(category);
  }
  return out;
}

std::vector<std::string> CategoryDictionary::Categories() const {
  std::vector<std::string> out;
  for (const auto& [name, patterns] : categories_) out.push_back(name);
  return out;
}

CategoryDictionary LoadCategoryDictionary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open category dictionary: " + path.string());
  const std::string file = path.string();
  CategoryDictionary dict;
  std::map<std::string, std::string> names;  // id -> category
  int section = 0;                            // 0 before "%", 1 header, 2 body
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t = text::Trim(line);
    if (t.empty()) continue;
    if (t == "%") {
      ++section;
      if (section > 2) throw ParseError(file, line_no, "unexpected third '%' marker");
      continue;
    }
    const auto parts = text::SplitWhitespace(t);
    if (section == 0) throw ParseError(file, line_no, "dictionary must start with '%'");
    if (section == 1) {
      if (parts.size() < 2) throw ParseError(file, line_no, "expected '<id> <category>'");
      std::string category;
      for (std::size_t i = 1; i < parts.size(); ++i) category += (i > 1 ? " " : "") + std::string(parts[i]);
      names[std::string(parts[0])] = category;
      dict.AddCategory(category);
      continue;
    }
    if (parts.size() < 2) throw ParseError(file, line_no, "pattern without categories");
    for (std::size_t i = 1; i < parts.size(); ++i) {
      auto it = names.find(std::string(parts[i]));
      if (it == names.end()) {
        throw ParseError(file, line_no, "unknown category id '" + std::string(parts[i]) + "'");
      }
      try {
        dict.AddPattern(it->second, std::string(parts[0]));
      } catch (const ValidationError& e) {
        throw ParseError(file, line_no, e.what());
      }
    }
  }
  if (section != 2) throw ParseError(file, line_no, "missing '%' section markers");
  return dict;
}

std::set<std::string> CategoryMatch(std::string_view token, const CategoryDictionary& dict) {
  return dict.Match(token);
}

}  // namespace protaudit
