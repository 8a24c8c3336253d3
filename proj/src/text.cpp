#include "protaudit/text.hpp"

#include <openssl/evp.h>

#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "protaudit/error.hpp"

namespace protaudit::text {
namespace {

template <std::size_t N>
bool InSet(std::string_view surface, const std::array<std::string_view, N>& set) {
  const std::string lower = ToLower(surface);
  for (auto w : set) {
    if (lower == w) return true;
  }
  return false;
}

constexpr std::array<std::string_view, 4> kMasculine = {"he", "him", "his", "himself"};
constexpr std::array<std::string_view, 4> kFeminine = {"she", "her", "hers", "herself"};
constexpr std::array<std::string_view, 10> kFirstPerson = {
    "i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves"};
constexpr std::array<std::string_view, 5> kThirdPlural = {"they", "them", "their", "theirs",
                                                          "themselves"};
constexpr std::array<std::string_view, 5> kStandalonePossessive = {"his", "hers", "mine",
                                                                   "ours", "theirs"};

}  // namespace

std::string ToLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool IsPunct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitWhitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && IsSpace(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !IsSpace(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool IsPunctOnly(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!IsPunct(c)) return false;
  }
  return true;
}

bool IsMasculinePronoun(std::string_view surface) { return InSet(surface, kMasculine); }
bool IsFemininePronoun(std::string_view surface) { return InSet(surface, kFeminine); }
bool IsFirstPersonPronoun(std::string_view surface) { return InSet(surface, kFirstPerson); }
bool IsStandalonePossessive(std::string_view surface) {
  return InSet(surface, kStandalonePossessive);
}

bool IsPronoun(std::string_view surface) {
  return IsMasculinePronoun(surface) || IsFemininePronoun(surface) ||
         IsFirstPersonPronoun(surface) || InSet(surface, kThirdPlural);
}

std::string Sha256Hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string FileSha256Hex(const std::string& path) { return Sha256Hex(ReadFile(path)); }

}  // namespace protaudit::text
