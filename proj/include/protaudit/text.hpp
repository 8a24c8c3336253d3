#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace protaudit::text {

// ASCII case folding; bytes outside ASCII pass through unchanged.
std::string ToLower(std::string_view s);

std::string_view Trim(std::string_view s);

std::vector<std::string_view> SplitWhitespace(std::string_view s);

bool IsSpace(char c);
bool IsPunct(char c);
bool IsPunctOnly(std::string_view s);

// Lowercase and check membership of the English closed pronoun sets.
bool IsPronoun(std::string_view surface);
bool IsMasculinePronoun(std::string_view surface);
bool IsFemininePronoun(std::string_view surface);
bool IsFirstPersonPronoun(std::string_view surface);
bool IsStandalonePossessive(std::string_view surface);

// SHA-256 of raw bytes, lowercase hex.
std::string Sha256Hex(std::string_view bytes);

// SHA-256 of a file's content; throws ValidationError when unreadable.
std::string FileSha256Hex(const std::string& path);

std::string ReadFile(const std::string& path);

}  // namespace protaudit::text
