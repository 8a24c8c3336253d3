#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace protaudit::csv {

struct Record {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

// RFC-4180 reader: comma separators, double-quote quoting with "" escapes,
// embedded newlines inside quoted fields, LF or CRLF record endings. Blank
// lines are skipped. Throws ParseError on an unterminated quote.
std::vector<Record> Parse(std::string_view content, const std::string& file_name);

// Quotes a field when it contains a comma, quote, CR or LF.
std::string Escape(std::string_view field);

std::string JoinRow(const std::vector<std::string>& fields);

}  // namespace protaudit::csv
