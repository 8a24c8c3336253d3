#include "protaudit/csv.hpp"

#include "protaudit/error.hpp"

namespace protaudit::csv {

std::vector<Record> Parse(std::string_view content, const std::string& file_name) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;  // any character seen for the current record
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    if (field_started) {
      end_field();
      records.push_back(std::move(current));
    }
    current = Record{};
    field.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (!field_started && c != '\n' && c != '\r') {
      field_started = true;
      current.line = line;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < content.size() && content[i + 1] == '\n') break;
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(c);
    }
  }
  if (in_quotes) throw ParseError(file_name, current.line, "unterminated quoted field");
  end_record();
  return records;
}

std::string Escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string JoinRow(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += Escape(fields[i]);
  }
  return out;
}

}  // namespace protaudit::csv
