#include "divpot/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>

#include "divpot/errors.hpp"

namespace divpot::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

}  // namespace

std::vector<std::string> split_line(std::string_view line, std::string_view source, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      if (!trim(current).empty() || was_quoted) {
        throw ParseError(std::string(source), line_no, "unexpected quote");
      }
      current.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.emplace_back(was_quoted ? current : std::string(trim(current)));
      current.clear();
      was_quoted = false;
    } else {
      if (was_quoted && c != ' ' && c != '\t' && c != '\r') {
        throw ParseError(std::string(source), line_no, "text after closing quote");
      }
      if (!was_quoted) current += c;
    }
  }
  if (quoted) throw ParseError(std::string(source), line_no, "unterminated quote");
  fields.emplace_back(was_quoted ? current : std::string(trim(current)));
  return fields;
}

std::vector<Record> read_records(std::istream& in, std::string_view source, const std::vector<std::string>& header) {
  std::vector<Record> records;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (trim(view).empty()) continue;
    auto fields = split_line(view, source, line_no);
    if (!have_header) {
      if (fields != header) {
        throw ParseError(std::string(source), line_no,
                         "expected header '" + join(header) + "', got '" + std::string(trim(view)) + "'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw ParseError(std::string(source), line_no,
                       "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    records.push_back(Record{line_no, std::move(fields)});
  }
  if (in.bad()) throw IoError("read failure on " + std::string(source));
  if (!have_header) throw ParseError(std::string(source), line_no == 0 ? 1 : line_no, "missing header");
  return records;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_number(std::string_view text, std::string_view source, std::size_t line_no) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw ParseError(std::string(source), line_no, "invalid number '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace divpot::csv
