#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace divpot::csv {

/// One data row with its 1-based line number in the source.
struct Record {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// Reads a comma-separated stream whose first line must equal `header`
/// (after trimming). Blank lines are skipped. Double-quoted fields are
/// unquoted; a stray quote is a parse error.
std::vector<Record> read_records(std::istream& in, std::string_view source,
                                 const std::vector<std::string>& header);

/// Splits one line; throws ParseError on an unbalanced quote.
std::vector<std::string> split_line(std::string_view line, std::string_view source, std::size_t line_no);

/// Quotes a field when it contains a comma, quote or newline.
std::string escape(std::string_view field);

/// 17 significant digits, round-trippable.
std::string format_number(double value);

double parse_number(std::string_view text, std::string_view source, std::size_t line_no);

}  // namespace divpot::csv
