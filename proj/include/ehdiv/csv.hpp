#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ehdiv::csv {

/// Reals are written with 12 significant digits; NaN is an empty field.
std::string format(double value);
std::string format(std::uint64_t value);

/// RFC 4180 quoting: fields containing a comma, quote, CR or LF are quoted
/// and embedded quotes doubled.
std::string escape(std::string_view field);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws std::invalid_argument if the row width differs from the header.
  void add_row(std::vector<std::string> row);
  /// Index of a header column; throws std::out_of_range if absent.
  std::size_t column(std::string_view name) const;

  void write(std::ostream& out) const;
  std::string str() const;
};

/// Parses text written by Table::write (quoted fields supported).
Table parse(std::string_view text);

}  // namespace ehdiv::csv
