#ifndef PPLDA_CSV_HPP
#define PPLDA_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "pplda/dataset.hpp"

namespace pplda::csv {

/// Formats with 17 significant digits so every double round-trips exactly.
std::string format_double(double v);

/// A rectangular table of already-formatted cells.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// RFC-4180 output: comma separator, '.' decimal point, LF line endings,
/// quoting only where required (comma, quote, or newline in the field).
void write(std::ostream& os, const Table& table);
void write_file(const std::string& path, const Table& table);
std::string to_string(const Table& table);

/// RFC-4180 input (accepts CRLF and a trailing newline).
/// Throws ValidationError with a line number on ragged or malformed rows.
std::vector<std::vector<std::string>> parse(std::istream& is);
std::vector<std::vector<std::string>> parse_string(const std::string& text);

/// Numeric matrix with an auto-detected header row: if any cell of the
/// first row fails to parse as a number, the row is taken as column names.
struct NumericTable {
    std::vector<std::string> column_names; // synthesized c0..c{p-1} if absent
    std::vector<std::vector<double>> rows;

    std::size_t cols() const { return column_names.size(); }
};
NumericTable read_numeric(std::istream& is);
NumericTable read_numeric_file(const std::string& path);

} // namespace pplda::csv

#endif
