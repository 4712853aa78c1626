#include "pplda/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pplda/errors.hpp"

namespace pplda::csv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

bool needs_quoting(const std::string& field) {
    return field.find_first_of(",\"\n\r") != std::string::npos;
}

void write_field(std::ostream& os, const std::string& field) {
    if (!needs_quoting(field)) {
        os << field;
        return;
    }
    os << '"';
    for (char c : field) {
        if (c == '"') os << '"';
        os << c;
    }
    os << '"';
}

void write_row(std::ostream& os, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        write_field(os, row[i]);
    }
    os << '\n';
}

} // namespace

void write(std::ostream& os, const Table& table) {
    if (!table.header.empty()) write_row(os, table.header);
    for (const auto& row : table.rows) write_row(os, row);
}

void write_file(const std::string& path, const Table& table) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("csv: cannot open '" + path + "' for writing");
    write(os, table);
    if (!os) throw ValidationError("csv: write to '" + path + "' failed");
}

std::string to_string(const Table& table) {
    std::ostringstream os;
    write(os, table);
    return os.str();
}

std::vector<std::vector<std::string>> parse(std::istream& is) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;

    const auto end_field = [&] {
        row.push_back(field);
        field.clear();
        field_started = false;
    };
    const auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };

    char c;
    while (is.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (is.peek() == '"') {
                    is.get(c);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started && !field.empty()) {
                    std::ostringstream os;
                    os << "csv: stray quote inside unquoted field at line " << line;
                    throw ValidationError(os.str());
                }
                in_quotes = true;
                field_started = true;
                break;
            case ',': end_field(); break;
            case '\r': break; // CRLF: handled by the following '\n'
            case '\n':
                end_row();
                ++line;
                break;
            default:
                field += c;
                field_started = true;
                break;
        }
    }
    if (in_quotes) {
        std::ostringstream os;
        os << "csv: unterminated quoted field at line " << line;
        throw ValidationError(os.str());
    }
    if (field_started || !row.empty()) end_row(); // file without trailing newline
    return rows;
}

std::vector<std::vector<std::string>> parse_string(const std::string& text) {
    std::istringstream is(text);
    return parse(is);
}

namespace {

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    return end == begin + s.size();
}

} // namespace

NumericTable read_numeric(std::istream& is) {
    const auto cells = parse(is);
    if (cells.empty()) throw ValidationError("csv: empty input");

    NumericTable out;
    std::size_t first_data_row = 0;
    bool header = false;
    double tmp;
    for (const auto& cell : cells[0]) {
        if (!parse_number(cell, tmp)) {
            header = true;
            break;
        }
    }
    if (header) {
        out.column_names = cells[0];
        first_data_row = 1;
    } else {
        out.column_names.resize(cells[0].size());
        for (std::size_t j = 0; j < cells[0].size(); ++j)
            out.column_names[j] = "c" + std::to_string(j);
    }
    const std::size_t p = out.column_names.size();
    if (first_data_row >= cells.size())
        throw ValidationError("csv: no data rows after the header");

    for (std::size_t i = first_data_row; i < cells.size(); ++i) {
        if (cells[i].size() != p) {
            std::ostringstream os;
            os << "csv: line " << (i + 1) << " has " << cells[i].size()
               << " fields, expected " << p;
            throw ValidationError(os.str());
        }
        std::vector<double> row(p);
        for (std::size_t j = 0; j < p; ++j) {
            if (!parse_number(cells[i][j], row[j])) {
                std::ostringstream os;
                os << "csv: line " << (i + 1) << ", field " << (j + 1)
                   << " is not numeric: '" << cells[i][j] << "'";
                throw ValidationError(os.str());
            }
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

NumericTable read_numeric_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("csv: cannot open '" + path + "'");
    return read_numeric(is);
}

} // namespace pplda::csv
