#include "irsa_aoi/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/core.h>

namespace irsa_aoi {

std::size_t CsvTable::column(const std::string& name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw std::out_of_range(fmt::format("CSV column '{}' not found", name));
    return static_cast<std::size_t>(it - header.begin());
}

double CsvTable::number(std::size_t row, const std::string& name) const
{
    const auto& cell = rows.at(row).at(column(name));
    std::size_t used = 0;
    const double x = std::stod(cell, &used);
    if (used != cell.size())
        throw std::invalid_argument(fmt::format("CSV cell '{}' is not a number", cell));
    return x;
}

namespace {

void write_field(std::ostream& out, const std::string& field)
{
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"')
            out << '"';
        out << c;
    }
    out << '"';
}

void write_row(std::ostream& out, const std::vector<std::string>& row)
{
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i)
            out << ',';
        write_field(out, row[i]);
    }
    out << '\n';
}

/// Reads one record; false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields)
{
    fields.clear();
    if (in.peek() == std::char_traits<char>::eof())
        return false;
    std::string cur;
    bool quoted = false;
    char c;
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    cur += '"';
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c == '\n') {
            break;
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (quoted)
        throw std::runtime_error("CSV: unterminated quoted field");
    fields.push_back(std::move(cur));
    return true;
}

}  // namespace

void write_csv(std::ostream& out, const CsvTable& table)
{
    write_row(out, table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw std::logic_error("CSV row width differs from header");
        write_row(out, row);
    }
}

CsvTable read_csv(std::istream& in)
{
    CsvTable table;
    if (!read_record(in, table.header))
        throw std::runtime_error("CSV: missing header row");
    std::vector<std::string> fields;
    while (read_record(in, fields)) {
        if (fields.size() == 1 && fields[0].empty())
            continue;
        if (fields.size() != table.header.size())
            throw std::runtime_error(
                fmt::format("CSV: row {} has {} fields, header has {}", table.rows.size() + 1, fields.size(),
                            table.header.size()));
        table.rows.push_back(fields);
    }
    return table;
}

CsvTable read_csv_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error(fmt::format("cannot open {}", path));
    return read_csv(in);
}

void write_csv_file(const std::string& path, const CsvTable& table)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error(fmt::format("cannot write {}", path));
    write_csv(out, table);
}

std::string format_number(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    return fmt::format("{}", x);
}

}  // namespace irsa_aoi
