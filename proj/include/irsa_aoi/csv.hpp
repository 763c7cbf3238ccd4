#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace irsa_aoi {

/// Header plus string cells; every emitted table has a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column, throws std::out_of_range when missing.
    std::size_t column(const std::string& name) const;
    double number(std::size_t row, const std::string& name) const;
};

void write_csv(std::ostream& out, const CsvTable& table);
/// RFC 4180 style: quoted fields may hold commas, quotes and newlines.
CsvTable read_csv(std::istream& in);

CsvTable read_csv_file(const std::string& path);
void write_csv_file(const std::string& path, const CsvTable& table);

/// Shortest text that parses back to the same double ("nan", "inf" included).
std::string format_number(double x);

}  // namespace irsa_aoi
