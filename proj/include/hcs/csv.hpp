#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace hcs {

using CsvRow = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may contain commas, quotes ("") and newlines.
std::vector<CsvRow> read_csv(const std::filesystem::path& path);
std::vector<CsvRow> parse_csv(const std::string& text);

std::string csv_field(const std::string& value);
std::string csv_line(const CsvRow& row);

/// Shortest round-trip decimal form, so CSVs are byte-stable across runs.
std::string format_real(double value);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const CsvRow& header);
    void row(const CsvRow& fields);
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

}  // namespace hcs
