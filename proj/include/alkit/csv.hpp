#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace alkit {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC 4180 parser: quoted fields, doubled-quote escapes, CR/LF and LF line
// endings, embedded newlines inside quoted fields. First record is the header.
CsvTable parse_csv(std::string_view text);

std::string to_csv(const CsvTable& table);

CsvTable read_csv_file(const std::filesystem::path& path);
void write_csv_file(const std::filesystem::path& path, const CsvTable& table);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// Printed with enough digits to round-trip a double exactly.
std::string format_double(double v);

}  // namespace alkit
