#include "alkit/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "alkit/errors.hpp"

namespace alkit {

namespace {

bool needs_quoting(std::string_view field) {
  return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

std::string quote_field(std::string_view field) {
  if (!needs_quoting(field)) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool record_started = false;

  size_t i = 0;
  const size_t n = text.size();
  auto end_field = [&]() {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&]() {
    end_field();
    records.push_back(std::move(record));
    record.clear();
    record_started = false;
  };

  while (i < n) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          field += '"';
          i += 2;
        } else {
          in_quotes = false;
          ++i;
        }
      } else {
        field += c;
        ++i;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field.empty() && !field_started) {
          in_quotes = true;
          field_started = true;
          record_started = true;
          ++i;
        } else {
          // stray quote inside an unquoted field; keep it literal
          field += c;
          ++i;
        }
        break;
      case ',':
        end_field();
        record_started = true;
        ++i;
        break;
      case '\r':
        if (i + 1 < n && text[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        end_record();
        ++i;
        break;
      default:
        field += c;
        field_started = true;
        record_started = true;
        ++i;
    }
  }
  if (in_quotes) throw ParseError("csv: unterminated quoted field at end of input");
  if (field_started || record_started || !record.empty()) end_record();

  CsvTable table;
  if (records.empty()) return table;
  table.header = std::move(records.front());
  table.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
  return table;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  auto append_record = [&out](const std::vector<std::string>& rec) {
    for (size_t i = 0; i < rec.size(); ++i) {
      if (i) out += ',';
      out += quote_field(rec[i]);
    }
    out += '\n';
  };
  append_record(table.header);
  for (const auto& row : table.rows) append_record(row);
  return out;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  return parse_csv(read_text_file(path));
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& table) {
  write_text_file(path, to_csv(table));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace alkit
