#pragma once

#include <string>
#include <vector>

namespace sparsefw::csvio {

// 17 significant digits, '.' decimal separator; round-trips doubles exactly
std::string format_real(double v);

// RFC-4180 quoting: fields containing comma, quote, or newline get quoted,
// embedded quotes doubled
std::string escape_field(const std::string& field);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(std::vector<std::string> fields);  // throws on arity mismatch
  std::size_t row_count() const { return rows_.size(); }
  std::string str() const;
  void write_file(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // column index by name, -1 when absent
  int column(const std::string& name) const;
};

// Full RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF endings.
// Throws on ragged rows or a missing header.
CsvTable read_csv_text(const std::string& text);
CsvTable read_csv(const std::string& path);

}  // namespace sparsefw::csvio
