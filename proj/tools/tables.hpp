#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cirm::cli {

// Rows of a small CSV input with a fixed header. Empty fields are kept.
std::vector<std::vector<std::string>> read_table(const std::filesystem::path& path,
                                                 const std::vector<std::string>& header);
double to_number(const std::string& field, const std::filesystem::path& path, std::size_t row);
std::optional<double> to_optional(const std::string& field, const std::filesystem::path& path,
                                  std::size_t row);

// Fixed-width table with 3 significant digits for numbers.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  void print(std::ostream& os) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// CSV builder writing full-precision numbers.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& cell(double v);
  CsvWriter& cell(const std::string& v);
  CsvWriter& cell(std::optional<double> v);
  void end_row();
  void save(const std::filesystem::path& path) const;

 private:
  std::string text_;
  bool row_open_ = false;
};

}  // namespace cirm::cli
