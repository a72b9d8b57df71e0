#include "tables.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "cirm/errors.hpp"
#include "cirm/serialization.hpp"

namespace cirm::cli {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> read_table(const std::filesystem::path& path,
                                                 const std::vector<std::string>& header) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t number = 0;
  bool seen_header = false;
  while (std::getline(f, line)) {
    ++number;
    if (number == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line);
    if (!seen_header) {
      if (fields != header) throw ParseError("unexpected header in " + path.string(), number);
      seen_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw ParseError("wrong field count in " + path.string(), number);
    }
    rows.push_back(std::move(fields));
  }
  if (!seen_header) throw ParseError("missing header in " + path.string());
  return rows;
}

double to_number(const std::string& field, const std::filesystem::path& path, std::size_t row) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw ParseError("bad number '" + field + "' in " + path.string() + " row " +
                     std::to_string(row + 1));
  }
  return v;
}

std::optional<double> to_optional(const std::string& field, const std::filesystem::path& path,
                                  std::size_t row) {
  if (field.empty()) return std::nullopt;
  return to_number(field, path, row);
}

void TextTable::print(std::ostream& os) const {
  std::vector<std::size_t> width(header_.size());
  for (std::size_t c = 0; c < header_.size(); ++c) width[c] = header_[c].size();
  for (const auto& r : rows_) {
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) {
      width[c] = std::max(width[c], r[c].size());
    }
  }
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string& s = c < r.size() ? r[c] : std::string();
      os << (c ? "  " : "") << std::string(width[c] - s.size(), ' ') << s;
    }
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

CsvWriter::CsvWriter(std::vector<std::string> header) {
  for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
  text_ += '\n';
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_full(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (row_open_) text_ += ',';
  text_ += v;
  row_open_ = true;
  return *this;
}

CsvWriter& CsvWriter::cell(std::optional<double> v) { return v ? cell(*v) : cell(std::string()); }

void CsvWriter::end_row() {
  text_ += '\n';
  row_open_ = false;
}

void CsvWriter::save(const std::filesystem::path& path) const { write_text(path, text_); }

}  // namespace cirm::cli
