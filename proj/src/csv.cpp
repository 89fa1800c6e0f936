#include "fhs/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "fhs/errors.hpp"

namespace fhs {

Eigen::Index CsvTable::column(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return static_cast<Eigen::Index>(j);
  }
  throw DataError("column '" + name + "' not found");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r\"");
    const auto last = cell.find_last_not_of(" \t\r\"");
    out.push_back(first == std::string::npos ? std::string() : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

CsvTable parse_csv(std::istream& in, const std::string& source) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file");
  table.header = split_csv_line(line);
  if (table.header.empty()) throw DataError(source + ": empty header");
  const auto k = table.header.size();

  std::vector<double> cells;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++row;
    const auto parts = split_csv_line(line);
    if (parts.size() != k) {
      throw DataError(source + ": row " + std::to_string(row) + " has " + std::to_string(parts.size()) +
                      " cells, header has " + std::to_string(k));
    }
    for (std::size_t j = 0; j < k; ++j) {
      const std::string& s = parts[j];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw DataError(source + ": non-numeric cell '" + s + "' at row " + std::to_string(row) + ", column '" +
                        table.header[j] + "'");
      }
      cells.push_back(v);
    }
  }
  table.values.resize(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < row; ++i) {
    for (std::size_t j = 0; j < k; ++j) table.values(i, j) = cells[i * k + j];
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_csv(in, path.string());
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (std::size_t j = 0; j < table.header.size(); ++j) out << (j ? "," : "") << table.header[j];
  out << '\n';
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) out << (j ? "," : "") << format_double(table.values(i, j));
    out << '\n';
  }
}

}  // namespace fhs
