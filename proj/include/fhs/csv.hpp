#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fhs {

/// Numeric table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;

  /// Throws DataError when the column is missing.
  Eigen::Index column(const std::string& name) const;
  Eigen::VectorXd col(const std::string& name) const { return values.col(column(name)); }
};

/// Parses a comma-separated file with a header. Non-numeric or missing cells
/// raise DataError naming the row (1-based, header excluded) and column.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::istream& in, const std::string& source = "<input>");

void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// Splits one CSV line on commas, trimming surrounding whitespace.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace fhs
