#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fluoinv/grid.hpp"

namespace fluoinv::cli {

/// Version tag written on the first line of every CSV, e.g.
/// "# schema: fluoinv.nodal/1".
inline constexpr int kCsvSchemaVersion = 1;

/// Numbers use 17 significant digits so files round-trip exactly.
std::string format_number(double v);

class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, const std::string& schema, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  /// Mixed rows; numeric cells should already be formatted with format_number.
  void row(const std::vector<std::string>& cells);
  void close();
  const std::filesystem::path& path() const noexcept { return path_; }

private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

/// x, y, value per node (y = 0 in 1D), in node order.
void write_nodal(const std::filesystem::path& path, const GridFunction& u, const std::string& field);

struct NodalCsv {
  std::string schema;
  std::vector<Point> points;
  std::vector<double> values;
};
NodalCsv read_nodal(const std::filesystem::path& path);

}  // namespace fluoinv::cli
