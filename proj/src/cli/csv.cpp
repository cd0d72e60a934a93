#include "fluoinv/cli/csv.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace fluoinv::cli {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& schema,
                     const std::vector<std::string>& columns)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(columns.size()) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out_ << "# schema: fluoinv." << schema << "/" << kCsvSchemaVersion << "\n";
  row(columns);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("CsvWriter: row width does not match the header");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out_ << ',';
    const auto& c = cells[k];
    if (c.find_first_of(",\"\n") != std::string::npos) {
      out_ << '"';
      for (char ch : c) out_ << (ch == '"' ? "\"\"" : std::string(1, ch));
      out_ << '"';
    } else {
      out_ << c;
    }
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw std::runtime_error("error writing " + path_.string());
}

void write_nodal(const std::filesystem::path& path, const GridFunction& u, const std::string& field) {
  CsvWriter w(path, "nodal." + field, {"x", "y", "value"});
  const auto& g = u.grid();
  for (std::size_t n = 0; n < u.size(); ++n) {
    const Point p = g.coordinate(n);
    w.row(std::vector<double>{p.x, p.y, u[n]});
  }
  w.close();
}

NodalCsv read_nodal(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  NodalCsv out;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# schema: ", 0) != 0)
    throw std::runtime_error(path.string() + ": missing schema line");
  out.schema = line.substr(10);
  if (!std::getline(in, line) || line != "x,y,value") throw std::runtime_error(path.string() + ": bad header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double x, y, v;
    char c1, c2;
    if (!(ss >> x >> c1 >> y >> c2 >> v) || c1 != ',' || c2 != ',')
      throw std::runtime_error(path.string() + ": malformed row \"" + line + "\"");
    out.points.push_back({x, y});
    out.values.push_back(v);
  }
  return out;
}

}  // namespace fluoinv::cli
