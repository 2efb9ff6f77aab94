#include "vortiline/csvio.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vortiline {

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : path_(path), ncols_(columns.size()) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("csv: cannot open " + path + " for writing");
  f_ = f;
  std::string hdr;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) hdr += ',';
    hdr += columns[i];
  }
  hdr += '\n';
  std::fwrite(hdr.data(), 1, hdr.size(), f);
}

CsvWriter::~CsvWriter() { close(); }

void CsvWriter::row(const std::vector<double>& vals) {
  std::vector<std::string> cells(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) cells[i] = csv_double(vals[i]);
  row_raw(cells);
}

void CsvWriter::row_raw(const std::vector<std::string>& cells) {
  if (!f_) throw std::logic_error("csv: write after close");
  if (cells.size() != ncols_) throw std::invalid_argument("csv: column count mismatch in " + path_);
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  std::fwrite(line.data(), 1, line.size(), static_cast<std::FILE*>(f_));
}

void CsvWriter::close() {
  if (f_) {
    std::fclose(static_cast<std::FILE*>(f_));
    f_ = nullptr;
  }
}

int CsvTable::col(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return int(i);
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path);
  CsvTable t;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (header) {
      t.columns = cells;
      header = false;
      continue;
    }
    std::vector<double> r(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) r[i] = cells[i].empty() ? 0.0 : std::stod(cells[i]);
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace vortiline
