#pragma once
#include <string>
#include <vector>

namespace vortiline {

// Full round-trip precision for doubles in CSV output.
std::string csv_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<double>& vals);
  void row_raw(const std::vector<std::string>& cells);
  void close();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::size_t ncols_;
  void* f_ = nullptr;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  int col(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(const std::string& path);

}  // namespace vortiline
