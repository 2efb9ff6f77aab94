#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace vortiline {

std::uint32_t file_crc32(const std::string& path);

// Run metadata written next to the outputs.  Times are simulation times so
// that identical runs produce identical manifests.
struct RunManifest {
  std::string config_text;
  std::string code_version;
  std::string command;
  double sim_time_start = 0.0;
  double sim_time_end = 0.0;
  std::uint64_t steps = 0;

  struct Entry {
    std::string file;
    double time = 0.0;
    std::uint32_t crc = 0;
  };
  std::vector<Entry> snapshots;
  std::vector<Entry> outputs;  // time unused
  std::map<std::string, std::string> flags;
  std::vector<std::string> notes;

  void add_snapshot(const std::string& dir, const std::string& file, double time);
  void add_output(const std::string& dir, const std::string& file);
  std::string to_json() const;
  void save(const std::string& path) const;
};

}  // namespace vortiline
