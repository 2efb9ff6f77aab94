#include "vortiline/manifest.hpp"

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace vortiline {

std::uint32_t file_crc32(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("crc32: cannot open " + path);
  unsigned long crc = ::crc32(0L, Z_NULL, 0);
  unsigned char buf[65536];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) crc = ::crc32(crc, buf, unsigned(n));
  std::fclose(f);
  return std::uint32_t(crc);
}

void RunManifest::add_snapshot(const std::string& dir, const std::string& file, double time) {
  snapshots.push_back({file, time, file_crc32(dir + "/" + file)});
}

void RunManifest::add_output(const std::string& dir, const std::string& file) {
  outputs.push_back({file, 0.0, file_crc32(dir + "/" + file)});
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["format"] = "vortiline-manifest-1";
  j["code_version"] = code_version;
  j["command"] = command;
  j["config"] = config_text;
  j["sim_time_start"] = sim_time_start;
  j["sim_time_end"] = sim_time_end;
  j["steps"] = steps;
  j["snapshots"] = nlohmann::json::array();
  for (auto& s : snapshots)
    j["snapshots"].push_back({{"file", s.file}, {"time", s.time}, {"crc32", s.crc}});
  j["outputs"] = nlohmann::json::array();
  for (auto& o : outputs) j["outputs"].push_back({{"file", o.file}, {"crc32", o.crc}});
  j["flags"] = flags;
  j["notes"] = notes;
  return j.dump(2) + "\n";
}

void RunManifest::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("manifest: cannot open " + path);
  out << to_json();
}

}  // namespace vortiline
