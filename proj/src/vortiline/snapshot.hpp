#pragma once
#include <string>
#include <vector>

#include "vortiline/field.hpp"

namespace vortiline {

// Binary snapshot: magic "VLN1", u32 dim, u32 n[dim], u32 ncomp, f64 time,
// f64 length[dim], then ncomp * prod(n) f64 values row-major (x slowest).
// Little-endian throughout.
struct Snapshot {
  Grid g;
  double time = 0.0;
  std::vector<std::vector<double>> comps;
};

void write_snapshot(const std::string& path, const Grid& g,
                    const std::vector<const std::vector<double>*>& comps, double time);
Snapshot read_snapshot(const std::string& path);

}  // namespace vortiline
