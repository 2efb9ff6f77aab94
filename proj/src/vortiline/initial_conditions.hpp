#pragma once
#include <cstdint>
#include <map>
#include <random>
#include <string>

#include "vortiline/field.hpp"

namespace vortiline {

// Deterministic uniform variates independent of standard-library
// distribution implementations.
struct DetRng {
  std::mt19937_64 eng;
  explicit DetRng(std::uint64_t seed) : eng(seed) {}
  double u01() { return std::ldexp(double(eng() >> 11), -53); }          // [0,1)
  double sym() { return 2.0 * u01() - 1.0; }                             // [-1,1)
};

using ParamMap = std::map<std::string, double>;

// SQG scalar fields: radial-gaussian | two-gaussian | random-band
ScalarField make_sqg_ic(const std::string& name, const ParamMap& params, const Grid& g,
                        std::uint64_t seed);
// 3D vorticity fields (solenoidal): abc | taylor-green | anti-parallel-tubes
VectorField make_euler_ic(const std::string& name, const ParamMap& params, const Grid& g,
                          std::uint64_t seed);

}  // namespace vortiline
