#pragma once
#include <array>
#include <cstddef>
#include <stdexcept>

namespace vortiline {

inline constexpr double kTwoPi = 6.28318530717958647692528676655900577;
inline constexpr double kPi = kTwoPi / 2.0;

// Uniform periodic grid on [0, length[a]) per axis.  dim is 2 or 3; for
// dim == 2 the z axis is a single plane and ignored.  Real data is stored
// row-major with x slowest: idx = (ix*ny + iy)*nz + iz.
struct Grid {
  int dim = 2;
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> length{kTwoPi, kTwoPi, kTwoPi};

  static Grid make2d(int nx, int ny) {
    if (nx < 4 || ny < 4) throw std::invalid_argument("grid: need at least 4 points per axis");
    Grid g;
    g.dim = 2;
    g.n = {nx, ny, 1};
    return g;
  }
  static Grid make3d(int nx, int ny, int nz) {
    if (nx < 4 || ny < 4 || nz < 4) throw std::invalid_argument("grid: need at least 4 points per axis");
    Grid g;
    g.dim = 3;
    g.n = {nx, ny, nz};
    return g;
  }

  std::size_t size() const { return std::size_t(n[0]) * n[1] * n[2]; }
  double h(int a) const { return length[a] / n[a]; }
  double h_min() const {
    double m = h(0);
    for (int a = 1; a < dim; ++a) m = h(a) < m ? h(a) : m;
    return m;
  }
  std::size_t idx(int i, int j, int k = 0) const {
    return (std::size_t(i) * n[1] + j) * n[2] + k;
  }
  double coord(int a, int i) const { return length[a] * i / n[a]; }

  // r2c layout: the last active axis is halved to n/2+1 complex entries.
  std::array<int, 3> nspec() const {
    if (dim == 2) return {n[0], n[1] / 2 + 1, 1};
    return {n[0], n[1], n[2] / 2 + 1};
  }
  std::size_t spec_size() const {
    auto s = nspec();
    return std::size_t(s[0]) * s[1] * s[2];
  }
  std::size_t sidx(int i, int j, int k = 0) const {
    auto s = nspec();
    return (std::size_t(i) * s[1] + j) * s[2] + k;
  }
  // Integer mode number for storage index i along axis a (r2c half axis
  // only ever sees i <= n/2, where the formula is the identity).
  int kindex(int a, int i) const { return i <= n[a] / 2 ? i : i - n[a]; }
  double wavenumber(int a, int i) const { return kTwoPi * kindex(a, i) / length[a]; }

  bool operator==(const Grid& o) const {
    return dim == o.dim && n == o.n && length == o.length;
  }
};

}  // namespace vortiline
