#pragma once
#include <complex>
#include <vector>

#include "vortiline/grid.hpp"

namespace vortiline {

struct ScalarField {
  Grid g;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const Grid& grid) : g(grid), v(grid.size(), 0.0) {}
  double& at(int i, int j, int k = 0) { return v[g.idx(i, j, k)]; }
  double at(int i, int j, int k = 0) const { return v[g.idx(i, j, k)]; }
};

struct SpectralScalar {
  Grid g;
  std::vector<std::complex<double>> c;

  SpectralScalar() = default;
  explicit SpectralScalar(const Grid& grid) : g(grid), c(grid.spec_size(), 0.0) {}
};

// ncomp independent scalar components on a shared grid (velocity, vorticity).
struct VectorField {
  Grid g;
  int ncomp = 0;
  std::array<std::vector<double>, 3> comp;

  VectorField() = default;
  VectorField(const Grid& grid, int nc) : g(grid), ncomp(nc) {
    for (int c = 0; c < nc; ++c) comp[c].assign(grid.size(), 0.0);
  }
};

}  // namespace vortiline
