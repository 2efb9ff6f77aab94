#pragma once
#include "vortiline/fft.hpp"

namespace vortiline {

// Visit every stored r2c mode with its physical wavenumber vector.
template <class F>
inline void for_each_mode(const Grid& g, F&& f) {
  auto ns = g.nspec();
  std::size_t idx = 0;
  for (int i = 0; i < ns[0]; ++i) {
    double kx = g.wavenumber(0, i);
    for (int j = 0; j < ns[1]; ++j) {
      double ky = g.wavenumber(1, j);
      for (int k = 0; k < ns[2]; ++k, ++idx) {
        double kz = g.dim == 3 ? g.wavenumber(2, k) : 0.0;
        f(idx, i, j, k, kx, ky, kz);
      }
    }
  }
}

// Hermitian weight of a stored mode: interior half-axis modes stand in for
// their conjugates as well.
inline double mode_weight(const Grid& g, int j, int k) {
  int last = g.dim == 2 ? j : k;
  int nlast = g.dim == 2 ? g.n[1] : g.n[2];
  return (last == 0 || (nlast % 2 == 0 && last == nlast / 2)) ? 1.0 : 2.0;
}

// --- transforms ---------------------------------------------------------
inline SpectralScalar to_spectral(const ScalarField& f) { return fft::forward(f); }
inline ScalarField to_physical(const SpectralScalar& s) { return fft::inverse(s); }

// --- mode surgery --------------------------------------------------------
void zero_nyquist(SpectralScalar& s, int axis);
SpectralScalar spectral_derivative(const SpectralScalar& s, int axis);
void dealias_23(SpectralScalar& s);
ScalarField dealias_23(const ScalarField& f);

// --- differential operators (physical in, physical out) -----------------
ScalarField derivative(const ScalarField& f, int axis);
VectorField gradient(const ScalarField& f);
// 2D only: (-d/dy, d/dx) f
VectorField perp_gradient(const ScalarField& f);
ScalarField divergence(const VectorField& u);
VectorField curl3(const VectorField& u);

// --- inversions ----------------------------------------------------------
// 2D: u = grad^perp (-Delta)^{-1/2} theta
VectorField sqg_velocity(const ScalarField& theta);
// 3D: u with curl u = omega, div u = 0.  Rejects inputs whose relative
// spectral divergence exceeds div_tol.
VectorField biot_savart3(const VectorField& omega, double div_tol = 1e-8);
// Remove the irrotational part in place.
void solenoidal_project(VectorField& w);
// ||k . w_hat||_2 / || |k| w_hat ||_2 (0 for the zero field)
double relative_divergence(const VectorField& w);
// 2D scalar streamfunction inversion: psi with -Delta psi = f (zero mean).
ScalarField poisson_neg(const ScalarField& f);

// --- reductions ----------------------------------------------------------
double max_abs(const ScalarField& f);
double max_norm(const VectorField& u);  // max over points of |u(x)|
double mean(const ScalarField& f);
double integral(const ScalarField& f);
double l2_sq(const ScalarField& f);                          // int f^2 dx
double dot_integral(const VectorField& a, const VectorField& b);
double spectral_l2_sq(const SpectralScalar& s);              // Parseval check
// Fraction of spectral energy in the upper half of the retained band
// (a resolution monitor; near 0 for well-resolved fields).
double top_octave_fraction(const SpectralScalar& s);
double top_octave_fraction(const VectorField& u);

}  // namespace vortiline
