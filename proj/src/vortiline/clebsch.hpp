#pragma once
#include <array>
#include <memory>
#include <string>
#include <vector>

#include "vortiline/evaluator.hpp"

namespace vortiline {

// Synthetic z-invariant vorticity tubes built from two level-set functions
// phi and psi with omega = grad(phi) x grad(psi), plus a decomposition of
// the induced velocity at a point into near-field, mid-range, and far-field
// kernel integrals with smooth radial cutoffs.

// Smooth radial cutoff: 1 for r <= 1, 0 for r >= 2, quintic blend between
// (C^2, monotone nonincreasing).
double chi_cutoff(double r);
// d(chi_cutoff)/dr (continuous, supported on (1, 2)).
double chi_cutoff_prime(double r);

struct ClebschOptions {
  int n = 512;   // horizontal grid resolution (n x n plane)
  int nz = 8;    // vertical resolution; fields are z-invariant
  // Swirl amplitude.  The default is calibrated so that max|u| / log(Omega)
  // is flat across the lambda-doubling family (and Omega(1) > e).
  double amplitude = kDefaultAmplitude;
  double core_radius = 0.35;     // profile plateau ends here
  double support_radius = 1.40;  // profile vanishes beyond this radius
  // Counterexample family: sharpen psi too (psi = sin(nu y), nu = sqrt(mu)).
  bool sharpen_psi = false;
  // Configured bound on max|grad psi|; construction fails if exceeded.
  // When sharpen_psi is set the bound is raised to nu automatically.
  double psi_gradient_bound = 1.0;

  static constexpr double kDefaultAmplitude = 1.6715;
};

struct ClebschField {
  Grid grid;        // 3D grid (n x n x nz), z-invariant data
  ScalarField phi;  // 3D level-set function, sharpens with lambda
  ScalarField psi;  // 3D level-set function with bounded gradient
  VectorField omega;  // grad(phi) x grad(psi); only the z component is nonzero

  double lambda = 1.0;     // family sharpness parameter
  double mu = 4.0;         // internal profile sharpness (4 * lambda)
  double nu = 1.0;         // psi wavenumber (1, or sqrt(mu) when sharpened)
  double amplitude = ClebschOptions::kDefaultAmplitude;
  std::array<double, 3> center{kPi, kPi, 0.0};

  // Axis-aligned region box around the tube: probes and their cutoff balls
  // must stay inside it (horizontal axes; the box spans the periodic z axis).
  std::array<double, 3> region_lo{0, 0, 0};
  std::array<double, 3> region_hi{kTwoPi, kTwoPi, kTwoPi};

  // Refined pointwise extrema (sub-grid patch search).
  double Omega = 0.0;          // max |omega|
  double max_grad_phi = 0.0;   // max |grad phi|
  double max_grad_psi = 0.0;   // max |grad psi|
  double max_vecpot = 0.0;     // max |phi grad psi|
  double max_u = 0.0;          // max |u|, u = induced velocity
  double u_l2 = 0.0;           // || u ||_L2 over the box

  // z = 0 planes retained for quadrature work (2D grids).
  ScalarField omega3_2d;   // vorticity z component
  ScalarField vecpot2_2d;  // phi * d(psi)/dy (the only nonzero component
                           // of phi grad psi; psi varies along y only)
  ScalarField u1_2d, u2_2d;

  bool ball_in_region(const std::array<double, 3>& x, double rho) const;
};

// Builds one member of the sharpness family.  max|grad phi| and Omega grow
// proportionally to lambda while psi keeps a lambda-independent gradient
// bound.  Rejects lambda values the grid cannot resolve, with advice on the
// minimum grid size.
ClebschField make_clebsch_family(double lambda, const ClebschOptions& opts = {});

struct SplitQuadrature {
  // Radial nodes (Gauss-Legendre panels split at the cutoff joints).
  int nr_near = 96;    // near ball [0, 2 delta]
  int nr_shell = 48;   // inner cutoff shell [delta, 2 delta]
  int nr_mid = 144;    // mid annulus [delta, 2 rho]
  int nr_ring = 64;    // outer cutoff ring [rho, 2 rho]
  int nr_img = 128;    // periodic-image correction [0, 2 rho]
  int ntheta = 40;     // Gauss-Legendre nodes in cos(theta)
  int nphi = 96;       // uniform azimuthal nodes
  int upsample = 6;    // plane refinement factor for field interpolation
  int nz_far = 64;     // vertical resolution of the far-field spectral solve
  int n_img = 64;      // image-kernel table resolution (n_img^3)
  double tau_img = 0.02;  // spectral mollifier for the image-kernel table
};

struct SplitConfig {
  double rho = 0.75;   // outer cutoff radius (> 0)
  double delta = 0.0;  // inner cutoff radius; 0 selects min(1/Omega, rho/2)
  SplitQuadrature quad;
};

// One velocity decomposition at a probe point.  All vectors are the signed
// term values; I1 + I3 + I4 telescopes to the full periodic Biot-Savart
// velocity (I3 = C + D + E from moving the curl onto the cutoffs via the
// vector potential phi grad psi; I4 = A + B from moving it onto u).
struct VelocitySplit {
  std::array<double, 3> I1{};        // near ball, inner cutoff weight
  std::array<double, 3> C{};         // vector potential x outer cutoff gradient
  std::array<double, 3> D{};         // vector potential x inner cutoff gradient
  std::array<double, 3> E{};         // kernel-gradient mid-annulus term
  std::array<double, 3> I3{};        // C + D + E (taken from the direct
                                     // quadrature when clipped; the parts
                                     // identity needs the ball inside the cell)
  std::array<double, 3> I3_direct{}; // unsplit mid-annulus quadrature (check)
  std::array<double, 3> A{};         // velocity x outer cutoff gradient
  std::array<double, 3> B{};         // I4 - A (kernel-gradient far remainder)
  std::array<double, 3> I4{};        // far field: spectral + image correction
  std::array<double, 3> far_spectral{};  // masked-complement spectral solve
  std::array<double, 3> far_image{};     // periodic-image kernel correction
  std::array<double, 3> total{};     // I1 + I3 + I4
  std::array<double, 3> u_ref{};     // interpolated spectral velocity at x
  double delta = 0.0;
  double rho = 0.0;
  double Omega = 0.0;
  double rel_gap = 0.0;  // |total - u_ref| / |u_ref|
  // True when 2 rho exceeds the half-box: every quadrature ray is then cut
  // at its periodic-cell exit, and C + D + E no longer reproduces I3 (the
  // parts identity acquires a cell-boundary term).
  bool clipped = false;
};

// Reusable splitter: refines the field planes once, then evaluates the
// decomposition at many probe points.
class VelocitySplitter {
 public:
  VelocitySplitter(const ClebschField& field, const SplitConfig& cfg);
  ~VelocitySplitter();

  VelocitySplit split(const std::array<double, 3>& x) const;
  double delta() const { return delta_; }
  double rho() const { return rho_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double delta_ = 0.0, rho_ = 0.0;
};

// One-shot convenience wrapper.
VelocitySplit split_velocity(const ClebschField& field, const SplitConfig& cfg,
                             const std::array<double, 3>& x);

struct LogVelocityMember {
  double lambda = 0.0;
  double Omega = 0.0;
  double max_u = 0.0;
};

struct LogVelocityReport {
  std::vector<LogVelocityMember> members;
  std::vector<double> ratios;  // max_u / log(Omega)
  double Cu_fit = 0.0;         // slope of max_u against log(Omega)
  double intercept = 0.0;
  double residual_rms = 0.0;
  double spread = 0.0;  // (max ratio - min ratio) / mean ratio
  bool ratio_increasing = false;  // monotone ratio growth across the family
  bool bounded = false;  // spread small or ratios nonincreasing
  bool rejected = false;
  std::string reason;
};

inline LogVelocityMember to_member(const ClebschField& f) {
  return {f.lambda, f.Omega, f.max_u};
}

// Fits max|u| against log(Omega) over a family and reports whether the
// ratio stays bounded.  Throws on fewer than 3 members or any member with
// Omega <= e; degenerate families (no spread in log Omega) are rejected
// with a diagnostic in the report.
LogVelocityReport log_velocity_check(const std::vector<LogVelocityMember>& family);

}  // namespace vortiline
