#include "vortiline/euler3d.hpp"

#include <cmath>
#include <stdexcept>

#include "vortiline/spectral_ops.hpp"

namespace vortiline {
namespace {

double hyper_dt_cap(const Grid& g, double nu_h, int p) {
  if (nu_h <= 0.0) return 1e300;
  double k2max = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    double kc = kTwoPi * (g.n[a] / 3) / g.length[a];
    k2max += kc * kc;
  }
  return 2.7 / (nu_h * std::pow(k2max, p));
}

}  // namespace

VectorField euler_rhs(const VectorField& omega, const EulerParams& prm, double* max_u) {
  const Grid& g = omega.g;
  VectorField u = biot_savart3(omega, prm.div_tol);
  if (max_u) *max_u = max_norm(u);
  // gradients of every component of omega and u
  std::array<std::array<std::vector<double>, 3>, 3> gw, gu;  // [comp][axis]
  for (int c = 0; c < 3; ++c) {
    ScalarField fw(g), fu(g);
    fw.v = omega.comp[c];
    fu.v = u.comp[c];
    SpectralScalar sw = to_spectral(fw), su = to_spectral(fu);
    for (int a = 0; a < 3; ++a) {
      gw[c][a] = to_physical(spectral_derivative(sw, a)).v;
      gu[c][a] = to_physical(spectral_derivative(su, a)).v;
    }
  }
  VectorField rhs(g, 3);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < g.size(); ++i) {
      double adv = u.comp[0][i] * gw[c][0][i] + u.comp[1][i] * gw[c][1][i] +
                   u.comp[2][i] * gw[c][2][i];
      double stretch = omega.comp[0][i] * gu[c][0][i] + omega.comp[1][i] * gu[c][1][i] +
                       omega.comp[2][i] * gu[c][2][i];
      rhs.comp[c][i] = stretch - adv;
    }
  // add hyperdiffusion, dealias, and project the tendency
  std::array<SpectralScalar, 3> s;
  for (int c = 0; c < 3; ++c) {
    ScalarField f(g);
    f.v = rhs.comp[c];
    s[c] = to_spectral(f);
  }
  if (prm.nu_h > 0.0) {
    for (int c = 0; c < 3; ++c) {
      ScalarField f(g);
      f.v = omega.comp[c];
      SpectralScalar sw = to_spectral(f);
      for_each_mode(g, [&](std::size_t idx, int, int, int, double kx, double ky, double kz) {
        double k2 = kx * kx + ky * ky + kz * kz;
        s[c].c[idx] -= prm.nu_h * std::pow(k2, prm.p) * sw.c[idx];
      });
    }
  }
  // dealias last: no tendency beyond the resolved band (the hyperdiffusion
  // stability cap assumes the band edge is the stiffest damped mode)
  for (int c = 0; c < 3; ++c) dealias_23(s[c]);
  for_each_mode(g, [&](std::size_t idx, int, int, int, double kx, double ky, double kz) {
    double k2 = kx * kx + ky * ky + kz * kz;
    if (k2 == 0.0) return;
    std::complex<double> kd = (kx * s[0].c[idx] + ky * s[1].c[idx] + kz * s[2].c[idx]) / k2;
    s[0].c[idx] -= kx * kd;
    s[1].c[idx] -= ky * kd;
    s[2].c[idx] -= kz * kd;
  });
  for (int c = 0; c < 3; ++c) rhs.comp[c] = to_physical(s[c]).v;
  return rhs;
}

StepInfo euler_step(VectorField& omega, const EulerParams& prm, double dt_override) {
  StepInfo info;
  VectorField k1 = euler_rhs(omega, prm, &info.max_u);
  double dt = dt_override;
  if (dt <= 0.0) dt = prm.dt_fixed;
  if (dt <= 0.0) {
    if (info.max_u <= 0.0)
      throw std::runtime_error("euler_step: zero velocity, cannot pick CFL step");
    dt = prm.cfl * omega.g.h_min() / info.max_u;
  }
  dt = std::min(dt, hyper_dt_cap(omega.g, prm.nu_h, prm.p));
  info.dt = dt;

  VectorField tmp(omega.g, 3);
  auto axpy = [&](const VectorField& base, double a, const VectorField& d) {
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < tmp.comp[c].size(); ++i)
        tmp.comp[c][i] = base.comp[c][i] + a * d.comp[c][i];
  };
  axpy(omega, dt / 2, k1);
  VectorField k2 = euler_rhs(tmp, prm);
  axpy(omega, dt / 2, k2);
  VectorField k3 = euler_rhs(tmp, prm);
  axpy(omega, dt, k3);
  VectorField k4 = euler_rhs(tmp, prm);
  bool bad = false;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < omega.comp[c].size(); ++i) {
      omega.comp[c][i] += dt / 6 * (k1.comp[c][i] + 2 * k2.comp[c][i] + 2 * k3.comp[c][i] + k4.comp[c][i]);
      bad |= !std::isfinite(omega.comp[c][i]);
    }
  if (bad) throw std::runtime_error("euler_step: non-finite state (unstable step?)");
  return info;
}

double kinetic_energy(const VectorField& omega) {
  VectorField u = biot_savart3(omega, 1e-6);
  return 0.5 * dot_integral(u, u);
}

double helicity(const VectorField& omega) {
  VectorField u = biot_savart3(omega, 1e-6);
  return dot_integral(u, omega);
}

}  // namespace vortiline
