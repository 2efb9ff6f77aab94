#include "vortiline/sqg.hpp"

#include <cmath>
#include <stdexcept>

#include "vortiline/spectral_ops.hpp"

namespace vortiline {
namespace {

// largest stable RK4 step for the explicit hyperdiffusion term
double hyper_dt_cap(const Grid& g, double nu_h, int p) {
  if (nu_h <= 0.0) return 1e300;
  double k2max = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    double kc = kTwoPi * (g.n[a] / 3) / g.length[a];  // dealiased band edge
    k2max += kc * kc;
  }
  double lam = nu_h * std::pow(k2max, p);
  return 2.7 / lam;
}

}  // namespace

ScalarField sqg_rhs(const ScalarField& theta, const SqgParams& prm, double* max_u) {
  VectorField u = sqg_velocity(theta);
  if (max_u) *max_u = max_norm(u);
  VectorField gt = gradient(theta);
  ScalarField adv(theta.g);
  for (std::size_t i = 0; i < theta.g.size(); ++i)
    adv.v[i] = -(u.comp[0][i] * gt.comp[0][i] + u.comp[1][i] * gt.comp[1][i]);
  SpectralScalar s = to_spectral(adv);
  if (prm.nu_h > 0.0) {
    SpectralScalar st = to_spectral(theta);
    for_each_mode(theta.g, [&](std::size_t idx, int, int, int, double kx, double ky, double kz) {
      double k2 = kx * kx + ky * ky + kz * kz;
      s.c[idx] -= prm.nu_h * std::pow(k2, prm.p) * st.c[idx];
    });
  }
  // dealias last so the tendency vanishes outside the resolved band; the
  // stability cap below assumes no mode beyond the band edge is damped
  dealias_23(s);
  return to_physical(s);
}

StepInfo sqg_step(ScalarField& theta, const SqgParams& prm, double dt_override) {
  StepInfo info;
  ScalarField k1 = sqg_rhs(theta, prm, &info.max_u);
  double dt = dt_override;
  if (dt <= 0.0) dt = prm.dt_fixed;
  if (dt <= 0.0) {
    if (info.max_u <= 0.0) throw std::runtime_error("sqg_step: zero velocity, cannot pick CFL step");
    dt = prm.cfl * theta.g.h_min() / info.max_u;
  }
  dt = std::min(dt, hyper_dt_cap(theta.g, prm.nu_h, prm.p));
  info.dt = dt;

  ScalarField tmp(theta.g);
  auto axpy = [&](const ScalarField& base, double a, const ScalarField& d) {
    for (std::size_t i = 0; i < tmp.v.size(); ++i) tmp.v[i] = base.v[i] + a * d.v[i];
  };
  axpy(theta, dt / 2, k1);
  ScalarField k2 = sqg_rhs(tmp, prm);
  axpy(theta, dt / 2, k2);
  ScalarField k3 = sqg_rhs(tmp, prm);
  axpy(theta, dt, k3);
  ScalarField k4 = sqg_rhs(tmp, prm);
  bool bad = false;
  for (std::size_t i = 0; i < theta.v.size(); ++i) {
    theta.v[i] += dt / 6 * (k1.v[i] + 2 * k2.v[i] + 2 * k3.v[i] + k4.v[i]);
    bad |= !std::isfinite(theta.v[i]);
  }
  if (bad) throw std::runtime_error("sqg_step: non-finite state (unstable step?)");
  return info;
}

}  // namespace vortiline
