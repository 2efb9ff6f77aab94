#pragma once
#include "vortiline/field.hpp"

namespace vortiline {

struct SqgParams {
  double nu_h = 0.0;  // hyperdiffusion coefficient on (-Laplacian)^p
  int p = 2;
  double cfl = 0.5;
  double dt_fixed = 0.0;  // > 0 overrides CFL
};

struct StepInfo {
  double dt = 0.0;
  double max_u = 0.0;
};

// Dealiased advection tendency -u.grad(theta) (+ hyperdiffusion when on).
ScalarField sqg_rhs(const ScalarField& theta, const SqgParams& prm, double* max_u = nullptr);
// One RK4 step in place.  dt resolution order: dt_override, prm.dt_fixed,
// CFL on the instantaneous velocity (with a hyperdiffusion stability cap).
StepInfo sqg_step(ScalarField& theta, const SqgParams& prm, double dt_override = 0.0);

}  // namespace vortiline
