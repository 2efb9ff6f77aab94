#pragma once
#include "vortiline/field.hpp"
#include "vortiline/sqg.hpp"  // StepInfo

namespace vortiline {

struct EulerParams {
  double nu_h = 0.0;
  int p = 2;
  double cfl = 0.5;
  double dt_fixed = 0.0;
  double div_tol = 1e-8;
};

// Dealiased, solenoidally projected vorticity tendency
// -(u.grad)omega + (omega.grad)u (+ hyperdiffusion when on).
VectorField euler_rhs(const VectorField& omega, const EulerParams& prm, double* max_u = nullptr);
StepInfo euler_step(VectorField& omega, const EulerParams& prm, double dt_override = 0.0);

double kinetic_energy(const VectorField& omega);  // (1/2) int |u|^2
double helicity(const VectorField& omega);        // int u . omega

}  // namespace vortiline
