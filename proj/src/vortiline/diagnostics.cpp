#include "vortiline/diagnostics.hpp"

#include <cmath>

#include "vortiline/spectral_ops.hpp"

namespace vortiline {

FieldBundle FieldBundle::sqg(const ScalarField& theta, double time) {
  FieldBundle b;
  b.time_ = time;
  b.dir_ = DirectionField::sqg(theta);
  b.ev_u_ = std::make_shared<FieldEvaluator>(theta.g);
  b.ev_gu_ = std::make_shared<FieldEvaluator>(theta.g);
  VectorField u = sqg_velocity(theta);
  b.u_grid_max_ = max_norm(u);
  for (int c = 0; c < 2; ++c) {
    ScalarField f(theta.g);
    f.v = u.comp[c];
    SpectralScalar s = to_spectral(f);
    b.ev_u_->add(s);
    for (int a = 0; a < 2; ++a) b.ev_gu_->add(spectral_derivative(s, a));
  }
  b.ev_u_->finalize();
  b.ev_gu_->finalize();
  b.top_octave_ = top_octave_fraction(perp_gradient(theta));
  return b;
}

FieldBundle FieldBundle::euler(const VectorField& omega, double time) {
  FieldBundle b;
  b.time_ = time;
  b.dir_ = DirectionField::euler(omega);
  b.ev_u_ = std::make_shared<FieldEvaluator>(omega.g);
  b.ev_gu_ = std::make_shared<FieldEvaluator>(omega.g);
  VectorField u = biot_savart3(omega, 1e-6);
  b.u_grid_max_ = max_norm(u);
  for (int c = 0; c < 3; ++c) {
    ScalarField f(omega.g);
    f.v = u.comp[c];
    SpectralScalar s = to_spectral(f);
    b.ev_u_->add(s);
    for (int a = 0; a < 3; ++a) b.ev_gu_->add(spectral_derivative(s, a));
  }
  b.ev_u_->finalize();
  b.ev_gu_->finalize();
  b.top_octave_ = top_octave_fraction(omega);
  return b;
}

void FieldBundle::velocity_sample(const std::array<double, 3>& x, double u[3],
                                  double gradu[3][3]) const {
  int dim = dir_.dim();
  u[0] = u[1] = u[2] = 0.0;
  ev_u_->eval(x, u);
  double flat[9] = {0};
  ev_gu_->eval(x, flat);
  for (int c = 0; c < 3; ++c)
    for (int a = 0; a < 3; ++a) gradu[c][a] = 0.0;
  for (int c = 0; c < dim; ++c)
    for (int a = 0; a < dim; ++a) gradu[c][a] = flat[c * dim + a];
}

SegmentDiagnostics diagnose_segment(const CurveSegment& seg, const FieldBundle& fields) {
  const DirectionField& F = fields.direction();
  int dim = F.dim();
  SegmentDiagnostics d;
  d.t = fields.time();
  d.L = seg.L();
  d.resolved = seg.resolved;
  d.closed = seg.closed;
  d.seed_at_end = seg.seed_at_end;
  d.Omega_grid = F.grid_max();
  d.top_octave = fields.top_octave();
  d.samples.resize(seg.n());

  for (int i = 0; i < seg.n(); ++i) {
    DiagnosticSample& smp = d.samples[i];
    smp.s = seg.s[i];
    smp.beta = seg.beta[i];
    smp.x = seg.x[i];
    double w[3], gw[3][3], u[3], gu[3][3];
    smp.wmag = F.sample(seg.x[i], w, gw);
    fields.velocity_sample(seg.x[i], u, gu);
    double kvec[3];
    smp.kappa = xi_curvature(w, gw, dim, kvec);
    smp.tau = xi_divergence(w, gw, dim);
    if (smp.wmag > 0.0)
      for (int c = 0; c < dim; ++c) smp.xi[c] = w[c] / smp.wmag;
    double uxi = 0.0, umag2 = 0.0;
    for (int c = 0; c < dim; ++c) {
      uxi += u[c] * smp.xi[c];
      umag2 += u[c] * u[c];
    }
    smp.u_xi = uxi;
    smp.u_mag = std::sqrt(umag2);
    double trans2 = 0.0;
    for (int c = 0; c < dim; ++c) {
      double tc = u[c] - uxi * smp.xi[c];
      trans2 += tc * tc;
    }
    smp.u_trans = std::sqrt(trans2);
    // xi_perp is the principal normal (xi.grad)xi / kappa in both dimensions,
    // so kappa * u_xi_perp = u . (xi.grad)xi with straight samples giving 0
    smp.normal_defined = smp.kappa > 1e-10;
    if (smp.normal_defined) {
      double nacc = 0.0;
      for (int c = 0; c < dim; ++c) nacc += u[c] * kvec[c] / smp.kappa;
      smp.u_xi_perp = nacc;
    }
    double ag = 0.0;
    for (int c = 0; c < dim; ++c)
      for (int a = 0; a < dim; ++a) ag += smp.xi[a] * gu[c][a] * smp.xi[c];
    smp.alpha_grad = ag;
    // stash u . curvature vector; the post-pass turns it into alpha_curve
    double ukv = 0.0;
    for (int c = 0; c < dim; ++c) ukv += u[c] * kvec[c];
    smp.alpha_curve = ukv;
  }

  // curve-derivative form of the stretching rate: (u.xi)_s - u.(xi.grad)xi
  int n = seg.n();
  std::vector<double> dds(n);
  for (int i = 0; i < n; ++i) {
    if (i == 0)
      dds[i] = (d.samples[1].u_xi - d.samples[0].u_xi) / (seg.s[1] - seg.s[0]);
    else if (i == n - 1)
      dds[i] = (d.samples[n - 1].u_xi - d.samples[n - 2].u_xi) / (seg.s[n - 1] - seg.s[n - 2]);
    else
      dds[i] = (d.samples[i + 1].u_xi - d.samples[i - 1].u_xi) / (seg.s[i + 1] - seg.s[i - 1]);
  }
  for (int i = 0; i < n; ++i) d.samples[i].alpha_curve = dds[i] - d.samples[i].alpha_curve;

  // aggregates (trapezoid in s)
  double int_w = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    double ds = seg.s[i + 1] - seg.s[i];
    int_w += 0.5 * ds * (d.samples[i].wmag + d.samples[i + 1].wmag);
    d.int_kappa += 0.5 * ds * (d.samples[i].kappa + d.samples[i + 1].kappa);
    d.int_tau_abs += 0.5 * ds * (std::abs(d.samples[i].tau) + std::abs(d.samples[i + 1].tau));
  }
  d.Q = d.L > 0 ? int_w / d.L : 0.0;
  for (auto& smp : d.samples) {
    d.U = std::max(d.U, smp.u_trans);
    d.V = std::max(d.V, std::abs(smp.u_xi));
    d.Omega_L = std::max(d.Omega_L, smp.wmag);
    d.u_max_seg = std::max(d.u_max_seg, smp.u_mag);
  }
  d.w_end0 = d.samples.front().wmag;
  d.w_end1 = d.samples.back().wmag;
  d.endpoint_max = d.w_end1 >= 0.999 * d.Omega_L;
  return d;
}

StretchCheck stretch_transport_check(const SegmentDiagnostics& d, double tol) {
  StretchCheck r;
  int n = int(d.samples.size());
  if (n < 2 || d.samples.front().wmag <= 0.0) return r;
  double w0 = d.samples.front().wmag;
  double acc = 0.0;  // int_0^s tau ds'
  double wmin = d.samples.front().wmag, wmax = wmin;
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      double ds = d.samples[i].s - d.samples[i - 1].s;
      acc += 0.5 * ds * (d.samples[i - 1].tau + d.samples[i].tau);
    }
    double pred = w0 * std::exp(-acc);
    double w = d.samples[i].wmag;
    if (w > 0.0) r.max_rel_dev = std::max(r.max_rel_dev, std::abs(w - pred) / w);
    wmin = std::min(wmin, w);
    wmax = std::max(wmax, w);
  }
  double bound = std::exp(d.int_tau_abs) * wmin;
  r.comparability = wmax <= bound * (1.0 + tol);
  r.comparability_margin = std::log(bound) - std::log(wmax);
  return r;
}

}  // namespace vortiline
