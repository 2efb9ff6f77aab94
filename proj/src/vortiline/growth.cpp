#include "vortiline/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vortiline {

namespace {

constexpr double kE = 2.718281828459045;

double trapz(const std::vector<double>& t, const std::vector<double>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    acc += 0.5 * (t[i + 1] - t[i]) * (f[i] + f[i + 1]);
  return acc;
}

double min_image(double d, double box) {
  if (box > 0.0) d -= box * std::round(d / box);
  return d;
}

}  // namespace

double BoundConstants::C1() const { return std::exp(C0); }
double BoundConstants::CU() const { return C0 * (2.0 * C1() - 1.0); }
double BoundConstants::CV() const {
  return 2.0 * C0 * C1() + (C1() - 1.0) * (Cl + 1.0) + 2.0 * C1();
}
double BoundConstants::Cd() const { return Cu * std::max(CU(), CV()); }

BoundConstants measure_constants(const std::vector<SegmentDiagnostics>& series,
                                 const std::vector<double>& end_speed_xi) {
  if (series.empty()) throw std::invalid_argument("measure_constants: empty series");
  BoundConstants bc;
  bc.c0 = 1.0;
  bc.T0 = series.front().t;
  bc.T = series.back().t;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const SegmentDiagnostics& d = series[i];
    bc.C0 = std::max(bc.C0, std::max(d.int_kappa, d.int_tau_abs));
    if (d.Omega_grid > 0.0) bc.c0 = std::min(bc.c0, d.Omega_L / d.Omega_grid);
    if (i < end_speed_xi.size() && std::isfinite(end_speed_xi[i]) && d.V > 0.0)
      bc.Cl = std::max(bc.Cl, std::abs(end_speed_xi[i]) / d.V);
    if (d.Omega_grid > kE)
      bc.Cu = std::max(bc.Cu, d.u_max_seg / std::log(d.Omega_grid));
  }
  return bc;
}

IdentityRecord lemma_terms(const SegmentDiagnostics& prev, const SegmentDiagnostics& cur,
                           const SegmentDiagnostics& next, double box_length) {
  if (prev.samples.size() < 2 || cur.samples.size() < 2 || next.samples.size() < 2)
    throw std::invalid_argument("lemma_terms: segments need at least two samples");
  double dtp = cur.t - prev.t, dtn = next.t - cur.t;
  if (dtp <= 0.0 || dtn <= 0.0 || std::abs(dtn - dtp) > 1e-9 * dtn)
    throw std::invalid_argument("lemma_terms: snapshots must be equally spaced in time");
  // material linkage: the beta windows of the three snapshots must overlap
  double bf = cur.samples.front().beta, bb = cur.samples.back().beta;
  if (!(bb > bf)) throw std::invalid_argument("lemma_terms: degenerate beta window");
  for (const SegmentDiagnostics* o : {&prev, &next}) {
    double of = o->samples.front().beta, ob = o->samples.back().beta;
    double overlap = std::min(bb, ob) - std::max(bf, of);
    if (overlap < 0.5 * (bb - bf))
      throw std::invalid_argument("lemma_terms: snapshots are not materially linked");
  }

  double dt = 0.5 * (dtp + dtn);
  IdentityRecord r;
  r.time = cur.t;
  r.endpoint_max = cur.endpoint_max;
  r.dQdt = (next.Q - prev.Q) / (2.0 * dt);
  r.L_t = (next.L - prev.L) / (2.0 * dt);

  const std::vector<DiagnosticSample>& sm = cur.samples;
  int n = int(sm.size());
  double wL = sm.back().wmag;
  double acc = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    double ds = sm[i + 1].s - sm[i].s;
    auto f = [&](const DiagnosticSample& a) {
      double un = a.u_xi_perp;  // principal-normal component, 0 where kappa ~ 0
      return 2.0 * a.tau * a.wmag * a.u_xi - a.kappa * a.wmag * un -
             a.kappa * (a.wmag - wL) * un;
    };
    acc += 0.5 * ds * (f(sm[i]) + f(sm[i + 1]));
  }
  double L = cur.L;
  r.I1 = acc / L;
  r.I2 = (sm.back().u_xi - sm.front().u_xi) * wL / L;

  // endpoint velocity at s = 0 from the material displacement
  double exi = 0.0;
  for (int c = 0; c < 3; ++c) {
    double d = min_image(next.samples.front().x[c] - prev.samples.front().x[c], box_length);
    exi += d / (2.0 * dt) * sm.front().xi[c];
  }
  r.end_speed_xi = exi;
  r.I3 = (wL - sm.front().wmag) * (exi + sm.front().u_xi) / L;
  r.I4 = r.L_t / L * (wL - cur.Q);

  r.residual = r.dQdt - (r.I1 + r.I2 + r.I3 + r.I4);
  double scale = std::max(std::abs(r.dQdt), cur.Q / L * (cur.U + cur.V));
  r.relative_residual = scale > 0.0 ? std::abs(r.residual) / scale : 0.0;
  return r;
}

RecordBounds check_record_bounds(const IdentityRecord& rec, const SegmentDiagnostics& cur,
                                 const BoundConstants& bc, double slack) {
  RecordBounds b;
  double C1 = bc.C1(), C0 = bc.C0;
  double QL = cur.Q / cur.L;
  b.I1_bound = (2.0 * C0 * C1 * cur.V + C0 * C1 * cur.U + C0 * (C1 - 1.0) * cur.U) * QL;
  b.I2_bound = 2.0 * C1 * cur.V * QL;
  b.I3_bound = (C1 - 1.0) * (bc.Cl + 1.0) * cur.V * QL;
  auto ok = [&](double v, double bound) { return std::abs(v) <= bound + slack * (1.0 + bound); };
  b.I1_ok = ok(rec.I1, b.I1_bound);
  b.I2_ok = ok(rec.I2, b.I2_bound);
  b.I3_ok = ok(rec.I3, b.I3_bound);
  b.I4_ok = (rec.L_t > 0.0 || !rec.endpoint_max) ? true : rec.I4 <= slack;
  return b;
}

namespace {

GrowthEnvelope build_envelope(const std::vector<SegmentDiagnostics>& series,
                              const BoundConstants& bc, const std::vector<double>& end_speed_xi,
                              bool double_exp) {
  if (series.size() < 2) throw std::invalid_argument("envelope: need at least two snapshots");
  for (std::size_t i = 1; i < series.size(); ++i)
    if (!(series[i].t > series[i - 1].t))
      throw std::invalid_argument("envelope: times must increase");
  GrowthEnvelope ge;
  double Q0 = series.front().Q;
  if (!(Q0 > 0.0)) throw std::invalid_argument("envelope: Q(T0) must be positive");
  if (double_exp) {
    for (const auto& d : series)
      if (d.Omega_grid <= kE) {
        ge.skipped = true;
        ge.note = "max field amplitude <= e on the window: log-velocity bound not usable";
        return ge;
      }
  }

  double CU = bc.CU(), CV = bc.CV(), Cd = bc.Cd();
  std::vector<double> rate(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const SegmentDiagnostics& d = series[i];
    if (!(d.L > 0.0)) throw std::invalid_argument("envelope: segment length must be positive");
    rate[i] = double_exp ? Cd / d.L : (CV * d.V + CU * d.U) / d.L;
  }

  double acc = 0.0, bkm = 0.0;
  const double slack = 1e-9;
  ge.pts.resize(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const SegmentDiagnostics& d = series[i];
    if (i > 0) {
      double dt = d.t - series[i - 1].t;
      acc += 0.5 * dt * (rate[i - 1] + rate[i]);
      bkm += 0.5 * dt * (series[i - 1].Omega_grid + d.Omega_grid);
    }
    EnvelopePoint& p = ge.pts[i];
    p.time = d.t;
    p.measured_Omega = d.Omega_grid;
    p.bkm_partial = bkm;
    p.envelope = double_exp ? std::exp(std::log(bc.C1() * Q0 / bc.c0) * std::exp(acc))
                            : Q0 / bc.c0 * std::exp(bc.C0 + acc);
    p.f_kappa = d.int_kappa <= bc.C0 + slack * (1.0 + bc.C0);
    p.f_tau = d.int_tau_abs <= bc.C0 + slack * (1.0 + bc.C0);
    p.f_c0 = d.Omega_L >= bc.c0 * d.Omega_grid - slack * (1.0 + d.Omega_grid);
    p.f_end_speed = true;
    if (i < end_speed_xi.size() && std::isfinite(end_speed_xi[i]))
      p.f_end_speed = std::abs(end_speed_xi[i]) <= bc.Cl * d.V + slack * (1.0 + d.V);
    p.f_omega_log = true;
    if (double_exp)
      p.f_omega_log = d.Omega_grid > kE &&
                      d.u_max_seg <= bc.Cu * std::log(d.Omega_grid) + slack * (1.0 + d.u_max_seg);
    p.flags_ok = p.f_kappa && p.f_tau && p.f_c0 && p.f_end_speed && p.f_omega_log;
    p.dominated = p.measured_Omega <= p.envelope * (1.0 + 1e-12);
    if (!p.flags_ok) ge.hypotheses_violated = true;
    if (p.flags_ok && !p.dominated) ge.dominated_on_clean = false;
  }
  return ge;
}

}  // namespace

GrowthEnvelope growth_envelope(const std::vector<SegmentDiagnostics>& series,
                               const BoundConstants& bc,
                               const std::vector<double>& end_speed_xi) {
  return build_envelope(series, bc, end_speed_xi, false);
}

GrowthEnvelope double_exp_envelope(const std::vector<SegmentDiagnostics>& series,
                                   const BoundConstants& bc,
                                   const std::vector<double>& end_speed_xi) {
  return build_envelope(series, bc, end_speed_xi, true);
}

SeriesView to_series_view(const std::vector<SegmentDiagnostics>& series) {
  SeriesView sv;
  for (const auto& d : series) {
    sv.t.push_back(d.t);
    sv.omega.push_back(d.Omega_grid);
    sv.U.push_back(d.U);
    sv.V.push_back(d.V);
    sv.L.push_back(d.L);
  }
  return sv;
}

namespace {

// least-squares fit of log(omega) = a + p * (-log(T - t)); returns SSE
double fit_p(const std::vector<double>& t, const std::vector<double>& logw, double T, double* p) {
  double sz = 0.0, sy = 0.0, szz = 0.0, szy = 0.0;
  int n = int(t.size());
  for (int i = 0; i < n; ++i) {
    double z = -std::log(T - t[i]);
    sz += z;
    sy += logw[i];
    szz += z * z;
    szy += z * logw[i];
  }
  double det = n * szz - sz * sz;
  double slope = det != 0.0 ? (n * szy - sz * sy) / det : 0.0;
  double icept = (sy - slope * sz) / n;
  double sse = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = -std::log(T - t[i]);
    double res = logw[i] - (icept + slope * z);
    sse += res * res;
  }
  *p = slope;
  return sse;
}

}  // namespace

CriticalCaseReport critical_case_monitor(const SeriesView& sv, const BoundConstants& bc,
                                         double T_candidate) {
  int n = int(sv.t.size());
  if (n < 3 || sv.omega.size() != sv.t.size())
    throw std::invalid_argument("critical_case_monitor: need >= 3 (t, omega) samples");
  for (int i = 1; i < n; ++i)
    if (!(sv.t[i] > sv.t[i - 1]))
      throw std::invalid_argument("critical_case_monitor: times must increase");
  std::vector<double> logw(n);
  for (int i = 0; i < n; ++i) {
    if (!(sv.omega[i] > 0.0))
      throw std::invalid_argument("critical_case_monitor: omega must be positive");
    logw[i] = std::log(sv.omega[i]);
  }

  CriticalCaseReport rep;
  double t_end = sv.t.back();
  if (T_candidate > 0.0) {
    if (T_candidate <= t_end)
      throw std::invalid_argument("critical_case_monitor: T must exceed the window end");
    rep.T = T_candidate;
    fit_p(sv.t, logw, rep.T, &rep.p_fit);
  } else {
    // fit T by scanning the gap eps = T - t_end geometrically, then refine
    rep.T_fitted = true;
    double span = t_end - sv.t.front();
    double lo = std::log(1e-4 * span), hi = std::log(3.0 * span);
    double best_eps = span, best_sse = std::numeric_limits<double>::max();
    for (int k = 0; k <= 600; ++k) {
      double eps = std::exp(lo + (hi - lo) * k / 600.0);
      double p, sse = fit_p(sv.t, logw, t_end + eps, &p);
      if (sse < best_sse) {
        best_sse = sse;
        best_eps = eps;
      }
    }
    double a = std::log(best_eps) - (hi - lo) / 600.0, b = std::log(best_eps) + (hi - lo) / 600.0;
    for (int it = 0; it < 60; ++it) {  // golden-section on log(eps)
      double m1 = a + 0.381966 * (b - a), m2 = b - 0.381966 * (b - a);
      double p, s1 = fit_p(sv.t, logw, t_end + std::exp(m1), &p);
      double s2 = fit_p(sv.t, logw, t_end + std::exp(m2), &p);
      if (s1 < s2)
        b = m2;
      else
        a = m1;
    }
    rep.T = t_end + std::exp(0.5 * (a + b));
    fit_p(sv.t, logw, rep.T, &rep.p_fit);
  }

  rep.bkm_integral = trapz(sv.t, sv.omega);
  rep.bkm_divergent = rep.p_fit >= 1.0;

  if (!sv.U.empty() && int(sv.U.size()) == n && int(sv.V.size()) == n &&
      int(sv.L.size()) == n) {
    double CU = bc.CU(), CV = bc.CV();
    rep.ratio.resize(n);
    for (int i = 0; i < n; ++i) {
      if (!(sv.L[i] > 0.0))
        throw std::invalid_argument("critical_case_monitor: L must be positive");
      rep.ratio[i] = (CV * sv.V[i] + CU * sv.U[i]) * (rep.T - sv.t[i]) / sv.L[i];
      rep.sup_ratio = std::max(rep.sup_ratio, rep.ratio[i]);
    }
    rep.ratio_ok = rep.sup_ratio <= (bc.Cw > 0.0 ? bc.Cw : 1.0);
  }
  return rep;
}

std::vector<double> integrate_log_ode(const std::vector<double>& t, const std::vector<double>& L,
                                      double Q0, double C, double K, int substeps) {
  if (t.size() < 2 || L.size() != t.size())
    throw std::invalid_argument("integrate_log_ode: need matching t, L with >= 2 samples");
  if (!(Q0 > 0.0)) throw std::invalid_argument("integrate_log_ode: Q0 must be positive");
  std::vector<double> Q(t.size());
  Q[0] = Q0;
  double q = Q0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    double dt = (t[i + 1] - t[i]) / substeps;
    for (int k = 0; k < substeps; ++k) {
      double tk = t[i] + k * dt;
      auto Lat = [&](double tt) {
        double a = (tt - t[i]) / (t[i + 1] - t[i]);
        return (1.0 - a) * L[i] + a * L[i + 1];
      };
      auto f = [&](double tt, double Qv) { return C / Lat(tt) * Qv * (std::log(Qv) + K); };
      double k1 = f(tk, q);
      double k2 = f(tk + 0.5 * dt, q + 0.5 * dt * k1);
      double k3 = f(tk + 0.5 * dt, q + 0.5 * dt * k2);
      double k4 = f(tk + dt, q + dt * k3);
      q += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Q[i + 1] = q;
  }
  return Q;
}

}  // namespace vortiline
