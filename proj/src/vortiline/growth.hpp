#pragma once
#include <string>

#include "vortiline/diagnostics.hpp"

namespace vortiline {

// Constants entering the growth bounds.  c0/C0/Cl/Cu/Cw are hypotheses on the
// segment family; C1, CU, CV, Cd are derived exactly from them.
struct BoundConstants {
  double c0 = 1.0;  // comparability floor: Omega_L >= c0 * Omega
  double C0 = 0.0;  // cap on both int |kappa| ds and int |tau| ds
  double Cl = 0.0;  // endpoint tangential speed <= Cl * V
  double Cu = 0.0;  // max |u| on segment <= Cu * log Omega
  double Cw = 0.0;  // critical-case ratio cap (< 1 means regular up to T)
  double T0 = 0.0, T = 0.0;

  double C1() const;  // exp(C0)
  double CU() const;  // C0 (2 C1 - 1)
  double CV() const;  // 2 C0 C1 + (C1 - 1)(Cl + 1) + 2 C1
  double Cd() const;  // Cu * max(CU, CV): rate constant of the log bound
};

// Running extremes over a diagnostics window turn the hypotheses into
// measured quantities: C0 = max(int kappa, int |tau|), c0 = min Omega_L/Omega,
// Cl = max |endpoint speed . xi| / V, Cu = max u_max / log Omega (where
// Omega > e).  end_speed_xi may be empty or shorter than the series; entries
// that are NaN are skipped.
BoundConstants measure_constants(const std::vector<SegmentDiagnostics>& series,
                                 const std::vector<double>& end_speed_xi = {});

// One evaluation of the mean-vorticity evolution identity
//   dQ/dt = I1 + I2 + I3 + I4
// on three materially linked snapshots of the same segment.
struct IdentityRecord {
  double time = 0.0;
  double dQdt = 0.0;  // centered finite difference of Q
  double I1 = 0.0;    // (1/L) int [2 tau w u.xi - kappa w u.n - kappa (w - w_L) u.n] ds
  double I2 = 0.0;    // (1/L) [u.xi(L) - u.xi(0)] w(L)
  double I3 = 0.0;    // (1/L) [w(L) - w(0)] (dx/dt.xi + u.xi)(x(0))
  double I4 = 0.0;    // (L_t/L) (w(L) - Q)
  double residual = 0.0;           // dQdt - (I1+I2+I3+I4)
  double relative_residual = 0.0;  // residual / max(|dQdt|, Q/L (U+V))
  double L_t = 0.0;
  double end_speed_xi = 0.0;  // dx(0)/dt . xi from endpoint displacement
  bool endpoint_max = true;
};

// prev/cur/next must be equally spaced in time and share the material beta
// frame (advected/reprojected snapshots of one segment).  Throws
// std::invalid_argument when the snapshots cannot be materially linked.
IdentityRecord lemma_terms(const SegmentDiagnostics& prev, const SegmentDiagnostics& cur,
                           const SegmentDiagnostics& next, double box_length);

// Term-by-term bounds with the given constants; I4 must be <= 0 whenever
// L_t <= 0 and the endpoint-max convention holds.
struct RecordBounds {
  double I1_bound = 0.0, I2_bound = 0.0, I3_bound = 0.0;
  bool I1_ok = true, I2_ok = true, I3_ok = true, I4_ok = true;
  bool all_ok() const { return I1_ok && I2_ok && I3_ok && I4_ok; }
};
RecordBounds check_record_bounds(const IdentityRecord& rec, const SegmentDiagnostics& cur,
                                 const BoundConstants& bc, double slack = 1e-9);

// Growth envelopes evaluated against a diagnostics series.
struct EnvelopePoint {
  double time = 0.0;
  double envelope = 0.0;
  double measured_Omega = 0.0;  // grid max
  double bkm_partial = 0.0;     // int Omega dt' up to this time
  bool dominated = true;        // measured_Omega <= envelope
  bool f_kappa = true, f_tau = true, f_c0 = true;  // per-time hypothesis flags
  bool f_end_speed = true;                         // |dx/dt.xi| <= Cl V
  bool f_omega_log = true;  // Omega > e and max|u| <= Cu log Omega (double-exp only)
  bool flags_ok = true;
};
struct GrowthEnvelope {
  std::vector<EnvelopePoint> pts;
  bool hypotheses_violated = false;  // some flag failed somewhere
  bool dominated_on_clean = true;    // dominance held wherever flags held
  bool skipped = false;              // double-exp only: Omega <= e on window
  std::string note;
};

// Single-exponential bound Q(T0)/c0 exp(C0 + int (CV V + CU U)/L dt').
GrowthEnvelope growth_envelope(const std::vector<SegmentDiagnostics>& series,
                               const BoundConstants& bc,
                               const std::vector<double>& end_speed_xi = {});

// Double-exponential bound exp(log(C1 Q(T0)/c0) exp(int Cd/L dt')); requires
// Omega > e on the window, otherwise returns skipped with a note.
GrowthEnvelope double_exp_envelope(const std::vector<SegmentDiagnostics>& series,
                                   const BoundConstants& bc,
                                   const std::vector<double>& end_speed_xi = {});

// Critical-case and BKM monitor over a (possibly synthetic) max series.
struct SeriesView {
  std::vector<double> t, omega;
  std::vector<double> U, V, L;  // optional; leave empty to skip the ratio
};
SeriesView to_series_view(const std::vector<SegmentDiagnostics>& series);

struct CriticalCaseReport {
  double T = 0.0;           // candidate singularity time (supplied or fitted)
  bool T_fitted = false;
  double sup_ratio = 0.0;   // sup (CV V + CU U)(T - t)/L
  bool ratio_ok = true;     // sup_ratio <= Cw (vs 1 when Cw unset)
  double p_fit = 0.0;       // slope of log omega vs -log(T - t)
  double bkm_integral = 0.0;
  bool bkm_divergent = false;  // p_fit >= 1: int (T-t)^-p dt diverges
  std::vector<double> ratio;   // empty when U/V/L absent
};
// T_candidate <= 0 requests a least-squares fit of T and p; T must exceed the
// window end, otherwise throws std::invalid_argument.
CriticalCaseReport critical_case_monitor(const SeriesView& sv, const BoundConstants& bc,
                                         double T_candidate = 0.0);

// RK4 integration of dQ/dt = (C/L(t)) Q (log Q + K) on the sampled L(t);
// returns Q at each t.  Oracle for the closed-form double-exp envelope.
std::vector<double> integrate_log_ode(const std::vector<double>& t, const std::vector<double>& L,
                                      double Q0, double C, double K, int substeps = 64);

}  // namespace vortiline
