#pragma once
#include "vortiline/curve.hpp"

namespace vortiline {

struct DiagnosticSample {
  double s = 0.0, beta = 0.0;
  std::array<double, 3> x{};
  double wmag = 0.0;   // |omega| (3D) or |perp grad theta| (2D)
  double kappa = 0.0;  // |(xi.grad)xi|
  double tau = 0.0;    // div xi
  double u_xi = 0.0;   // tangential velocity
  double u_xi_perp = 0.0;  // principal-normal velocity (0 if normal undefined)
  double u_trans = 0.0;    // |u - (u.xi)xi|
  double u_mag = 0.0;
  double alpha_grad = 0.0;   // (xi.grad)u . xi
  double alpha_curve = 0.0;  // (u.xi)_s - kappa u.xi_perp
  bool normal_defined = false;
  std::array<double, 3> xi{};
};

struct SegmentDiagnostics {
  double t = 0.0;
  double L = 0.0;
  double Q = 0.0;         // (1/L) int |w| ds
  double int_kappa = 0.0; // int kappa ds (kappa unsigned)
  double int_tau_abs = 0.0;
  double U = 0.0;  // max transverse speed over samples
  double V = 0.0;  // max |u.xi| over samples
  double Omega_L = 0.0;    // max |w| over the segment
  double Omega_grid = 0.0; // global grid max of |w|
  double w_end0 = 0.0, w_end1 = 0.0;  // |w| at s=0 and s=L
  double u_max_seg = 0.0;
  double top_octave = 0.0;  // resolution monitor of the underlying field
  bool resolved = true, closed = false, seed_at_end = true;
  bool endpoint_max = true;  // |w(x(L))| attains the segment max
  std::vector<DiagnosticSample> samples;
};

// Direction field plus velocity (and its gradients) frozen at one time.
class FieldBundle {
 public:
  static FieldBundle sqg(const ScalarField& theta, double time);
  static FieldBundle euler(const VectorField& omega, double time);

  const DirectionField& direction() const { return dir_; }
  const FieldEvaluator& velocity() const { return *ev_u_; }
  double time() const { return time_; }
  int dim() const { return dir_.dim(); }
  double top_octave() const { return top_octave_; }
  double u_grid_max() const { return u_grid_max_; }

  // velocity and its gradient gradu[c][a] = d_a u_c at a point
  void velocity_sample(const std::array<double, 3>& x, double u[3], double gradu[3][3]) const;

 private:
  FieldBundle() = default;
  DirectionField dir_;
  std::shared_ptr<FieldEvaluator> ev_u_, ev_gu_;
  double time_ = 0.0;
  double top_octave_ = 0.0;
  double u_grid_max_ = 0.0;
};

SegmentDiagnostics diagnose_segment(const CurveSegment& seg, const FieldBundle& fields);

struct StretchCheck {
  double max_rel_dev = 0.0;   // |w(s)| vs |w(0)| exp(-int tau)
  bool comparability = true;  // max <= exp(int |tau|) * min  (with tolerance)
  double comparability_margin = 0.0;  // log(exp(int|tau|) min / max), >= ~0 when held
};
StretchCheck stretch_transport_check(const SegmentDiagnostics& d, double tol = 1e-2);

}  // namespace vortiline
