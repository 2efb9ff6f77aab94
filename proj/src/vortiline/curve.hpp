#pragma once
#include <memory>
#include <string>

#include "vortiline/evaluator.hpp"

namespace vortiline {

// A polyline sample of an integral curve of the direction field.
// Positions are unwrapped (continuous across the periodic seam); s is
// cumulative chord arclength; beta is the material label (arclength at the
// time the segment was first traced).
struct CurveSegment {
  int dim = 3;
  double t = 0.0;
  std::vector<std::array<double, 3>> x;
  std::vector<double> s;
  std::vector<double> beta;
  bool resolved = true;     // false: truncated at a curvature radius < floor
  bool closed = false;      // returned to its seed (closed field line)
  bool seed_at_end = true;  // seed point sits at s = L (one-sided trace)

  int n() const { return int(x.size()); }
  double L() const { return s.empty() ? 0.0 : s.back(); }
};

// Pointwise geometry of the unit direction xi = w/|w| from w and its
// gradient (grad[c][a] = d_a w_c), via the quotient rule so no derivative of
// xi itself is ever formed.  xi_curvature returns |(xi.grad)xi| and, when
// kvec is non-null, the curvature vector; xi_divergence returns div xi.
double xi_curvature(const double w[3], const double grad[3][3], int dim, double kvec[3]);
double xi_divergence(const double w[3], const double grad[3][3], int dim);

// Direction field: vorticity (3D) or perp-gradient of theta (2D), with all
// first derivatives, evaluated off-grid through one shared evaluator pair.
class DirectionField {
 public:
  DirectionField() = default;  // empty; assign from sqg()/euler()
  static DirectionField sqg(const ScalarField& theta);
  static DirectionField euler(const VectorField& omega);

  int dim() const { return dim_; }
  const Grid& grid() const { return g_; }
  double grid_max() const { return grid_max_; }
  std::array<double, 3> argmax_position() const { return argmax_; }

  // field vector only (used by trace stages)
  void vec(const std::array<double, 3>& x, double w[3]) const;
  // vector plus gradient grad[c][a] = d_a w_c; returns |w|
  double sample(const std::array<double, 3>& x, double w[3], double grad[3][3]) const;

 private:
  Grid g_;
  int dim_ = 0;
  double grid_max_ = 0.0;
  std::array<double, 3> argmax_{};
  std::shared_ptr<FieldEvaluator> ev_w_, ev_g_;
};

struct TraceOptions {
  double target_length = 1.0;
  std::string direction = "one-sided";  // one-sided | both
  double step_frac = 0.3;               // trace step = step_frac * h_min
  double stop_frac = 0.1;               // stop when |w| < stop_frac * |w(seed)|
  double seed_floor = 1e-6;             // reject seed if |w| < seed_floor * grid max
  double curvature_floor_cells = 2.0;   // truncate when 1/kappa < this * h
  bool detect_closure = true;
};

// Integrates dx/ds = w/|w| with RK4 from the seed.  One-sided mode traces
// against the direction so the seed ends up at s = L; both mode splits
// target_length across the two directions with the seed interior.
CurveSegment trace_segment(const DirectionField& F, const std::array<double, 3>& seed,
                           const TraceOptions& opt);

// Uniform-arclength resampling (Catmull-Rom in s); beta interpolated,
// endpoints pinned.
CurveSegment resample_to_arclength(const CurveSegment& seg, double ds);

// Heun step of every sample through the flow; beta labels ride along.
// vel_t / vel_next evaluate the velocity components at the two time levels.
CurveSegment advect_segment(const CurveSegment& seg, const FieldEvaluator& vel_t,
                            const FieldEvaluator& vel_next, double dt);

// Re-anchor an advected open segment on the direction field at its new time:
// retrace through the advected seed endpoint, then transfer beta labels by
// nearest-point projection from the advected polyline.
CurveSegment reproject_to_line(const CurveSegment& advected, const DirectionField& F,
                               const TraceOptions& opt);

}  // namespace vortiline
