#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vortiline/diagnostics.hpp"
#include "vortiline/initial_conditions.hpp"
#include "vortiline/spectral_ops.hpp"

using namespace vortiline;

namespace {

// omega = (0, 0, 2 + cos x sin y): solenoidal, strictly positive magnitude,
// field lines are exact vertical lines (xi = z_hat everywhere).
VectorField straight_field(const Grid& g) {
  VectorField w(g, 3);
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j) {
      double f = 2.0 + std::cos(g.coord(0, i)) * std::sin(g.coord(1, j));
      for (int k = 0; k < g.n[2]; ++k) w.comp[2][g.idx(i, j, k)] = f;
    }
  return w;
}

double dist3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
  return std::sqrt(s);
}

// distance from p to the polyline (no wrap handling: callers keep curves local)
double point_to_polyline(const std::array<double, 3>& p, const CurveSegment& seg) {
  double best = 1e300;
  for (int j = 0; j + 1 < seg.n(); ++j) {
    double ab[3], ap[3], den = 0.0, num = 0.0;
    for (int c = 0; c < 3; ++c) {
      ab[c] = seg.x[j + 1][c] - seg.x[j][c];
      ap[c] = p[c] - seg.x[j][c];
      den += ab[c] * ab[c];
      num += ab[c] * ap[c];
    }
    double u = den > 0 ? std::clamp(num / den, 0.0, 1.0) : 0.0;
    double d2 = 0.0;
    for (int c = 0; c < 3; ++c) {
      double d = ap[c] - u * ab[c];
      d2 += d * d;
    }
    best = std::min(best, d2);
  }
  return std::sqrt(best);
}

}  // namespace

TEST_CASE("straight field lines: trace is exact, kappa and tau vanish") {
  Grid g = Grid::make3d(32, 32, 32);
  VectorField w = straight_field(g);
  DirectionField F = DirectionField::euler(w);
  CHECK(F.dim() == 3);
  CHECK(F.grid_max() == doctest::Approx(3.0).epsilon(1e-12));

  std::array<double, 3> seed = {1.2, 2.1, 0.7};
  TraceOptions opt;
  opt.target_length = 1.5;
  CurveSegment seg = trace_segment(F, seed, opt);

  REQUIRE(seg.n() >= 10);
  CHECK(seg.seed_at_end);
  CHECK(!seg.closed);
  CHECK(seg.resolved);
  CHECK(dist3(seg.x.back(), seed) < 1e-12);
  CHECK(seg.L() == doctest::Approx(1.5).epsilon(1e-10));
  // the line is vertical: x and y frozen, z ends at the seed
  for (int i = 0; i < seg.n(); ++i) {
    CHECK(std::abs(seg.x[i][0] - 1.2) < 1e-12);
    CHECK(std::abs(seg.x[i][1] - 2.1) < 1e-12);
  }
  CHECK(seg.x.front()[2] == doctest::Approx(0.7 - 1.5).epsilon(1e-10));
  // uniform arclength after resampling
  double ds = seg.s[1] - seg.s[0];
  for (int i = 1; i < seg.n(); ++i)
    CHECK(seg.s[i] - seg.s[i - 1] == doctest::Approx(ds).epsilon(1e-9));

  // pointwise geometry: kappa = tau = 0 on straight unit-direction lines
  double wv[3], gw[3][3];
  for (int i = 0; i < seg.n(); i += 7) {
    F.sample(seg.x[i], wv, gw);
    CHECK(std::abs(xi_curvature(wv, gw, 3, nullptr)) < 1e-12);
    CHECK(std::abs(xi_divergence(wv, gw, 3)) < 1e-12);
  }

  FieldBundle fb = FieldBundle::euler(w, 0.0);
  SegmentDiagnostics d = diagnose_segment(seg, fb);
  double wmag = 2.0 + std::cos(1.2) * std::sin(2.1);
  CHECK(d.L == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(d.Q == doctest::Approx(wmag).epsilon(1e-10));
  CHECK(d.Omega_L == doctest::Approx(wmag).epsilon(1e-10));
  CHECK(d.w_end0 == doctest::Approx(wmag).epsilon(1e-10));
  CHECK(d.w_end1 == doctest::Approx(wmag).epsilon(1e-10));
  CHECK(d.endpoint_max);
  CHECK(d.int_kappa < 1e-10);
  CHECK(d.int_tau_abs < 1e-10);
  // velocity of a z-independent vertical vorticity is horizontal
  CHECK(d.V < 1e-10);
  CHECK(d.U > 0.01);
  for (auto& smp : d.samples) CHECK(std::abs(smp.alpha_grad) < 1e-10);

  StretchCheck sc = stretch_transport_check(d);
  CHECK(sc.max_rel_dev < 1e-10);
  CHECK(sc.comparability);
}

TEST_CASE("radial scalar: closed circular level sets, curvature integral 2*pi") {
  Grid g = Grid::make2d(128, 128);
  ScalarField theta = make_sqg_ic("radial-gaussian", {}, g, 0);
  DirectionField F = DirectionField::sqg(theta);
  CHECK(F.dim() == 2);
  // analytic max of A (r/s2) exp(-r^2/(2 s2)) at r = sqrt(s2)
  double pk = 4.0 * std::exp(-0.5) / std::sqrt(0.2);
  CHECK(std::abs(F.grid_max() - pk) < 0.05);

  std::array<double, 3> seed = F.argmax_position();
  double r0 = std::hypot(seed[0] - kPi, seed[1] - kPi);
  CHECK(r0 == doctest::Approx(std::sqrt(0.2)).epsilon(0.1));

  TraceOptions opt;
  opt.target_length = 10.0;
  CurveSegment seg = trace_segment(F, seed, opt);
  CHECK(seg.closed);
  CHECK(seg.resolved);
  CHECK(seg.L() == doctest::Approx(2.0 * kPi * r0).epsilon(1e-3));
  // every sample sits on the circle of the seed radius
  for (auto& p : seg.x) {
    double r = std::hypot(p[0] - kPi, p[1] - kPi);
    CHECK(std::abs(r - r0) < 1e-5);
  }

  FieldBundle fb = FieldBundle::sqg(theta, 0.0);
  SegmentDiagnostics d = diagnose_segment(seg, fb);
  CHECK(std::abs(d.int_kappa - 2.0 * kPi) < 1e-3);
  CHECK(d.int_tau_abs < 1e-4);
  // velocity is azimuthal: aligned with the level set
  for (auto& smp : d.samples) {
    CHECK(smp.u_trans < 1e-4 * std::max(1.0, smp.u_mag));
    CHECK(std::abs(smp.alpha_grad) < 1e-3);
  }
  StretchCheck sc = stretch_transport_check(d);
  CHECK(sc.max_rel_dev < 1e-5);
  CHECK(sc.comparability);
}

TEST_CASE("seed handling: vanishing seeds rejected, tight circles truncated") {
  Grid g = Grid::make2d(128, 128);
  ScalarField theta = make_sqg_ic("radial-gaussian", {}, g, 0);
  DirectionField F = DirectionField::sqg(theta);
  TraceOptions opt;

  // gradient vanishes at the gaussian center
  CHECK_THROWS_AS(trace_segment(F, {kPi, kPi, 0.0}, opt), std::runtime_error);

  // seed so close to the center that 1/kappa = r < 2h: the march cannot
  // even start, which surfaces as a degenerate-segment error
  double h = g.h_min();
  CHECK_THROWS_AS(trace_segment(F, {kPi + h, kPi, 0.0}, opt), std::runtime_error);
}

TEST_CASE("elliptical level set: curvature floor truncates at the tip") {
  Grid g = Grid::make2d(128, 128);
  ScalarField theta(g);
  double s1 = 0.5, s2 = 0.02;  // aspect 5 ellipse levels
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j) {
      double dx = g.coord(0, i) - kPi, dy = g.coord(1, j) - kPi;
      theta.at(i, j) = 4.0 * std::exp(-0.5 * (dx * dx / s1 + dy * dy / s2));
    }
  DirectionField F = DirectionField::sqg(theta);

  // seed on the minor-axis crossing of the c=1 level: radius of curvature
  // there is A^2/B = 5, at the major-axis tips it is B^2/A = 0.04 < 2h
  std::array<double, 3> seed = {kPi, kPi + 0.2, 0.0};
  TraceOptions opt;
  opt.target_length = 6.0;
  opt.stop_frac = 0.05;
  CurveSegment seg = trace_segment(F, seed, opt);
  CHECK(!seg.resolved);
  CHECK(!seg.closed);
  CHECK(seg.n() >= 5);
  CHECK(seg.L() < 3.0);
}

TEST_CASE("trace consistency: retracing from an interior point follows the same line") {
  Grid g = Grid::make3d(32, 32, 32);
  VectorField w = make_euler_ic("abc", {}, g, 0);
  DirectionField F = DirectionField::euler(w);

  TraceOptions opt;
  opt.target_length = 1.2;
  opt.direction = "both";
  CurveSegment a = trace_segment(F, {2.0, 3.0, 1.0}, opt);
  REQUIRE(a.n() >= 20);
  CHECK(!a.seed_at_end);
  CHECK(a.L() == doctest::Approx(1.2).epsilon(1e-3));

  // reference polyline fine enough that chord sagitta is negligible
  CurveSegment fine = resample_to_arclength(a, (a.s[1] - a.s[0]) / 8.0);

  int mid = a.n() / 2;
  TraceOptions opt2 = opt;
  opt2.target_length = 0.6;
  CurveSegment b = trace_segment(F, a.x[mid], opt2);
  double worst = 0.0;
  for (auto& p : b.x) worst = std::max(worst, point_to_polyline(p, fine));
  CHECK(worst < 1e-4);
}

TEST_CASE("resample: uniform spacing, pinned endpoints, preserved shape") {
  Grid g = Grid::make3d(32, 32, 32);
  VectorField w = make_euler_ic("abc", {}, g, 0);
  DirectionField F = DirectionField::euler(w);
  TraceOptions opt;
  opt.target_length = 1.0;
  CurveSegment seg = trace_segment(F, {2.0, 3.0, 1.0}, opt);

  double ds = 0.5 * g.h_min();
  CurveSegment rs = resample_to_arclength(seg, ds);
  CHECK(rs.n() == int(std::lround(seg.L() / ds)) + 1);
  CHECK(dist3(rs.x.front(), seg.x.front()) == 0.0);
  CHECK(dist3(rs.x.back(), seg.x.back()) == 0.0);
  CHECK(std::abs(rs.L() - seg.L()) < 5e-4);
  double med = rs.L() / (rs.n() - 1);
  for (int i = 1; i < rs.n(); ++i) {
    double d = rs.s[i] - rs.s[i - 1];
    CHECK(d > 0.98 * med);
    CHECK(d < 1.02 * med);
  }
  for (int i = 1; i < rs.n(); ++i) CHECK(rs.beta[i] > rs.beta[i - 1]);
  // distance to the coarse source polyline is bounded by its chord sagitta
  double worst = 0.0;
  for (auto& p : rs.x) worst = std::max(worst, point_to_polyline(p, seg));
  CHECK(worst < 1e-3);
}

TEST_CASE("weak-field stop: the march halts where the field fades") {
  Grid g = Grid::make3d(32, 32, 32);
  // straight vertical lines with |w| varying along the line; the direction
  // field machinery does not require solenoidality
  VectorField w(g, 3);
  for (int k = 0; k < g.n[2]; ++k) {
    double f = 1.1 + std::sin(g.coord(2, k));
    for (int i = 0; i < g.n[0]; ++i)
      for (int j = 0; j < g.n[1]; ++j) w.comp[2][g.idx(i, j, k)] = f;
  }
  DirectionField F = DirectionField::euler(w);
  TraceOptions opt;
  opt.target_length = 6.0;
  CurveSegment seg = trace_segment(F, {1.0, 1.0, kPi / 2}, opt);
  CHECK(seg.resolved);
  CHECK(!seg.closed);
  // |w| drops below stop_frac * |w(seed)| = 0.21 when sin z < -0.89,
  // i.e. after s = pi/2 + 1.10 marching downward
  CHECK(seg.L() > 2.5);
  CHECK(seg.L() < 2.9);
}

TEST_CASE("material stretching: ds/dbeta tracks the vorticity ratio (steady ABC)") {
  Grid g = Grid::make3d(32, 32, 32);
  VectorField w = make_euler_ic("abc", {{"amplitude", 2.0}}, g, 0);
  DirectionField F = DirectionField::euler(w);
  FieldBundle fb = FieldBundle::euler(w, 0.0);

  TraceOptions opt;
  opt.target_length = 1.0;
  opt.direction = "both";
  CurveSegment seg = trace_segment(F, {2.0, 3.0, 1.0}, opt);
  std::vector<double> w0(seg.n());
  double wv[3];
  for (int i = 0; i < seg.n(); ++i) {
    F.vec(seg.x[i], wv);
    w0[i] = std::sqrt(wv[0] * wv[0] + wv[1] * wv[1] + wv[2] * wv[2]);
  }

  // the ABC field is a steady solution: advect under its own frozen velocity
  double dt = 0.005;
  CurveSegment cur = seg;
  for (int it = 0; it < 100; ++it) cur = advect_segment(cur, fb.velocity(), fb.velocity(), dt);
  CHECK(cur.t == doctest::Approx(0.5).epsilon(1e-12));

  // Cauchy: |w(x(t))| / |w0| equals the local stretch ds/dbeta
  double worst = 0.0, rmin = 1e300, rmax = 0.0;
  for (int i = 1; i + 1 < cur.n(); ++i) {
    double dsdb = (cur.s[i + 1] - cur.s[i - 1]) / (cur.beta[i + 1] - cur.beta[i - 1]);
    F.vec(cur.x[i], wv);
    double wt = std::sqrt(wv[0] * wv[0] + wv[1] * wv[1] + wv[2] * wv[2]);
    double ratio = wt / w0[i];
    worst = std::max(worst, std::abs(dsdb / ratio - 1.0));
    rmin = std::min(rmin, dsdb);
    rmax = std::max(rmax, dsdb);
  }
  CHECK(worst < 1e-2);
  CHECK(rmax / rmin > 1.05);  // the flow genuinely stretches the segment
}

TEST_CASE("reprojection: labels are monotone and consistent with the advected curve") {
  Grid g = Grid::make3d(32, 32, 32);
  VectorField w = make_euler_ic("abc", {}, g, 0);
  DirectionField F = DirectionField::euler(w);
  FieldBundle fb = FieldBundle::euler(w, 0.0);

  TraceOptions opt;
  opt.target_length = 1.0;
  CurveSegment seg = trace_segment(F, {2.0, 3.0, 1.0}, opt);
  CurveSegment adv = seg;
  for (int it = 0; it < 40; ++it) adv = advect_segment(adv, fb.velocity(), fb.velocity(), 0.005);

  CurveSegment rp = reproject_to_line(adv, F, opt);
  REQUIRE(rp.n() >= 10);
  CHECK(rp.t == adv.t);
  for (int i = 1; i < rp.n(); ++i) CHECK(rp.beta[i] >= rp.beta[i - 1]);

  // interpolate the advected polyline at the transferred labels: the labeled
  // material point should coincide with the reprojected node
  int lo = rp.n() / 5, hi = rp.n() - rp.n() / 5;
  int strict = 0;
  for (int i = lo; i < hi; ++i) {
    if (i > lo && rp.beta[i] > rp.beta[i - 1]) ++strict;
    double b = rp.beta[i];
    int j = 0;
    while (j + 2 < adv.n() && adv.beta[j + 1] < b) ++j;
    double tloc = (b - adv.beta[j]) / (adv.beta[j + 1] - adv.beta[j]);
    tloc = std::clamp(tloc, 0.0, 1.0);
    std::array<double, 3> p;
    for (int c = 0; c < 3; ++c)
      p[c] = adv.x[j][c] + tloc * (adv.x[j + 1][c] - adv.x[j][c]);
    CHECK(dist3(p, rp.x[i]) < 2e-3);
  }
  CHECK(strict > (hi - lo) * 3 / 4);  // labels genuinely advance mid-segment

  CurveSegment closed = seg;
  closed.closed = true;
  CHECK_THROWS_AS(reproject_to_line(closed, F, opt), std::runtime_error);
}

TEST_CASE("stretching rate: gradient and curve forms agree along ABC lines") {
  Grid g = Grid::make3d(32, 32, 32);
  VectorField w = make_euler_ic("abc", {}, g, 0);
  FieldBundle fb = FieldBundle::euler(w, 0.0);
  DirectionField F = fb.direction();

  TraceOptions opt;
  opt.target_length = 1.2;
  opt.direction = "both";
  CurveSegment seg = trace_segment(F, {2.0, 3.0, 1.0}, opt);
  SegmentDiagnostics d = diagnose_segment(seg, fb);

  // Beltrami: u is parallel to w, so the transverse speed vanishes and the
  // tangential speed is |u| itself
  double amax = 0.0;
  for (auto& smp : d.samples) {
    CHECK(smp.u_trans < 1e-10);
    CHECK(smp.u_xi == doctest::Approx(smp.u_mag).epsilon(1e-10));
    amax = std::max(amax, std::abs(smp.alpha_grad));
  }
  CHECK(amax > 0.1);
  CHECK(d.U < 1e-10);
  CHECK(d.V == doctest::Approx(d.u_max_seg).epsilon(1e-10));
  for (int i = 1; i + 1 < int(d.samples.size()); ++i)
    CHECK(std::abs(d.samples[i].alpha_grad - d.samples[i].alpha_curve) < 5e-3);
}
