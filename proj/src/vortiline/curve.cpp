#include "vortiline/curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vortiline {
namespace {

double norm3(const double v[3], int dim) {
  double s = 0.0;
  for (int c = 0; c < dim; ++c) s += v[c] * v[c];
  return std::sqrt(s);
}

}  // namespace

// kappa = |(xi.grad)xi| and tau = div xi, from w and grad[c][a] = d_a w_c,
// via the quotient rule (no grid derivatives of the normalized field).
double xi_curvature(const double w[3], const double grad[3][3], int dim, double kvec[3]) {
  double m = norm3(w, dim);
  if (m == 0.0) {
    if (kvec)
      for (int c = 0; c < 3; ++c) kvec[c] = 0.0;
    return 0.0;
  }
  double xi[3] = {0, 0, 0};
  for (int c = 0; c < dim; ++c) xi[c] = w[c] / m;
  double kv[3] = {0, 0, 0};
  for (int c = 0; c < dim; ++c) {
    double acc = 0.0;
    for (int a = 0; a < dim; ++a) {
      double wg = 0.0;  // sum_b w_b d_a w_b
      for (int b = 0; b < dim; ++b) wg += w[b] * grad[b][a];
      double dxi = grad[c][a] / m - w[c] * wg / (m * m * m);
      acc += xi[a] * dxi;
    }
    kv[c] = acc;
  }
  if (kvec)
    for (int c = 0; c < 3; ++c) kvec[c] = kv[c];
  return norm3(kv, dim);
}

double xi_divergence(const double w[3], const double grad[3][3], int dim) {
  double m = norm3(w, dim);
  if (m == 0.0) return 0.0;
  double div = 0.0;
  for (int c = 0; c < dim; ++c) {
    double wg = 0.0;
    for (int b = 0; b < dim; ++b) wg += w[b] * grad[b][c];
    div += grad[c][c] / m - w[c] * wg / (m * m * m);
  }
  return div;
}

DirectionField DirectionField::sqg(const ScalarField& theta) {
  DirectionField F;
  F.g_ = theta.g;
  F.dim_ = 2;
  SpectralScalar st = to_spectral(theta);
  // w = perp grad theta
  std::array<SpectralScalar, 3> w;
  w[0] = spectral_derivative(st, 1);
  for (auto& c : w[0].c) c = -c;
  w[1] = spectral_derivative(st, 0);
  F.ev_w_ = std::make_shared<FieldEvaluator>(theta.g);
  F.ev_g_ = std::make_shared<FieldEvaluator>(theta.g);
  std::array<std::vector<double>, 2> wp;
  for (int c = 0; c < 2; ++c) {
    F.ev_w_->add(w[c]);
    wp[c] = to_physical(w[c]).v;
    for (int a = 0; a < 2; ++a) F.ev_g_->add(spectral_derivative(w[c], a));
  }
  F.ev_w_->finalize();
  F.ev_g_->finalize();
  double best = -1.0;
  std::size_t bi = 0;
  for (std::size_t i = 0; i < theta.g.size(); ++i) {
    double m = wp[0][i] * wp[0][i] + wp[1][i] * wp[1][i];
    if (m > best) {
      best = m;
      bi = i;
    }
  }
  F.grid_max_ = std::sqrt(best);
  int j = int(bi % theta.g.n[1]);
  int i = int(bi / theta.g.n[1]);
  F.argmax_ = {theta.g.coord(0, i), theta.g.coord(1, j), 0.0};
  return F;
}

DirectionField DirectionField::euler(const VectorField& omega) {
  if (omega.g.dim != 3 || omega.ncomp != 3)
    throw std::invalid_argument("DirectionField::euler: 3D vorticity required");
  DirectionField F;
  F.g_ = omega.g;
  F.dim_ = 3;
  F.ev_w_ = std::make_shared<FieldEvaluator>(omega.g);
  F.ev_g_ = std::make_shared<FieldEvaluator>(omega.g);
  for (int c = 0; c < 3; ++c) {
    ScalarField f(omega.g);
    f.v = omega.comp[c];
    SpectralScalar s = to_spectral(f);
    F.ev_w_->add(s);
    for (int a = 0; a < 3; ++a) F.ev_g_->add(spectral_derivative(s, a));
  }
  F.ev_w_->finalize();
  F.ev_g_->finalize();
  double best = -1.0;
  std::size_t bi = 0;
  for (std::size_t i = 0; i < omega.g.size(); ++i) {
    double m = omega.comp[0][i] * omega.comp[0][i] + omega.comp[1][i] * omega.comp[1][i] +
               omega.comp[2][i] * omega.comp[2][i];
    if (m > best) {
      best = m;
      bi = i;
    }
  }
  F.grid_max_ = std::sqrt(best);
  const Grid& g = omega.g;
  int k = int(bi % g.n[2]);
  int j = int((bi / g.n[2]) % g.n[1]);
  int i = int(bi / (std::size_t(g.n[1]) * g.n[2]));
  F.argmax_ = {g.coord(0, i), g.coord(1, j), g.coord(2, k)};
  return F;
}

void DirectionField::vec(const std::array<double, 3>& x, double w[3]) const {
  w[0] = w[1] = w[2] = 0.0;
  ev_w_->eval(x, w);
}

double DirectionField::sample(const std::array<double, 3>& x, double w[3],
                              double grad[3][3]) const {
  vec(x, w);
  double flat[9] = {0};
  ev_g_->eval(x, flat);
  for (int c = 0; c < 3; ++c)
    for (int a = 0; a < 3; ++a) grad[c][a] = 0.0;
  for (int c = 0; c < dim_; ++c)
    for (int a = 0; a < dim_; ++a) grad[c][a] = flat[c * dim_ + a];
  return norm3(w, dim_);
}

namespace {

struct March {
  std::vector<std::array<double, 3>> x;
  std::vector<double> s;
  bool hit_floor = false;
  bool closed = false;
};

// RK4 integration of dx/ds = dir * xi along the direction field
March march_curve(const DirectionField& F, const std::array<double, 3>& seed, double dir,
                  double target, const TraceOptions& opt, double wmag_seed) {
  const double h = F.grid().h_min();
  const double ds0 = opt.step_frac * h;
  March m;
  m.x.push_back(seed);
  m.s.push_back(0.0);
  auto xi_at = [&](const std::array<double, 3>& p, double out[3]) -> double {
    double w[3];
    F.vec(p, w);
    double mag = norm3(w, F.dim());
    if (mag > 0.0)
      for (int c = 0; c < 3; ++c) out[c] = dir * w[c] / mag;
    else
      for (int c = 0; c < 3; ++c) out[c] = 0.0;
    return mag;
  };
  double w[3], grad[3][3];
  double d_prev2 = 1e300;
  long max_steps = long(8.0 * target / ds0) + 16;
  for (long step = 0; step < max_steps; ++step) {
    double arc = m.s.back();
    if (arc >= target - 1e-12) break;
    double mag = F.sample(m.x.back(), w, grad);
    if (mag < opt.stop_frac * wmag_seed) break;  // field too weak to follow
    double kappa = xi_curvature(w, grad, F.dim(), nullptr);
    if (kappa > 0.0 && 1.0 / kappa < opt.curvature_floor_cells * h) {
      m.hit_floor = true;
      break;
    }
    double ds = ds0;
    if (kappa > 0.0) ds = std::min(ds, 0.2 / kappa);
    ds = std::max(ds, ds0 / 8.0);
    ds = std::min(ds, target - arc);

    std::array<double, 3> p = m.x.back(), q;
    double k1[3], k2[3], k3[3], k4[3];
    xi_at(p, k1);
    for (int c = 0; c < 3; ++c) q[c] = p[c] + 0.5 * ds * k1[c];
    xi_at(q, k2);
    for (int c = 0; c < 3; ++c) q[c] = p[c] + 0.5 * ds * k2[c];
    double mag3 = xi_at(q, k3);
    for (int c = 0; c < 3; ++c) q[c] = p[c] + ds * k3[c];
    double mag4 = xi_at(q, k4);
    if (mag3 == 0.0 || mag4 == 0.0) break;  // ran into a zero of the field
    std::array<double, 3> nx;
    for (int c = 0; c < 3; ++c)
      nx[c] = p[c] + ds / 6.0 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
    m.x.push_back(nx);
    m.s.push_back(arc + ds);

    if (opt.detect_closure && m.s.back() > 6.0 * ds0) {
      double d2 = 0.0;
      for (int c = 0; c < 3; ++c) {
        double d = nx[c] - seed[c];
        d2 += d * d;
      }
      if (d2 < (2.0 * ds0) * (2.0 * ds0) && d2 > d_prev2) {
        // passed closest approach: place the final node at the minimum of
        // the quadratic fit through the last three squared distances
        double dm2 = d_prev2, dmm2 = 1e300;
        if (m.x.size() >= 3) {
          double d = 0.0;
          for (int c = 0; c < 3; ++c) {
            double e = m.x[m.x.size() - 3][c] - seed[c];
            d += e * e;
          }
          dmm2 = d;
        }
        double sA = m.s[m.s.size() - 3], sB = m.s[m.s.size() - 2], sC = m.s.back();
        (void)sA;
        double denom = (dmm2 - 2 * dm2 + d2);
        double frac = denom > 0 ? 0.5 * (dmm2 - d2) / denom : 0.0;  // offset from sB in steps
        double s_star = sB + frac * (sC - sB);
        // retrace the final partial step from the node before the minimum
        m.x.resize(m.x.size() - 2);
        m.s.resize(m.s.size() - 2);
        double dss = s_star - m.s.back();
        if (dss > 1e-12) {
          p = m.x.back();
          xi_at(p, k1);
          for (int c = 0; c < 3; ++c) q[c] = p[c] + 0.5 * dss * k1[c];
          xi_at(q, k2);
          for (int c = 0; c < 3; ++c) q[c] = p[c] + 0.5 * dss * k2[c];
          xi_at(q, k3);
          for (int c = 0; c < 3; ++c) q[c] = p[c] + dss * k3[c];
          xi_at(q, k4);
          for (int c = 0; c < 3; ++c)
            nx[c] = p[c] + dss / 6.0 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
          m.x.push_back(nx);
          m.s.push_back(m.s.back() + dss);
        }
        m.closed = true;
        break;
      }
      d_prev2 = d2;
    }
  }
  return m;
}

}  // namespace

CurveSegment trace_segment(const DirectionField& F, const std::array<double, 3>& seed,
                           const TraceOptions& opt) {
  double w[3];
  F.vec(seed, w);
  double mag = norm3(w, F.dim());
  if (mag < opt.seed_floor * F.grid_max())
    throw std::runtime_error("trace_segment: direction field vanishes at the seed point");

  CurveSegment seg;
  seg.dim = F.dim();
  if (opt.direction == "both") {
    March back = march_curve(F, seed, -1.0, opt.target_length / 2, opt, mag);
    March fwd = march_curve(F, seed, +1.0, opt.target_length / 2, opt, mag);
    seg.resolved = !(back.hit_floor || fwd.hit_floor);
    seg.closed = back.closed || fwd.closed;
    for (std::size_t i = back.x.size(); i-- > 0;) seg.x.push_back(back.x[i]);
    for (std::size_t i = 1; i < fwd.x.size(); ++i) seg.x.push_back(fwd.x[i]);
    seg.seed_at_end = false;
  } else {
    March back = march_curve(F, seed, -1.0, opt.target_length, opt, mag);
    seg.resolved = !back.hit_floor;
    seg.closed = back.closed;
    for (std::size_t i = back.x.size(); i-- > 0;) seg.x.push_back(back.x[i]);
    seg.seed_at_end = true;
  }
  if (seg.x.size() < 2) throw std::runtime_error("trace_segment: degenerate segment (no steps)");
  seg.s.resize(seg.x.size());
  seg.s[0] = 0.0;
  for (std::size_t i = 1; i < seg.x.size(); ++i) {
    double d[3] = {seg.x[i][0] - seg.x[i - 1][0], seg.x[i][1] - seg.x[i - 1][1],
                   seg.x[i][2] - seg.x[i - 1][2]};
    seg.s[i] = seg.s[i - 1] + norm3(d, 3);
  }
  seg.beta = seg.s;
  CurveSegment out = resample_to_arclength(seg, opt.step_frac * F.grid().h_min());
  out.beta = out.s;  // fresh trace: material label = arclength now
  return out;
}

namespace {

// cubic Lagrange interpolation in the arclength parameter (non-uniform safe)
double lagrange_s(const std::vector<double>& s, const std::vector<double>& v, int i0, int cnt,
                  double st) {
  double acc = 0.0;
  for (int a = 0; a < cnt; ++a) {
    double w = 1.0;
    for (int b = 0; b < cnt; ++b) {
      if (a == b) continue;
      double den = s[i0 + a] - s[i0 + b];
      w *= den != 0.0 ? (st - s[i0 + b]) / den : 0.0;
    }
    acc += w * v[i0 + a];
  }
  return acc;
}

}  // namespace

CurveSegment resample_to_arclength(const CurveSegment& seg, double ds) {
  if (seg.n() < 2) return seg;
  double L = seg.L();
  int npts = std::max(2, int(std::lround(L / ds)) + 1);
  CurveSegment out;
  out.dim = seg.dim;
  out.t = seg.t;
  out.resolved = seg.resolved;
  out.closed = seg.closed;
  out.seed_at_end = seg.seed_at_end;
  out.x.resize(npts);
  out.s.resize(npts);
  out.beta.resize(npts);

  int n = seg.n();
  int j = 0;
  for (int i = 0; i < npts; ++i) {
    double st = L * double(i) / double(npts - 1);
    if (i == 0) {
      out.x[0] = seg.x.front();
      out.beta[0] = seg.beta.front();
      continue;
    }
    if (i == npts - 1) {
      out.x[npts - 1] = seg.x.back();
      out.beta[npts - 1] = seg.beta.back();
      continue;
    }
    while (j < n - 2 && seg.s[j + 1] < st) ++j;
    int i0 = std::clamp(j - 1, 0, n - 4);
    int cnt = std::min(4, n);
    if (n < 4) i0 = 0;
    for (int c = 0; c < 3; ++c) {
      std::vector<double> comp(n);
      for (int q = 0; q < n; ++q) comp[q] = seg.x[q][c];
      out.x[i][c] = lagrange_s(seg.s, comp, i0, cnt, st);
    }
    out.beta[i] = lagrange_s(seg.s, seg.beta, i0, cnt, st);
  }
  out.s[0] = 0.0;
  for (int i = 1; i < npts; ++i) {
    double d[3] = {out.x[i][0] - out.x[i - 1][0], out.x[i][1] - out.x[i - 1][1],
                   out.x[i][2] - out.x[i - 1][2]};
    out.s[i] = out.s[i - 1] + norm3(d, 3);
  }
  return out;
}

CurveSegment advect_segment(const CurveSegment& seg, const FieldEvaluator& vel_t,
                            const FieldEvaluator& vel_next, double dt) {
  CurveSegment out = seg;
  out.t = seg.t + dt;
  int dim = seg.dim;
  for (int i = 0; i < seg.n(); ++i) {
    double u1[3] = {0, 0, 0}, u2[3] = {0, 0, 0};
    vel_t.eval(seg.x[i], u1);
    std::array<double, 3> star = seg.x[i];
    for (int c = 0; c < dim; ++c) star[c] += dt * u1[c];
    vel_next.eval(star, u2);
    for (int c = 0; c < dim; ++c) out.x[i][c] = seg.x[i][c] + 0.5 * dt * (u1[c] + u2[c]);
  }
  out.s[0] = 0.0;
  for (int i = 1; i < out.n(); ++i) {
    double d[3] = {out.x[i][0] - out.x[i - 1][0], out.x[i][1] - out.x[i - 1][1],
                   out.x[i][2] - out.x[i - 1][2]};
    out.s[i] = out.s[i - 1] + norm3(d, 3);
  }
  return out;
}

namespace {

// squared min-image distance between two points
double image_dist2(const Grid& g, const std::array<double, 3>& a, const std::array<double, 3>& b,
                   int dim) {
  double acc = 0.0;
  for (int c = 0; c < dim; ++c) {
    double d = std::remainder(a[c] - b[c], g.length[c]);
    acc += d * d;
  }
  return acc;
}

}  // namespace

CurveSegment reproject_to_line(const CurveSegment& advected, const DirectionField& F,
                               const TraceOptions& opt) {
  if (advected.closed)
    throw std::runtime_error("reproject_to_line: closed segments are not re-anchored");
  std::array<double, 3> anchor =
      advected.seed_at_end ? advected.x.back() : advected.x[advected.n() / 2];
  TraceOptions topt = opt;
  CurveSegment fresh = trace_segment(F, anchor, topt);
  fresh.t = advected.t;

  // transfer material labels: closest point on the advected polyline
  const Grid& g = F.grid();
  int m = advected.n();
  int dim = advected.dim;
  int jlo = 0;
  for (int i = 0; i < fresh.n(); ++i) {
    double best = 1e300;
    int bj = jlo;
    double bu = 0.0;
    int lo = std::max(0, jlo - 4);
    for (int j = lo; j < m - 1; ++j) {
      // projection parameter onto segment j (min-image deltas)
      double ab[3], ap[3];
      double den = 0.0, num = 0.0;
      for (int c = 0; c < dim; ++c) {
        ab[c] = std::remainder(advected.x[j + 1][c] - advected.x[j][c], g.length[c]);
        ap[c] = std::remainder(fresh.x[i][c] - advected.x[j][c], g.length[c]);
        den += ab[c] * ab[c];
        num += ab[c] * ap[c];
      }
      double u = den > 0 ? std::clamp(num / den, 0.0, 1.0) : 0.0;
      double d2 = 0.0;
      for (int c = 0; c < dim; ++c) {
        double d = ap[c] - u * ab[c];
        d2 += d * d;
      }
      if (d2 < best) {
        best = d2;
        bj = j;
        bu = u;
      } else if (j > bj + 8 && best < 1e299) {
        break;  // monotone along the curve: stop once clearly past the minimum
      }
    }
    jlo = bj;
    fresh.beta[i] = advected.beta[bj] + bu * (advected.beta[bj + 1] - advected.beta[bj]);
  }
  // enforce monotone labels (projection can stall at shared endpoints)
  for (int i = 1; i < fresh.n(); ++i)
    if (fresh.beta[i] < fresh.beta[i - 1]) fresh.beta[i] = fresh.beta[i - 1];
  return fresh;
}

}  // namespace vortiline
