#include "vortiline/spectral_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace vortiline {

void zero_nyquist(SpectralScalar& s, int axis) {
  const Grid& g = s.g;
  if (g.n[axis] % 2 != 0) return;
  int ny = g.n[axis] / 2;
  for_each_mode(g, [&](std::size_t idx, int i, int j, int k, double, double, double) {
    int stored = axis == 0 ? i : (axis == 1 ? j : k);
    if (stored == ny) s.c[idx] = 0.0;
  });
}

SpectralScalar spectral_derivative(const SpectralScalar& s, int axis) {
  SpectralScalar out(s.g);
  const int nhalf = s.g.n[axis] / 2;
  const bool even = s.g.n[axis] % 2 == 0;
  for_each_mode(s.g, [&](std::size_t idx, int i, int j, int k, double kx, double ky, double kz) {
    int m = axis == 0 ? s.g.kindex(0, i) : (axis == 1 ? s.g.kindex(1, j) : s.g.kindex(2, k));
    if (even && (m == nhalf || m == -nhalf)) {
      out.c[idx] = 0.0;  // unpaired mode has no well-defined odd derivative
      return;
    }
    double kv = axis == 0 ? kx : (axis == 1 ? ky : kz);
    out.c[idx] = std::complex<double>(0.0, kv) * s.c[idx];
  });
  return out;
}

void dealias_23(SpectralScalar& s) {
  const Grid& g = s.g;
  std::array<int, 3> cut{g.n[0] / 3, g.n[1] / 3, g.dim == 3 ? g.n[2] / 3 : 0};
  for_each_mode(g, [&](std::size_t idx, int i, int j, int k, double, double, double) {
    int mx = g.kindex(0, i), my = g.kindex(1, j), mz = g.dim == 3 ? g.kindex(2, k) : 0;
    if (std::abs(mx) > cut[0] || std::abs(my) > cut[1] || (g.dim == 3 && std::abs(mz) > cut[2]))
      s.c[idx] = 0.0;
  });
}

ScalarField dealias_23(const ScalarField& f) {
  SpectralScalar s = to_spectral(f);
  dealias_23(s);
  return to_physical(s);
}

ScalarField derivative(const ScalarField& f, int axis) {
  return to_physical(spectral_derivative(to_spectral(f), axis));
}

VectorField gradient(const ScalarField& f) {
  SpectralScalar s = to_spectral(f);
  VectorField out(f.g, f.g.dim);
  for (int a = 0; a < f.g.dim; ++a) out.comp[a] = to_physical(spectral_derivative(s, a)).v;
  return out;
}

VectorField perp_gradient(const ScalarField& f) {
  if (f.g.dim != 2) throw std::invalid_argument("perp_gradient: 2D only");
  SpectralScalar s = to_spectral(f);
  VectorField out(f.g, 2);
  ScalarField dy = to_physical(spectral_derivative(s, 1));
  ScalarField dx = to_physical(spectral_derivative(s, 0));
  for (std::size_t i = 0; i < f.g.size(); ++i) {
    out.comp[0][i] = -dy.v[i];
    out.comp[1][i] = dx.v[i];
  }
  return out;
}

ScalarField divergence(const VectorField& u) {
  SpectralScalar acc(u.g);
  for (int a = 0; a < u.ncomp && a < u.g.dim; ++a) {
    ScalarField f(u.g);
    f.v = u.comp[a];
    SpectralScalar d = spectral_derivative(to_spectral(f), a);
    for (std::size_t i = 0; i < acc.c.size(); ++i) acc.c[i] += d.c[i];
  }
  return to_physical(acc);
}

VectorField curl3(const VectorField& u) {
  if (u.g.dim != 3 || u.ncomp != 3) throw std::invalid_argument("curl3: 3D vector field required");
  std::array<SpectralScalar, 3> s;
  for (int a = 0; a < 3; ++a) {
    ScalarField f(u.g);
    f.v = u.comp[a];
    s[a] = to_spectral(f);
  }
  VectorField out(u.g, 3);
  auto comp = [&](int a, int b, int c) {
    // (curl u)_a = d_b u_c - d_c u_b
    SpectralScalar r = spectral_derivative(s[c], b);
    SpectralScalar l = spectral_derivative(s[b], c);
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] -= l.c[i];
    out.comp[a] = to_physical(r).v;
  };
  comp(0, 1, 2);
  comp(1, 2, 0);
  comp(2, 0, 1);
  return out;
}

VectorField sqg_velocity(const ScalarField& theta) {
  if (theta.g.dim != 2) throw std::invalid_argument("sqg_velocity: 2D only");
  SpectralScalar s = to_spectral(theta);
  SpectralScalar ux(theta.g), uy(theta.g);
  for_each_mode(theta.g, [&](std::size_t idx, int, int, int, double kx, double ky, double) {
    double kk = std::sqrt(kx * kx + ky * ky);
    if (kk == 0.0) return;
    std::complex<double> f = std::complex<double>(0.0, 1.0) * s.c[idx] / kk;
    ux.c[idx] = -ky * f;
    uy.c[idx] = kx * f;
  });
  VectorField u(theta.g, 2);
  u.comp[0] = to_physical(ux).v;
  u.comp[1] = to_physical(uy).v;
  return u;
}

double relative_divergence(const VectorField& w) {
  std::array<SpectralScalar, 3> s;
  for (int a = 0; a < w.ncomp; ++a) {
    ScalarField f(w.g);
    f.v = w.comp[a];
    s[a] = to_spectral(f);
  }
  double num = 0.0, den = 0.0;
  for_each_mode(w.g, [&](std::size_t idx, int i, int j, int k, double kx, double ky, double kz) {
    (void)i;
    double wgt = mode_weight(w.g, j, k);
    std::complex<double> div = kx * s[0].c[idx] + ky * s[1].c[idx];
    double mag2 = std::norm(s[0].c[idx]) + std::norm(s[1].c[idx]);
    if (w.ncomp == 3) {
      div += kz * s[2].c[idx];
      mag2 += std::norm(s[2].c[idx]);
    }
    double k2 = kx * kx + ky * ky + kz * kz;
    num += wgt * std::norm(div);
    den += wgt * k2 * mag2;
  });
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

VectorField biot_savart3(const VectorField& omega, double div_tol) {
  if (omega.g.dim != 3 || omega.ncomp != 3)
    throw std::invalid_argument("biot_savart3: 3D vector field required");
  double rdiv = relative_divergence(omega);
  if (rdiv > div_tol)
    throw std::runtime_error("biot_savart3: input not solenoidal (relative divergence " +
                             std::to_string(rdiv) + "); project it first");
  std::array<SpectralScalar, 3> s;
  for (int a = 0; a < 3; ++a) {
    ScalarField f(omega.g);
    f.v = omega.comp[a];
    s[a] = to_spectral(f);
  }
  std::array<SpectralScalar, 3> us{SpectralScalar(omega.g), SpectralScalar(omega.g),
                                   SpectralScalar(omega.g)};
  for_each_mode(omega.g, [&](std::size_t idx, int, int, int, double kx, double ky, double kz) {
    double k2 = kx * kx + ky * ky + kz * kz;
    if (k2 == 0.0) return;
    std::complex<double> I(0.0, 1.0);
    // u_hat = i k x omega_hat / |k|^2
    us[0].c[idx] = I * (ky * s[2].c[idx] - kz * s[1].c[idx]) / k2;
    us[1].c[idx] = I * (kz * s[0].c[idx] - kx * s[2].c[idx]) / k2;
    us[2].c[idx] = I * (kx * s[1].c[idx] - ky * s[0].c[idx]) / k2;
  });
  VectorField u(omega.g, 3);
  for (int a = 0; a < 3; ++a) u.comp[a] = to_physical(us[a]).v;
  return u;
}

void solenoidal_project(VectorField& w) {
  std::array<SpectralScalar, 3> s;
  for (int a = 0; a < w.ncomp; ++a) {
    ScalarField f(w.g);
    f.v = w.comp[a];
    s[a] = to_spectral(f);
  }
  for_each_mode(w.g, [&](std::size_t idx, int, int, int, double kx, double ky, double kz) {
    double k2 = kx * kx + ky * ky + kz * kz;
    if (k2 == 0.0) return;
    std::complex<double> kd = kx * s[0].c[idx] + ky * s[1].c[idx];
    if (w.ncomp == 3) kd += kz * s[2].c[idx];
    kd /= k2;
    s[0].c[idx] -= kx * kd;
    s[1].c[idx] -= ky * kd;
    if (w.ncomp == 3) s[2].c[idx] -= kz * kd;
  });
  for (int a = 0; a < w.ncomp; ++a) w.comp[a] = to_physical(s[a]).v;
}

ScalarField poisson_neg(const ScalarField& f) {
  SpectralScalar s = to_spectral(f);
  for_each_mode(f.g, [&](std::size_t idx, int, int, int, double kx, double ky, double kz) {
    double k2 = kx * kx + ky * ky + kz * kz;
    s.c[idx] = k2 == 0.0 ? 0.0 : s.c[idx] / k2;
  });
  return to_physical(s);
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double x : f.v) m = std::max(m, std::abs(x));
  return m;
}

double max_norm(const VectorField& u) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.g.size(); ++i) {
    double s = 0.0;
    for (int a = 0; a < u.ncomp; ++a) s += u.comp[a][i] * u.comp[a][i];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

double mean(const ScalarField& f) {
  double s = 0.0;
  for (double x : f.v) s += x;
  return s / double(f.g.size());
}

double integral(const ScalarField& f) {
  double vol = 1.0;
  for (int a = 0; a < f.g.dim; ++a) vol *= f.g.length[a];
  return mean(f) * vol;
}

double l2_sq(const ScalarField& f) {
  double s = 0.0;
  for (double x : f.v) s += x * x;
  double cell = 1.0;
  for (int a = 0; a < f.g.dim; ++a) cell *= f.g.h(a);
  return s * cell;
}

double dot_integral(const VectorField& a, const VectorField& b) {
  double s = 0.0;
  for (int c = 0; c < a.ncomp; ++c)
    for (std::size_t i = 0; i < a.g.size(); ++i) s += a.comp[c][i] * b.comp[c][i];
  double cell = 1.0;
  for (int ax = 0; ax < a.g.dim; ++ax) cell *= a.g.h(ax);
  return s * cell;
}

double spectral_l2_sq(const SpectralScalar& s) {
  double acc = 0.0;
  for_each_mode(s.g, [&](std::size_t idx, int, int j, int k, double, double, double) {
    acc += mode_weight(s.g, j, k) * std::norm(s.c[idx]);
  });
  double vol = 1.0;
  for (int a = 0; a < s.g.dim; ++a) vol *= s.g.length[a];
  return acc * vol;
}

double top_octave_fraction(const SpectralScalar& s) {
  const Grid& g = s.g;
  double total = 0.0, top = 0.0;
  for_each_mode(g, [&](std::size_t idx, int i, int j, int k, double, double, double) {
    double wgt = mode_weight(g, j, k) * std::norm(s.c[idx]);
    total += wgt;
    bool hi = false;
    std::array<int, 3> m{g.kindex(0, i), g.kindex(1, j), g.dim == 3 ? g.kindex(2, k) : 0};
    for (int a = 0; a < g.dim; ++a) {
      int cut = g.n[a] / 3;
      if (cut > 0 && std::abs(m[a]) * 2 > cut) hi = true;
    }
    if (hi) top += wgt;
  });
  return total > 0.0 ? top / total : 0.0;
}

double top_octave_fraction(const VectorField& u) {
  double total = 0.0, top = 0.0;
  for (int a = 0; a < u.ncomp; ++a) {
    ScalarField f(u.g);
    f.v = u.comp[a];
    SpectralScalar s = to_spectral(f);
    double t = top_octave_fraction(s);
    double e = spectral_l2_sq(s);
    total += e;
    top += t * e;
  }
  return total > 0.0 ? top / total : 0.0;
}

}  // namespace vortiline
