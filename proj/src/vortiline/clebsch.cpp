#include "vortiline/clebsch.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace vortiline {
namespace {

using Vec3 = std::array<double, 3>;

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline void axpy(Vec3& acc, double s, const Vec3& a) {
  acc[0] += s * a[0];
  acc[1] += s * a[1];
  acc[2] += s * a[2];
}

// quintic smoothstep on [0,1]
inline double smoothstep01(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}
inline double smoothstep01_prime(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  double w = u * (1.0 - u);
  return 30.0 * w * w;
}

// 1 for r <= a, 0 for r >= b, quintic blend
inline double plateau(double r, double a, double b) { return 1.0 - smoothstep01((r - a) / (b - a)); }

// swirl profile: regularized 1/r with a gaussian core of scale 1/mu,
// flat plateau to ra, cut off smoothly by rb
double m_profile(double r, double mu, double amp, double ra, double rb) {
  double v;
  if (mu * r < 1e-4) {
    v = amp * 0.5 * mu * mu * r;
  } else {
    v = amp * (1.0 - std::exp(-0.5 * mu * mu * r * r)) / r;
  }
  return v * plateau(r, ra, rb);
}

inline double min_image(double d) {
  while (d > kPi) d -= kTwoPi;
  while (d < -kPi) d += kTwoPi;
  return d;
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double xg = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = xg;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * xg * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (xg * p1 - p0) / (xg * xg - 1.0);
      double dx = p1 / pp;
      xg -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    x[i] = -xg;
    x[n - 1 - i] = xg;
    double wi = 2.0 / ((1.0 - xg * xg) * pp * pp);
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
}

struct RadialSet {
  std::vector<double> r, rw;
};

// Gauss-Legendre panels between consecutive edges.  The radial integrands
// are smooth inside each panel (the cutoffs are quintic polynomials of r
// there), so panel edges at the cutoff joints give rapid convergence.
RadialSet gl_panels(const std::vector<double>& edges, int total_nodes) {
  int npanel = int(edges.size()) - 1;
  if (npanel < 1 || total_nodes < 4 * npanel)
    throw std::invalid_argument("quadrature: bad radial panel set");
  RadialSet s;
  int base = total_nodes / npanel;
  for (int p = 0; p < npanel; ++p) {
    double lo = edges[p], hi = edges[p + 1];
    if (!(hi >= lo) || lo < 0.0) throw std::invalid_argument("quadrature: bad radial panel set");
    if (hi - lo < 1e-14) continue;
    int np = p + 1 == npanel ? total_nodes - base * (npanel - 1) : base;
    std::vector<double> gx, gw;
    gauss_legendre(np, gx, gw);
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int i = 0; i < np; ++i) {
      s.r.push_back(mid + half * gx[i]);
      s.rw.push_back(half * gw[i]);
    }
  }
  return s;
}

// ---- periodic-image kernel table -----------------------------------------
//
// The far-field solve uses the periodic convolution kernel; near-field
// quadratures use the open-space kernel y/(4pi |y|^3).  Their difference is
// a smooth field (the singular parts cancel), sampled once per resolution
// via a spectral mollifier exp(-tau k^2) applied to both sides:
//   periodic side:  coefficients -i k_a exp(-tau k^2) / (k^2 V)
//   open side:      -grad[ erf(|y| / (2 sqrt(tau))) / (4 pi |y|) ]
// The mollification cancels in the difference up to terms that are
// exponentially small in 1/tau.
struct ImgTable {
  Grid g;
  VectorField kper;  // mollified periodic kernel, sampled
  VectorField diff;  // kper minus the mollified open-space kernel
  double tau = 0.0;
  std::unique_ptr<FieldEvaluator> eval;  // 6 fields: kper then diff
};

Vec3 kfree_mollified(const Vec3& y, double tau) {
  double r = norm(y);
  if (r < 1e-12) return {0.0, 0.0, 0.0};
  double a = 2.0 * std::sqrt(tau);
  double gp = ((2.0 * r / (a * std::sqrt(kPi))) * std::exp(-r * r / (a * a)) - std::erf(r / a)) /
              (4.0 * kPi * r * r);
  return (-gp / r) * y;
}

const ImgTable& image_table(int m, double tau) {
  static std::mutex mu;
  static std::map<std::pair<int, std::int64_t>, std::unique_ptr<ImgTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(m, std::int64_t(tau * 1e9));
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  auto tab = std::make_unique<ImgTable>();
  tab->g = Grid::make3d(m, m, m);
  tab->tau = tau;
  tab->kper = VectorField(tab->g, 3);
  tab->diff = VectorField(tab->g, 3);
  const double vol = kTwoPi * kTwoPi * kTwoPi;
  for (int a = 0; a < 3; ++a) {
    SpectralScalar s(tab->g);
    for_each_mode(tab->g, [&](std::size_t idx, int, int, int, double kx, double ky, double kz) {
      double k2 = kx * kx + ky * ky + kz * kz;
      if (k2 == 0.0) {
        s.c[idx] = 0.0;
        return;
      }
      double ka = a == 0 ? kx : (a == 1 ? ky : kz);
      s.c[idx] = std::complex<double>(0.0, -ka * std::exp(-tau * k2) / (k2 * vol));
    });
    for (int ax = 0; ax < 3; ++ax) zero_nyquist(s, ax);
    tab->kper.comp[a] = to_physical(s).v;
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        Vec3 y{min_image(tab->g.coord(0, i)), min_image(tab->g.coord(1, j)),
               min_image(tab->g.coord(2, k))};
        Vec3 kf = kfree_mollified(y, tau);
        std::size_t idx = tab->g.idx(i, j, k);
        for (int a = 0; a < 3; ++a) tab->diff.comp[a][idx] = tab->kper.comp[a][idx] - kf[a];
      }
    }
  }
  tab->eval = std::make_unique<FieldEvaluator>(tab->g, EvalMethod::Tricubic);
  tab->eval->add_vector(tab->kper);
  tab->eval->add_vector(tab->diff);
  tab->eval->finalize();
  auto& ref = *tab;
  cache[key] = std::move(tab);
  return ref;
}

}  // namespace

double chi_cutoff(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  return 1.0 - smoothstep01(r - 1.0);
}

double chi_cutoff_prime(double r) {
  if (r <= 1.0 || r >= 2.0) return 0.0;
  return -smoothstep01_prime(r - 1.0);
}

bool ClebschField::ball_in_region(const std::array<double, 3>& x, double rho) const {
  if (!(rho > 0.0) || rho >= kPi) return false;
  for (int a = 0; a < 2; ++a) {
    if (std::abs(min_image(x[a] - center[a])) > kPi - rho) return false;
  }
  return true;
}

ClebschField make_clebsch_family(double lambda, const ClebschOptions& opts) {
  if (!(lambda >= 1.0) || !std::isfinite(lambda))
    throw std::invalid_argument("clebsch: lambda must be finite and >= 1");
  if (opts.n < 64) throw std::invalid_argument("clebsch: n must be at least 64");
  if (opts.nz < 4) throw std::invalid_argument("clebsch: nz must be at least 4");

  const int n = opts.n;
  const double mu = 4.0 * lambda;
  const int kcut = (43 * n) / 100;
  // The swirl profile varies on scale 1/mu; a spectral band of 3.4*mu keeps
  // the truncation ripple far below the 1% family-scaling tolerance.
  if (3.4 * mu > double(kcut)) {
    int nmin = int(std::ceil(std::ceil(3.4 * mu) * 100.0 / 43.0));
    std::ostringstream msg;
    msg << "clebsch: lambda=" << lambda << " under-resolves the profile: needs spectral band "
        << std::ceil(3.4 * mu) << " but an n=" << n << " grid provides " << kcut
        << "; use n >= " << nmin;
    throw std::invalid_argument(msg.str());
  }

  double nu = 1.0;
  if (opts.sharpen_psi) {
    nu = std::sqrt(mu);
    if (std::abs(nu - std::round(nu)) > 1e-9)
      throw std::invalid_argument(
          "clebsch: the sharpened-psi family needs an integer sqrt(4*lambda); "
          "use lambda in {1, 4, 16, ...}");
    nu = std::round(nu);
  }
  if (kcut + nu > n / 2 - 1)
    throw std::invalid_argument("clebsch: grid too small for alias-free products");

  ClebschField f;
  f.lambda = lambda;
  f.mu = mu;
  f.nu = nu;
  f.amplitude = opts.amplitude;
  f.center = {kPi, kPi, 0.0};
  f.region_lo = {f.center[0] - kPi, f.center[1] - kPi, 0.0};
  f.region_hi = {f.center[0] + kPi, f.center[1] + kPi, kTwoPi};

  Grid g2 = Grid::make2d(n, n);

  // radial profile table M(r) = int_0^r m
  const int nt = 1 << 16;
  const double rmax = std::sqrt(2.0) * kPi + 0.1;
  std::vector<double> mt(nt), Mt(nt);
  for (int i = 0; i < nt; ++i)
    mt[i] = m_profile(rmax * i / (nt - 1), mu, opts.amplitude, opts.core_radius,
                      opts.support_radius);
  Mt[0] = 0.0;
  const double dr_t = rmax / (nt - 1);
  for (int i = 1; i < nt; ++i) Mt[i] = Mt[i - 1] + 0.5 * (mt[i] + mt[i - 1]) * dr_t;
  const double Minf = Mt[nt - 1];
  auto interpM = [&](double r) {
    double u = r / dr_t;
    int i = std::min(int(u), nt - 2);
    double t = u - i;
    return Mt[i] * (1.0 - t) + Mt[i + 1] * t;
  };

  ScalarField phi2(g2);
  for (int i = 0; i < n; ++i) {
    double dx = g2.coord(0, i) - f.center[0];
    for (int j = 0; j < n; ++j) {
      double dy = g2.coord(1, j) - f.center[1];
      phi2.at(i, j) = Minf - interpM(std::sqrt(dx * dx + dy * dy));
    }
  }
  {  // band-limit phi so every later pointwise product stays alias-free
    SpectralScalar ph = to_spectral(phi2);
    for_each_mode(g2, [&](std::size_t idx, int, int, int, double kx, double ky, double) {
      if (kx * kx + ky * ky > double(kcut) * kcut + 0.5) ph.c[idx] = 0.0;
    });
    zero_nyquist(ph, 0);
    zero_nyquist(ph, 1);
    phi2 = to_physical(ph);
  }

  ScalarField psi2(g2);
  for (int j = 0; j < n; ++j) {
    double s = std::sin(nu * g2.coord(1, j));
    for (int i = 0; i < n; ++i) psi2.at(i, j) = s;
  }

  VectorField gphi = gradient(phi2);
  VectorField gpsi = gradient(psi2);

  f.omega3_2d = ScalarField(g2);
  f.vecpot2_2d = ScalarField(g2);
  ScalarField vecpot1(g2);
  for (std::size_t p = 0; p < g2.size(); ++p) {
    f.omega3_2d.v[p] = gphi.comp[0][p] * gpsi.comp[1][p] - gphi.comp[1][p] * gpsi.comp[0][p];
    f.vecpot2_2d.v[p] = phi2.v[p] * gpsi.comp[1][p];
    vecpot1.v[p] = phi2.v[p] * gpsi.comp[0][p];
  }

  {  // construction self-check: the same vorticity must arise as the curl of
    // the vector potential phi grad psi (alias-free products make the two
    // spectral routes agree to roundoff)
    ScalarField curlz = derivative(f.vecpot2_2d, 0);
    ScalarField d1 = derivative(vecpot1, 1);
    double scale = std::max(1e-300, max_abs(f.omega3_2d));
    double worst = 0.0;
    for (std::size_t p = 0; p < g2.size(); ++p)
      worst = std::max(worst, std::abs(curlz.v[p] - d1.v[p] - f.omega3_2d.v[p]));
    if (worst > 1e-10 * scale)
      throw std::runtime_error("clebsch: curl identity lost during construction");
  }

  // induced velocity (z-invariant): u = rot of the inverse laplacian
  {
    SpectralScalar wh = to_spectral(f.omega3_2d);
    SpectralScalar u1h(g2), u2h(g2);
    for_each_mode(g2, [&](std::size_t idx, int, int, int, double kx, double ky, double) {
      double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) {
        u1h.c[idx] = 0.0;
        u2h.c[idx] = 0.0;
        return;
      }
      std::complex<double> w = wh.c[idx];
      u1h.c[idx] = std::complex<double>(0.0, ky / k2) * w;
      u2h.c[idx] = std::complex<double>(0.0, -kx / k2) * w;
    });
    f.u1_2d = to_physical(u1h);
    f.u2_2d = to_physical(u2h);
  }

  // refined extrema
  f.Omega = refined_max_norm(g2, {&f.omega3_2d.v}).value;
  f.max_grad_phi = refined_max_norm(g2, {&gphi.comp[0], &gphi.comp[1]}).value;
  f.max_grad_psi = refined_max_norm(g2, {&gpsi.comp[0], &gpsi.comp[1]}).value;
  f.max_vecpot = refined_max_norm(g2, {&vecpot1.v, &f.vecpot2_2d.v}).value;
  f.max_u = refined_max_norm(g2, {&f.u1_2d.v, &f.u2_2d.v}).value;
  f.u_l2 = std::sqrt((l2_sq(f.u1_2d) + l2_sq(f.u2_2d)) * kTwoPi);

  double psi_bound = opts.psi_gradient_bound;
  if (opts.sharpen_psi) psi_bound = std::max(psi_bound, nu);
  if (f.max_grad_psi > psi_bound * (1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "clebsch: max|grad psi| = " << f.max_grad_psi << " exceeds the configured bound "
        << psi_bound;
    throw std::invalid_argument(msg.str());
  }

  // 3D fields (z-invariant replication)
  f.grid = Grid::make3d(n, n, opts.nz);
  f.phi = ScalarField(f.grid);
  f.psi = ScalarField(f.grid);
  f.omega = VectorField(f.grid, 3);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::size_t p2 = g2.idx(i, j);
      for (int k = 0; k < opts.nz; ++k) {
        std::size_t p3 = f.grid.idx(i, j, k);
        f.phi.v[p3] = phi2.v[p2];
        f.psi.v[p3] = psi2.v[p2];
        f.omega.comp[2][p3] = f.omega3_2d.v[p2];
      }
    }
  }
  return f;
}

// ---------------------------------------------------------------------------

struct VelocitySplitter::Impl {
  SplitConfig cfg;
  double rho = 0.0, delta = 0.0, Omega = 0.0;
  Vec3 center{};
  Grid g2;                   // base plane grid
  std::vector<double> om3;   // base vorticity plane (far-field mask fill)
  std::unique_ptr<FieldEvaluator> fine;  // refined planes: om3, vecpot2, u1, u2
  const ImgTable* img = nullptr;
  std::vector<double> glx, glw;       // Gauss-Legendre in cos(theta)
  std::vector<double> cph, sph;       // azimuthal node directions
  RadialSet near_set, shell_set;  // never clipped (2 delta <= rho < pi)
  // Outer radial rules carry their panel joints so each ray can be clipped
  // exactly at its cell-exit radius (the panel map is rebuilt per ray).
  struct PanelRule {
    std::vector<double> edges;   // ascending panel joints
    std::vector<double> gx, gw;  // Gauss-Legendre reference nodes on [-1, 1]
  };
  PanelRule mid_rule, ring_rule, img_rule;
  bool clip = false;

  Vec3 far_spectral(const Vec3& x) const;
};

VelocitySplitter::VelocitySplitter(const ClebschField& field, const SplitConfig& cfg)
    : impl_(new Impl) {
  Impl& im = *impl_;
  im.cfg = cfg;
  if (!(cfg.rho > 0.0)) throw std::invalid_argument("split: rho must be positive");
  if (cfg.rho >= kPi)
    throw std::invalid_argument("split: rho must be below half the box (no valid probes)");
  im.rho = cfg.rho;
  im.Omega = field.Omega;
  double d = cfg.delta;
  if (d <= 0.0) d = field.Omega > 0.0 ? std::min(1.0 / field.Omega, cfg.rho / 2.0) : cfg.rho / 2.0;
  if (!(d > 0.0) || d > cfg.rho / 2.0 * (1.0 + 1e-12))
    throw std::invalid_argument("split: need 0 < delta <= rho/2");
  im.delta = d;
  delta_ = d;
  rho_ = cfg.rho;
  im.center = field.center;
  im.clip = 2.0 * cfg.rho > kPi;

  const auto& q = cfg.quad;
  if (q.upsample < 1 || q.nz_far < 8 || q.n_img < 16 || q.ntheta < 4 || q.nphi < 8)
    throw std::invalid_argument("split: quadrature parameters out of range");

  im.g2 = field.omega3_2d.g;
  im.om3 = field.omega3_2d.v;

  Grid fine_grid = Grid::make2d(im.g2.n[0] * q.upsample, im.g2.n[1] * q.upsample);
  im.fine = std::make_unique<FieldEvaluator>(fine_grid, EvalMethod::Tricubic);
  im.fine->add(upsample(field.omega3_2d, q.upsample));
  im.fine->add(upsample(field.vecpot2_2d, q.upsample));
  im.fine->add(upsample(field.u1_2d, q.upsample));
  im.fine->add(upsample(field.u2_2d, q.upsample));
  im.fine->finalize();

  im.img = &image_table(q.n_img, q.tau_img);

  gauss_legendre(q.ntheta, im.glx, im.glw);
  im.cph.resize(q.nphi);
  im.sph.resize(q.nphi);
  for (int p = 0; p < q.nphi; ++p) {
    double ph = (p + 0.5) * kTwoPi / q.nphi;
    im.cph[p] = std::cos(ph);
    im.sph[p] = std::sin(ph);
  }

  im.near_set = gl_panels({0.0, d, 2.0 * d}, q.nr_near);
  im.shell_set = gl_panels({d, 2.0 * d}, q.nr_shell);
  auto make_rule = [](std::vector<double> edges, int per_panel) {
    Impl::PanelRule r;
    r.edges = std::move(edges);
    gauss_legendre(std::max(8, per_panel), r.gx, r.gw);
    return r;
  };
  im.mid_rule = make_rule({d, 2.0 * d, cfg.rho, 2.0 * cfg.rho}, q.nr_mid / 3);
  im.ring_rule = make_rule({cfg.rho, 2.0 * cfg.rho}, q.nr_ring);
  im.img_rule = make_rule({0.0, cfg.rho, 2.0 * cfg.rho}, q.nr_img / 2);
}

VelocitySplitter::~VelocitySplitter() = default;

// Far-field contribution: spectral Biot-Savart of the vorticity weighted by
// the complement of the outer cutoff (periodic distance to the probe),
// evaluated at the probe by direct mode summation.
Vec3 VelocitySplitter::Impl::far_spectral(const Vec3& x) const {
  const int n = g2.n[0];
  const int nz = cfg.quad.nz_far;
  Grid gf = Grid::make3d(n, n, nz);
  ScalarField wm(gf);
  std::vector<double> d2x(n), d2y(n), d2z(nz);
  for (int i = 0; i < n; ++i) {
    double dd = min_image(gf.coord(0, i) - x[0]);
    d2x[i] = dd * dd;
  }
  for (int j = 0; j < n; ++j) {
    double dd = min_image(gf.coord(1, j) - x[1]);
    d2y[j] = dd * dd;
  }
  for (int k = 0; k < nz; ++k) {
    double dd = min_image(gf.coord(2, k) - x[2]);
    d2z[k] = dd * dd;
  }
  const double r1 = rho, r2 = 2.0 * rho;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double w = om3[g2.idx(i, j)];
      std::size_t base = gf.idx(i, j, 0);
      if (w == 0.0) continue;
      double dxy = d2x[i] + d2y[j];
      for (int k = 0; k < nz; ++k) {
        double dist = std::sqrt(dxy + d2z[k]);
        double m;
        if (dist >= r2) {
          m = 1.0;
        } else if (dist <= r1) {
          continue;  // mask complement is 0
        } else {
          m = 1.0 - chi_cutoff(dist / rho);
        }
        wm.v[base + k] = w * m;
      }
    }
  }
  SpectralScalar s = to_spectral(wm);
  wm.v.clear();
  wm.v.shrink_to_fit();

  std::vector<std::complex<double>> px(n), py(n), pz(nz / 2 + 1);
  for (int i = 0; i < n; ++i) px[i] = std::polar(1.0, gf.wavenumber(0, i) * x[0]);
  for (int j = 0; j < n; ++j) py[j] = std::polar(1.0, gf.wavenumber(1, j) * x[1]);
  for (int k = 0; k <= nz / 2; ++k) pz[k] = std::polar(1.0, gf.wavenumber(2, k) * x[2]);

  double u1 = 0.0, u2 = 0.0;
  auto ns = gf.nspec();
  std::size_t idx = 0;
  for (int i = 0; i < ns[0]; ++i) {
    double kx = gf.wavenumber(0, i);
    for (int j = 0; j < ns[1]; ++j) {
      double ky = gf.wavenumber(1, j);
      std::complex<double> pxy = px[i] * py[j];
      for (int k = 0; k < ns[2]; ++k, ++idx) {
        double kz = gf.wavenumber(2, k);
        double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) continue;
        std::complex<double> val = s.c[idx] * pxy * pz[k];
        double wgt = mode_weight(gf, j, k) / k2;
        // u1 = Re(i ky w/k2 e^{ikx}), u2 = Re(-i kx w/k2 e^{ikx})
        u1 -= wgt * ky * val.imag();
        u2 += wgt * kx * val.imag();
      }
    }
  }
  return {u1, u2, 0.0};
}

VelocitySplit VelocitySplitter::split(const std::array<double, 3>& x) const {
  const Impl& im = *impl_;
  // region check: the cutoff ball must not reach the periodic wrap of the
  // horizontal cell centered on the tube
  for (int a = 0; a < 2; ++a) {
    if (std::abs(min_image(x[a] - im.center[a])) > kPi - im.rho)
      throw std::invalid_argument(
          "split: the cutoff ball around the probe leaves the field's region box; "
          "move the probe toward the tube or shrink rho");
  }

  VelocitySplit out;
  out.delta = im.delta;
  out.rho = im.rho;
  out.Omega = im.Omega;
  out.clipped = im.clip;

  const auto& q = im.cfg.quad;
  const double dinv = 1.0 / im.delta, rinv = 1.0 / im.rho;
  double fields[4];  // om3, vecpot2, u1, u2

  auto eval_fields = [&](double px, double py) {
    im.fine->eval({px, py, 0.0}, fields);
  };

  // Radial panels for one ray, clipped exactly at the ray's cell exit so the
  // per-panel integrands stay smooth even when 2 rho exceeds the half-box.
  auto integrate_panels = [](const Impl::PanelRule& pr, double r_exit, auto&& body) {
    for (std::size_t p = 0; p + 1 < pr.edges.size(); ++p) {
      double lo = std::min(pr.edges[p], r_exit), hi = std::min(pr.edges[p + 1], r_exit);
      if (hi - lo < 1e-14) continue;
      double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (std::size_t i = 0; i < pr.gx.size(); ++i)
        body(mid + half * pr.gx[i], half * pr.gw[i]);
    }
  };

  Vec3 I1{}, C{}, D{}, E{}, I3d{}, A{}, IMG{};
  for (int it = 0; it < q.ntheta; ++it) {
    const double ct = im.glx[it], st = std::sqrt(std::max(0.0, 1.0 - im.glx[it] * im.glx[it]));
    const double glw = im.glw[it];
    for (int ip = 0; ip < q.nphi; ++ip) {
      const Vec3 dir{st * im.cph[ip], st * im.sph[ip], ct};
      const double wang = glw * (kTwoPi / q.nphi);

      double r_exit = 1e300;
      if (im.clip) {
        for (int a = 0; a < 3; ++a)
          if (std::abs(dir[a]) > 1e-300) r_exit = std::min(r_exit, kPi / std::abs(dir[a]));
      }

      // near ball: inner-cutoff weighted open-space kernel
      for (std::size_t ir = 0; ir < im.near_set.r.size(); ++ir) {
        double r = im.near_set.r[ir];
        double cw = chi_cutoff(r * dinv);
        if (cw == 0.0) continue;
        Vec3 y = r * dir;
        double wgt = im.near_set.rw[ir] * r * r * wang * cw;
        eval_fields(x[0] + y[0], x[1] + y[1]);
        double r3 = r * r * r;
        Vec3 K{y[0] / r3, y[1] / r3, y[2] / r3};
        axpy(I1, wgt, cross(K, {0.0, 0.0, fields[0]}));
      }

      // inner-cutoff shell: vector potential x grad(chi_delta)
      for (std::size_t ir = 0; ir < im.shell_set.r.size(); ++ir) {
        double r = im.shell_set.r[ir];
        double gp = chi_cutoff_prime(r * dinv) * dinv;
        if (gp == 0.0) continue;
        Vec3 y = r * dir;
        double wgt = im.shell_set.rw[ir] * r * r * wang;
        eval_fields(x[0] + y[0], x[1] + y[1]);
        double r3 = r * r * r;
        Vec3 K{y[0] / r3, y[1] / r3, y[2] / r3};
        Vec3 W{0.0, fields[1], 0.0};
        Vec3 gchi = gp * dir;
        axpy(D, wgt, cross(cross(W, gchi), K));
      }

      // mid annulus: kernel-gradient term and the unsplit cross check
      integrate_panels(im.mid_rule, r_exit, [&](double r, double rw) {
        double f = chi_cutoff(r * rinv) * (1.0 - chi_cutoff(r * dinv));
        if (f == 0.0) return;
        Vec3 y = r * dir;
        double wgt = rw * r * r * wang * f;
        eval_fields(x[0] + y[0], x[1] + y[1]);
        double r3 = r * r * r, r5 = r3 * r * r;
        Vec3 K{y[0] / r3, y[1] / r3, y[2] / r3};
        Vec3 W{0.0, fields[1], 0.0};
        double yW = dot(y, W);
        Vec3 gKW{W[0] / r3 - 3.0 * y[0] * yW / r5, W[1] / r3 - 3.0 * y[1] * yW / r5,
                 W[2] / r3 - 3.0 * y[2] * yW / r5};
        axpy(E, -wgt, gKW);
        axpy(I3d, wgt, cross(K, {0.0, 0.0, fields[0]}));
      });

      // outer-cutoff ring: potential and velocity against grad(chi_rho)
      integrate_panels(im.ring_rule, r_exit, [&](double r, double rw) {
        double gp = chi_cutoff_prime(r * rinv) * rinv;
        if (gp == 0.0) return;
        Vec3 y = r * dir;
        double wgt = rw * r * r * wang;
        eval_fields(x[0] + y[0], x[1] + y[1]);
        double r3 = r * r * r;
        Vec3 K{y[0] / r3, y[1] / r3, y[2] / r3};
        Vec3 gchi = gp * dir;
        Vec3 W{0.0, fields[1], 0.0};
        Vec3 u{fields[2], fields[3], 0.0};
        axpy(C, -wgt, cross(cross(W, gchi), K));
        axpy(A, wgt, cross(cross(u, gchi), K));
      });

      // periodic-image correction carried by the far field (smooth kernel,
      // already carries the 1/(4 pi) normalization)
      integrate_panels(im.img_rule, r_exit, [&](double r, double rw) {
        double cw = chi_cutoff(r * rinv);
        if (cw == 0.0) return;
        Vec3 y = r * dir;
        double wgt = rw * r * r * wang * cw;
        eval_fields(x[0] + y[0], x[1] + y[1]);
        double kv[6];
        im.img->eval->eval({y[0], y[1], y[2]}, kv);
        Vec3 kimg;
        if (r <= 2.0) {
          kimg = {kv[3], kv[4], kv[5]};
        } else {
          Vec3 kf = kfree_mollified(y, im.img->tau);
          kimg = {kv[0] - kf[0], kv[1] - kf[1], kv[2] - kf[2]};
        }
        axpy(IMG, wgt, cross(kimg, {0.0, 0.0, fields[0]}));
      });
    }
  }

  const double inv4pi = 1.0 / (4.0 * kPi);
  out.I1 = inv4pi * I1;
  out.C = inv4pi * C;
  out.D = inv4pi * D;
  out.E = inv4pi * E;
  out.I3_direct = inv4pi * I3d;
  out.A = inv4pi * A;
  out.far_image = IMG;
  // When the cutoff ball spills over the periodic cell, the identity
  // I3 = C + D + E picks up a genuine cell-boundary term; the direct
  // quadrature remains the faithful value of the mid-range integral.
  out.I3 = im.clip ? out.I3_direct : out.C + out.D + out.E;
  out.far_spectral = im.far_spectral(x);
  out.I4 = out.far_spectral + out.far_image;
  out.B = out.I4 - out.A;
  out.total = out.I1 + out.I3 + out.I4;

  eval_fields(x[0], x[1]);
  out.u_ref = {fields[2], fields[3], 0.0};
  double du = norm(out.total - out.u_ref);
  out.rel_gap = du / std::max(norm(out.u_ref), 1e-30);
  return out;
}

VelocitySplit split_velocity(const ClebschField& field, const SplitConfig& cfg,
                             const std::array<double, 3>& x) {
  return VelocitySplitter(field, cfg).split(x);
}

LogVelocityReport log_velocity_check(const std::vector<LogVelocityMember>& family) {
  if (family.size() < 3)
    throw std::invalid_argument("log velocity check: need at least 3 family members");
  const double e = std::exp(1.0);
  for (const auto& m : family) {
    if (!(m.Omega > e)) {
      std::ostringstream msg;
      msg << "log velocity check: member lambda=" << m.lambda << " has Omega=" << m.Omega
          << " <= e; the ratio max|u|/log(Omega) is not meaningful there";
      throw std::invalid_argument(msg.str());
    }
  }
  LogVelocityReport rep;
  rep.members = family;
  std::sort(rep.members.begin(), rep.members.end(),
            [](const LogVelocityMember& a, const LogVelocityMember& b) { return a.lambda < b.lambda; });

  double xmin = 1e300, xmax = -1e300;
  for (const auto& m : rep.members) {
    double lx = std::log(m.Omega);
    xmin = std::min(xmin, lx);
    xmax = std::max(xmax, lx);
    rep.ratios.push_back(m.max_u / lx);
  }
  if (xmax - xmin < 1e-9) {
    rep.rejected = true;
    rep.reason = "zero variance in log(Omega) across the family; a slope cannot be fitted";
    return rep;
  }
  const std::size_t nn = rep.members.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& m : rep.members) {
    double lx = std::log(m.Omega);
    sx += lx;
    sy += m.max_u;
    sxx += lx * lx;
    sxy += lx * m.max_u;
  }
  double det = nn * sxx - sx * sx;
  rep.Cu_fit = (nn * sxy - sx * sy) / det;
  rep.intercept = (sy * sxx - sx * sxy) / det;
  double rss = 0.0;
  for (const auto& m : rep.members) {
    double r = m.max_u - (rep.Cu_fit * std::log(m.Omega) + rep.intercept);
    rss += r * r;
  }
  rep.residual_rms = std::sqrt(rss / nn);

  double rmin = 1e300, rmax = -1e300, rmean = 0.0;
  for (double r : rep.ratios) {
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
    rmean += r;
  }
  rmean /= rep.ratios.size();
  rep.spread = (rmax - rmin) / rmean;

  bool nondecreasing = true, nonincreasing = true;
  for (std::size_t i = 1; i < rep.ratios.size(); ++i) {
    if (rep.ratios[i] < rep.ratios[i - 1] * 0.98) nondecreasing = false;
    if (rep.ratios[i] > rep.ratios[i - 1] * 1.02) nonincreasing = false;
  }
  rep.ratio_increasing = nondecreasing && rep.ratios.back() > rep.ratios.front() * 1.2;
  rep.bounded = !rep.ratio_increasing && (rep.spread < 0.25 || nonincreasing);
  return rep;
}

}  // namespace vortiline
