#include "vortiline/initial_conditions.hpp"

#include <cmath>
#include <set>

#include "vortiline/config.hpp"
#include "vortiline/spectral_ops.hpp"

namespace vortiline {
namespace {

double get_param(const ParamMap& p, const std::string& key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

void check_params(const std::string& ic, const ParamMap& p, const std::set<std::string>& known) {
  std::vector<std::string> errors;
  for (auto& [k, v] : p) {
    (void)v;
    if (!known.count(k))
      errors.push_back("ic.param." + k + ": unknown parameter for ic.name=" + ic);
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

// squared minimum-image distance to a center
double min_image_r2(const Grid& g, double x, double y, double cx, double cy) {
  double dx = std::remainder(x - cx, g.length[0]);
  double dy = std::remainder(y - cy, g.length[1]);
  return dx * dx + dy * dy;
}

ScalarField radial_gaussian(const Grid& g, const ParamMap& p) {
  check_params("radial-gaussian", p, {"amplitude", "sigma2", "cx", "cy"});
  double A = get_param(p, "amplitude", 4.0);
  double s2 = get_param(p, "sigma2", 0.2);
  double cx = get_param(p, "cx", kPi), cy = get_param(p, "cy", kPi);
  ScalarField f(g);
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j)
      f.at(i, j) = A * std::exp(-min_image_r2(g, g.coord(0, i), g.coord(1, j), cx, cy) / (2 * s2));
  return f;
}

ScalarField two_gaussian(const Grid& g, const ParamMap& p) {
  check_params("two-gaussian", p, {"amplitude", "sigma2", "sep"});
  double A = get_param(p, "amplitude", 4.0);
  double s2 = get_param(p, "sigma2", 0.2);
  double d = get_param(p, "sep", 0.65);
  ScalarField f(g);
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j) {
      double x = g.coord(0, i), y = g.coord(1, j);
      double a = std::exp(-min_image_r2(g, x, y, kPi - d, kPi) / (2 * s2));
      double b = std::exp(-min_image_r2(g, x, y, kPi + d, kPi) / (2 * s2));
      f.at(i, j) = A * (a - b);
    }
  return f;
}

ScalarField random_band(const Grid& g, const ParamMap& p, std::uint64_t seed) {
  check_params("random-band", p, {"amplitude", "kmin", "kmax"});
  double A = get_param(p, "amplitude", 4.0);
  int kmin = int(get_param(p, "kmin", 2));
  int kmax = int(get_param(p, "kmax", 6));
  if (kmin < 1 || kmax < kmin) throw ConfigError({"random-band: need 1 <= kmin <= kmax"});
  DetRng rng(seed);
  // explicit real cosine modes keep the construction library-independent
  struct Mode {
    int mx, my;
    double amp, phase;
  };
  std::vector<Mode> modes;
  for (int mx = -kmax; mx <= kmax; ++mx)
    for (int my = 0; my <= kmax; ++my) {
      if (my == 0 && mx <= 0) continue;
      double kk = std::sqrt(double(mx) * mx + double(my) * my);
      if (kk < kmin || kk > kmax) continue;
      modes.push_back({mx, my, rng.sym(), kTwoPi * rng.u01()});
    }
  ScalarField f(g);
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j) {
      double x = g.coord(0, i), y = g.coord(1, j);
      double v = 0.0;
      for (auto& m : modes) v += m.amp * std::cos(m.mx * x + m.my * y + m.phase);
      f.at(i, j) = v;
    }
  // normalize so max |grad^perp theta| equals the requested amplitude
  double gmax = max_norm(perp_gradient(f));
  if (gmax > 0.0)
    for (auto& v : f.v) v *= A / gmax;
  return f;
}

VectorField abc_field(const Grid& g, const ParamMap& p) {
  check_params("abc", p, {"A", "B", "C", "amplitude"});
  double amp = get_param(p, "amplitude", 1.0);
  double A = amp * get_param(p, "A", 1.0);
  double B = amp * get_param(p, "B", 1.0);
  double C = amp * get_param(p, "C", 1.0);
  VectorField w(g, 3);
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j)
      for (int k = 0; k < g.n[2]; ++k) {
        double x = g.coord(0, i), y = g.coord(1, j), z = g.coord(2, k);
        std::size_t q = g.idx(i, j, k);
        w.comp[0][q] = A * std::sin(z) + C * std::cos(y);
        w.comp[1][q] = B * std::sin(x) + A * std::cos(z);
        w.comp[2][q] = C * std::sin(y) + B * std::cos(x);
      }
  return w;
}

VectorField taylor_green(const Grid& g, const ParamMap& p) {
  check_params("taylor-green", p, {"amplitude"});
  double A = get_param(p, "amplitude", 1.0);
  VectorField u(g, 3);
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j)
      for (int k = 0; k < g.n[2]; ++k) {
        double x = g.coord(0, i), y = g.coord(1, j), z = g.coord(2, k);
        std::size_t q = g.idx(i, j, k);
        u.comp[0][q] = A * std::sin(x) * std::cos(y) * std::cos(z);
        u.comp[1][q] = -A * std::cos(x) * std::sin(y) * std::cos(z);
        u.comp[2][q] = 0.0;
      }
  return curl3(u);
}

// Two x-aligned tubes of opposite-signed omega_x at y = pi -+ offset, built
// from a vector potential so the result is solenoidal to machine precision.
// A sinusoidal z-displacement of the potential provides the perturbation.
VectorField anti_parallel_tubes(const Grid& g, const ParamMap& p) {
  check_params("anti-parallel-tubes", p, {"amplitude", "sigma2", "offset", "eps", "kx"});
  double A = get_param(p, "amplitude", 1.0);
  double s2 = get_param(p, "sigma2", 0.04);
  double b = get_param(p, "offset", 0.7);
  double eps = get_param(p, "eps", 0.1);
  int kx = int(get_param(p, "kx", 1));

  // 2D profile f(y,z): opposite Gaussians, odd across y = pi by construction
  Grid gyz = Grid::make2d(g.n[1], g.n[2]);
  gyz.length = {g.length[1], g.length[2], kTwoPi};
  ScalarField f(gyz);
  for (int j = 0; j < gyz.n[0]; ++j)
    for (int k = 0; k < gyz.n[1]; ++k) {
      double y = gyz.coord(0, j), z = gyz.coord(1, k);
      double top = std::exp(-min_image_r2(gyz, y, z, kPi - b, kPi) / (2 * s2));
      double bot = std::exp(-min_image_r2(gyz, y, z, kPi + b, kPi) / (2 * s2));
      f.at(j, k) = A * (top - bot);
    }
  // potential components on the (y,z) plane: Ay = -d_z phi2, Az = d_y phi2
  // with Laplacian phi2 = f (so curl A recovers omega_x = f)
  ScalarField phi2 = poisson_neg(f);
  for (auto& v : phi2.v) v = -v;  // poisson_neg solves -Lap = f
  SpectralScalar sphi = to_spectral(phi2);
  SpectralScalar sAy = spectral_derivative(sphi, 1);
  for (auto& c : sAy.c) c = -c;
  SpectralScalar sAz = spectral_derivative(sphi, 0);

  // per x-slice: translate the potential in z by eps*cos(kx*x) via phase shift
  VectorField pot(g, 3);
  auto nsyz = gyz.nspec();
  for (int i = 0; i < g.n[0]; ++i) {
    double shift = eps * std::cos(kx * g.coord(0, i));
    SpectralScalar ay = sAy, az = sAz;
    for (int j = 0; j < nsyz[0]; ++j)
      for (int k = 0; k < nsyz[1]; ++k) {
        std::complex<double> ph = std::polar(1.0, -gyz.wavenumber(1, k) * shift);
        ay.c[gyz.sidx(j, k)] *= ph;
        az.c[gyz.sidx(j, k)] *= ph;
      }
    ScalarField ayp = to_physical(ay), azp = to_physical(az);
    for (int j = 0; j < g.n[1]; ++j)
      for (int k = 0; k < g.n[2]; ++k) {
        pot.comp[1][g.idx(i, j, k)] = ayp.at(j, k);
        pot.comp[2][g.idx(i, j, k)] = azp.at(j, k);
      }
  }
  return curl3(pot);
}

}  // namespace

ScalarField make_sqg_ic(const std::string& name, const ParamMap& params, const Grid& g,
                        std::uint64_t seed) {
  if (g.dim != 2) throw ConfigError({"sqg initial data requires a 2D grid"});
  if (name == "radial-gaussian") return radial_gaussian(g, params);
  if (name == "two-gaussian") return two_gaussian(g, params);
  if (name == "random-band") return random_band(g, params, seed);
  throw ConfigError({"ic.name: unknown sqg initial condition '" + name +
                     "' (known: radial-gaussian, two-gaussian, random-band)"});
}

VectorField make_euler_ic(const std::string& name, const ParamMap& params, const Grid& g,
                          std::uint64_t seed) {
  (void)seed;
  if (g.dim != 3) throw ConfigError({"euler3d initial data requires a 3D grid"});
  if (name == "abc") return abc_field(g, params);
  if (name == "taylor-green") return taylor_green(g, params);
  if (name == "anti-parallel-tubes") return anti_parallel_tubes(g, params);
  throw ConfigError({"ic.name: unknown euler3d initial condition '" + name +
                     "' (known: abc, taylor-green, anti-parallel-tubes)"});
}

}  // namespace vortiline
