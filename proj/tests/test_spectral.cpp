#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vortiline/evaluator.hpp"
#include "vortiline/initial_conditions.hpp"
#include "vortiline/spectral_ops.hpp"

using namespace vortiline;

namespace {

ScalarField random_field(const Grid& g, std::uint64_t seed) {
  DetRng rng(seed);
  ScalarField f(g);
  for (auto& v : f.v) v = rng.sym();
  return f;
}

double rel_linf(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0 ? num / den : num;
}

}  // namespace

TEST_CASE("fft round trip and Parseval, 2D and 3D") {
  for (const Grid& g : {Grid::make2d(32, 48), Grid::make3d(16, 24, 20)}) {
    ScalarField f = random_field(g, 7);
    SpectralScalar s = to_spectral(f);
    ScalarField back = to_physical(s);
    CHECK(rel_linf(back.v, f.v) < 1e-12);
    CHECK(spectral_l2_sq(s) == doctest::Approx(l2_sq(f)).epsilon(1e-12));
  }
}

TEST_CASE("spectral derivative matches analytic derivative") {
  Grid g = Grid::make2d(64, 64);
  ScalarField f(g), dfx(g), dfy(g);
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      double x = g.coord(0, i), y = g.coord(1, j);
      f.at(i, j) = std::sin(3 * x) * std::cos(2 * y);
      dfx.at(i, j) = 3 * std::cos(3 * x) * std::cos(2 * y);
      dfy.at(i, j) = -2 * std::sin(3 * x) * std::sin(2 * y);
    }
  CHECK(rel_linf(derivative(f, 0).v, dfx.v) < 1e-11);
  CHECK(rel_linf(derivative(f, 1).v, dfy.v) < 1e-11);

  Grid g3 = Grid::make3d(24, 24, 24);
  ScalarField h(g3), dhz(g3);
  for (int i = 0; i < 24; ++i)
    for (int j = 0; j < 24; ++j)
      for (int k = 0; k < 24; ++k) {
        double x = g3.coord(0, i), z = g3.coord(2, k);
        h.at(i, j, k) = std::cos(x) * std::sin(4 * z);
        dhz.at(i, j, k) = 4 * std::cos(x) * std::cos(4 * z);
      }
  CHECK(rel_linf(derivative(h, 2).v, dhz.v) < 1e-11);
}

TEST_CASE("dealias removes the upper third and is idempotent") {
  Grid g = Grid::make2d(48, 48);  // cut at |m| > 16
  ScalarField f(g);
  for (int i = 0; i < 48; ++i)
    for (int j = 0; j < 48; ++j)
      f.at(i, j) = std::cos(20 * g.coord(0, i)) + std::sin(5 * g.coord(1, j));
  ScalarField d = dealias_23(f);
  // surviving part is exactly the low mode
  ScalarField lo(g);
  for (int i = 0; i < 48; ++i)
    for (int j = 0; j < 48; ++j) lo.at(i, j) = std::sin(5 * g.coord(1, j));
  CHECK(rel_linf(d.v, lo.v) < 1e-12);
  ScalarField dd = dealias_23(d);
  CHECK(rel_linf(dd.v, d.v) < 1e-13);
}

TEST_CASE("perp gradient and sqg velocity on a single mode") {
  Grid g = Grid::make2d(64, 64);
  int kx = 3, ky = 2;
  double kk = std::sqrt(double(kx * kx + ky * ky));
  ScalarField th(g);
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) th.at(i, j) = std::cos(kx * g.coord(0, i) + ky * g.coord(1, j));
  VectorField gp = perp_gradient(th);
  VectorField u = sqg_velocity(th);
  double err_gp = 0.0, err_u = 0.0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      double ph = kx * g.coord(0, i) + ky * g.coord(1, j);
      std::size_t q = g.idx(i, j);
      err_gp = std::max(err_gp, std::abs(gp.comp[0][q] - ky * std::sin(ph)));
      err_gp = std::max(err_gp, std::abs(gp.comp[1][q] + kx * std::sin(ph)));
      err_u = std::max(err_u, std::abs(u.comp[0][q] - ky * std::sin(ph) / kk));
      err_u = std::max(err_u, std::abs(u.comp[1][q] + kx * std::sin(ph) / kk));
    }
  CHECK(err_gp < 1e-12);
  CHECK(err_u < 1e-12);
}

TEST_CASE("Biot-Savart inverts the Beltrami eigen-relation on an ABC field") {
  Grid g = Grid::make3d(32, 32, 32);
  VectorField w = make_euler_ic("abc", {{"A", 1.1}, {"B", 0.7}, {"C", 0.9}}, g, 1);
  CHECK(relative_divergence(w) < 1e-13);
  VectorField u = biot_savart3(w);
  for (int c = 0; c < 3; ++c) CHECK(rel_linf(u.comp[c], w.comp[c]) < 1e-12);
}

TEST_CASE("Biot-Savart rejects non-solenoidal input; projection fixes it") {
  Grid g = Grid::make3d(16, 16, 16);
  VectorField w(g, 3);
  // gradient part sin(x) x_hat plus solenoidal part cos(y) x_hat
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      for (int k = 0; k < 16; ++k)
        w.comp[0][g.idx(i, j, k)] = std::sin(g.coord(0, i)) + std::cos(g.coord(1, j));
  CHECK(relative_divergence(w) > 0.5);
  CHECK_THROWS_AS(biot_savart3(w), std::runtime_error);
  solenoidal_project(w);
  CHECK(relative_divergence(w) < 1e-12);
  double err = 0.0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      for (int k = 0; k < 16; ++k)
        err = std::max(err, std::abs(w.comp[0][g.idx(i, j, k)] - std::cos(g.coord(1, j))));
  CHECK(err < 1e-12);
  CHECK_NOTHROW(biot_savart3(w));
}

TEST_CASE("curl of Biot-Savart velocity returns the vorticity") {
  Grid g = Grid::make3d(24, 24, 24);
  VectorField w(g, 3);
  DetRng rng(11);
  // random band-limited solenoidal field
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 24; ++i)
      for (int j = 0; j < 24; ++j)
        for (int k = 0; k < 24; ++k)
          w.comp[c][g.idx(i, j, k)] =
              std::cos(2 * g.coord(0, i) + c) * std::sin(3 * g.coord(1, j)) +
              0.3 * std::sin(g.coord(2, k) + 2 * c) + 0.1 * rng.sym() * 0;
  solenoidal_project(w);
  VectorField u = biot_savart3(w);
  VectorField wb = curl3(u);
  // mean of omega is lost by BS (k=0 mode); these test fields have zero mean
  for (int c = 0; c < 3; ++c) CHECK(rel_linf(wb.comp[c], w.comp[c]) < 1e-11);
}

TEST_CASE("divergence of a curl vanishes") {
  Grid g = Grid::make3d(20, 20, 20);
  VectorField a(g, 3);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j)
        for (int k = 0; k < 20; ++k)
          a.comp[c][g.idx(i, j, k)] = std::sin(g.coord(0, i) + c) * std::cos(2 * g.coord(1, j)) *
                                      std::sin(g.coord(2, k) - c);
  VectorField w = curl3(a);
  CHECK(relative_divergence(w) < 1e-13);
}

TEST_CASE("spectral evaluator reproduces an analytic band-limited field") {
  Grid g = Grid::make3d(32, 32, 32);
  auto fn = [](double x, double y, double z) {
    return std::sin(3 * x + 1.0) * std::cos(2 * y - 2.0) * std::cos(z);
  };
  ScalarField f(g);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j)
      for (int k = 0; k < 32; ++k) f.at(i, j, k) = fn(g.coord(0, i), g.coord(1, j), g.coord(2, k));
  FieldEvaluator ev(g);
  ev.add(f);
  ev.finalize();
  CHECK(ev.method() == EvalMethod::Spectral);
  DetRng rng(3);
  double err = 0.0;
  for (int t = 0; t < 50; ++t) {
    std::array<double, 3> x{kTwoPi * rng.u01(), kTwoPi * rng.u01(), kTwoPi * rng.u01()};
    double v;
    ev.eval(x, &v);
    err = std::max(err, std::abs(v - fn(x[0], x[1], x[2])));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("tricubic evaluator converges at fourth order") {
  auto fn = [](double x, double y) { return std::sin(3 * x) * std::cos(2 * y); };
  auto max_err = [&](int n) {
    Grid g = Grid::make2d(n, n);
    ScalarField f(g);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) f.at(i, j) = fn(g.coord(0, i), g.coord(1, j));
    FieldEvaluator ev(g, EvalMethod::Tricubic);
    ev.add(f);
    ev.finalize();
    DetRng rng(5);
    double err = 0.0;
    for (int t = 0; t < 200; ++t) {
      std::array<double, 3> x{kTwoPi * rng.u01(), kTwoPi * rng.u01(), 0.0};
      double v;
      ev.eval(x, &v);
      err = std::max(err, std::abs(v - fn(x[0], x[1])));
    }
    return err;
  };
  double e1 = max_err(64), e2 = max_err(128);
  CHECK(e1 < 5e-4);
  CHECK(e1 / e2 > 8.0);  // nominal 16x
}

TEST_CASE("refined max finds an off-grid peak") {
  Grid g = Grid::make2d(128, 128);
  double cx = kPi + 0.3 * g.h(0), cy = kPi - 0.4 * g.h(1);
  ScalarField f(g);
  for (int i = 0; i < 128; ++i)
    for (int j = 0; j < 128; ++j) {
      double dx = std::remainder(g.coord(0, i) - cx, kTwoPi);
      double dy = std::remainder(g.coord(1, j) - cy, kTwoPi);
      f.at(i, j) = std::exp(-(dx * dx + dy * dy) / (2 * 0.09));
    }
  PeakResult r = refined_max_norm(g, {&f.v});
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(std::remainder(r.x[0] - cx, kTwoPi)) < 2e-3);
  CHECK(std::abs(std::remainder(r.x[1] - cy, kTwoPi)) < 2e-3);
}

TEST_CASE("upsample and restrict are inverse on band-limited data") {
  Grid g = Grid::make2d(32, 32);
  ScalarField f(g);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j)
      f.at(i, j) = std::sin(5 * g.coord(0, i)) * std::cos(7 * g.coord(1, j)) + 0.25;
  ScalarField up = upsample(f, 2);
  // fine samples at shared points equal coarse samples
  double err = 0.0;
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) err = std::max(err, std::abs(up.at(2 * i, 2 * j) - f.at(i, j)));
  CHECK(err < 1e-12);
  ScalarField back = restrict_modes(up, g);
  CHECK(rel_linf(back.v, f.v) < 1e-12);
}

TEST_CASE("top octave fraction separates smooth from marginal fields") {
  Grid g = Grid::make2d(48, 48);
  ScalarField lo(g), hi(g);
  for (int i = 0; i < 48; ++i)
    for (int j = 0; j < 48; ++j) {
      lo.at(i, j) = std::sin(2 * g.coord(0, i));
      hi.at(i, j) = std::sin(15 * g.coord(0, i));  // just below the cut at 16
    }
  CHECK(top_octave_fraction(to_spectral(lo)) == doctest::Approx(0.0));
  CHECK(top_octave_fraction(to_spectral(hi)) == doctest::Approx(1.0));
}

TEST_CASE("anti-parallel tube construction: solenoidal with exact odd symmetry") {
  Grid g = Grid::make3d(32, 32, 32);
  VectorField w = make_euler_ic("anti-parallel-tubes", {}, g, 1);
  CHECK(relative_divergence(w) < 1e-12);
  // omega_x odd across y = pi: w1(i, n-j, k) == -w1(i, j, k)
  double err = 0.0;
  for (int i = 0; i < 32; ++i)
    for (int j = 1; j < 32; ++j)
      for (int k = 0; k < 32; ++k)
        err = std::max(err, std::abs(w.comp[0][g.idx(i, 32 - j, k)] + w.comp[0][g.idx(i, j, k)]));
  CHECK(err < 1e-10);
}
