#include "vortiline/evaluator.hpp"

#include <cmath>
#include <stdexcept>

namespace vortiline {

FieldEvaluator::FieldEvaluator(const Grid& g, EvalMethod m) : g_(g), chosen_(m) {
  if (m == EvalMethod::Auto) {
    int nmax = 0;
    for (int a = 0; a < g.dim; ++a) nmax = std::max(nmax, g.n[a]);
    chosen_ = nmax <= 128 ? EvalMethod::Spectral : EvalMethod::Tricubic;
  }
}

int FieldEvaluator::add(const ScalarField& f) {
  if (!(f.g == g_)) throw std::invalid_argument("evaluator: grid mismatch");
  if (finalized_) throw std::logic_error("evaluator: add after finalize");
  if (chosen_ == EvalMethod::Spectral)
    stage_spec_.push_back(to_spectral(f).c);
  else
    stage_phys_.push_back(f.v);
  return nf_++;
}

int FieldEvaluator::add(const SpectralScalar& s) {
  if (!(s.g == g_)) throw std::invalid_argument("evaluator: grid mismatch");
  if (finalized_) throw std::logic_error("evaluator: add after finalize");
  if (chosen_ == EvalMethod::Spectral)
    stage_spec_.push_back(s.c);
  else
    stage_phys_.push_back(to_physical(s).v);
  return nf_++;
}

int FieldEvaluator::add_vector(const VectorField& u) {
  int first = nf_;
  for (int a = 0; a < u.ncomp; ++a) {
    ScalarField f(u.g);
    f.v = u.comp[a];
    add(f);
  }
  return first;
}

void FieldEvaluator::finalize() {
  if (finalized_) return;
  finalized_ = true;
  if (nf_ == 0) return;
  if (chosen_ == EvalMethod::Spectral) {
    std::size_t nm = g_.spec_size();
    spec_.resize(nm * nf_);
    for (int f = 0; f < nf_; ++f)
      for (std::size_t m = 0; m < nm; ++m) spec_[m * nf_ + f] = stage_spec_[f][m];
    stage_spec_.clear();
    stage_spec_.shrink_to_fit();
  } else {
    std::size_t np = g_.size();
    phys_.resize(np * nf_);
    for (int f = 0; f < nf_; ++f)
      for (std::size_t p = 0; p < np; ++p) phys_[p * nf_ + f] = stage_phys_[f][p];
    stage_phys_.clear();
    stage_phys_.shrink_to_fit();
  }
}

void FieldEvaluator::eval(const std::array<double, 3>& x, double* out) const {
  if (!finalized_) throw std::logic_error("evaluator: eval before finalize");
  if (chosen_ == EvalMethod::Spectral)
    eval_spectral(x, out);
  else
    eval_tricubic(x, out);
}

void FieldEvaluator::eval_spectral(const std::array<double, 3>& x, double* out) const {
  auto ns = g_.nspec();
  thread_local std::vector<std::complex<double>> px, py, pz;
  px.resize(ns[0]);
  py.resize(ns[1]);
  pz.resize(ns[2]);
  for (int i = 0; i < ns[0]; ++i) px[i] = std::polar(1.0, g_.wavenumber(0, i) * x[0]);
  for (int j = 0; j < ns[1]; ++j) py[j] = std::polar(1.0, g_.wavenumber(1, j) * x[1]);
  if (g_.dim == 3)
    for (int k = 0; k < ns[2]; ++k) pz[k] = std::polar(1.0, g_.wavenumber(2, k) * x[2]);
  else
    pz[0] = 1.0;

  for (int f = 0; f < nf_; ++f) out[f] = 0.0;
  const std::complex<double>* data = spec_.data();
  std::size_t idx = 0;
  for (int i = 0; i < ns[0]; ++i) {
    for (int j = 0; j < ns[1]; ++j) {
      std::complex<double> pij = px[i] * py[j];
      for (int k = 0; k < ns[2]; ++k, ++idx) {
        double w = mode_weight(g_, j, k);
        std::complex<double> ph = pij * pz[k];
        double pr = w * ph.real(), pi = w * ph.imag();
        const std::complex<double>* c = data + idx * nf_;
        for (int f = 0; f < nf_; ++f) out[f] += c[f].real() * pr - c[f].imag() * pi;
      }
    }
  }
}

namespace {
// 4-point Lagrange weights for nodes {-1,0,1,2} at parameter t in [0,1)
inline void lagrange4(double t, double w[4]) {
  w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
  w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
  w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
}
}  // namespace

void FieldEvaluator::eval_tricubic(const std::array<double, 3>& x, double* out) const {
  int base[3][4];
  double w[3][4];
  for (int a = 0; a < 3; ++a) {
    if (a >= g_.dim) {
      base[a][0] = 0;
      w[a][0] = 1.0;
      for (int s = 1; s < 4; ++s) {
        base[a][s] = 0;
        w[a][s] = 0.0;
      }
      continue;
    }
    double u = x[a] / g_.h(a);
    double fl = std::floor(u);
    double t = u - fl;
    long ic = long(fl);
    lagrange4(t, w[a]);
    for (int s = 0; s < 4; ++s) {
      long ii = (ic - 1 + s) % g_.n[a];
      if (ii < 0) ii += g_.n[a];
      base[a][s] = int(ii);
    }
  }
  for (int f = 0; f < nf_; ++f) out[f] = 0.0;
  const double* data = phys_.data();
  const int smax = g_.dim == 3 ? 4 : 1;
  for (int si = 0; si < 4; ++si) {
    for (int sj = 0; sj < 4; ++sj) {
      double wij = w[0][si] * w[1][sj];
      for (int sk = 0; sk < smax; ++sk) {
        double wgt = wij * w[2][sk];
        std::size_t idx = g_.idx(base[0][si], base[1][sj], base[2][sk]);
        const double* v = data + idx * nf_;
        for (int f = 0; f < nf_; ++f) out[f] += wgt * v[f];
      }
    }
  }
}

PeakResult refined_max_norm(const Grid& g, const std::vector<const std::vector<double>*>& comps,
                            EvalMethod m) {
  // grid scan
  std::size_t best = 0;
  double best2 = -1.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    double s = 0.0;
    for (auto* c : comps) s += (*c)[p] * (*c)[p];
    if (s > best2) {
      best2 = s;
      best = p;
    }
  }
  int k = int(best % g.n[2]);
  int j = int((best / g.n[2]) % g.n[1]);
  int i = int(best / (std::size_t(g.n[1]) * g.n[2]));
  PeakResult r;
  r.x = {g.coord(0, i), g.dim > 1 ? g.coord(1, j) : 0.0, g.dim == 3 ? g.coord(2, k) : 0.0};
  r.value = std::sqrt(best2);

  FieldEvaluator ev(g, m);
  for (auto* c : comps) {
    ScalarField f(g);
    f.v = *c;
    ev.add(f);
  }
  ev.finalize();
  std::vector<double> vals(comps.size());
  double span = g.h_min();
  // three nested patch searches: +-span at span/4 resolution each level
  for (int level = 0; level < 3; ++level) {
    std::array<double, 3> c = r.x;
    double step = span / 4.0;
    for (int di = -4; di <= 4; ++di)
      for (int dj = -4; dj <= 4; ++dj)
        for (int dk = (g.dim == 3 ? -4 : 0); dk <= (g.dim == 3 ? 4 : 0); ++dk) {
          std::array<double, 3> x{c[0] + di * step, c[1] + dj * step,
                                  g.dim == 3 ? c[2] + dk * step : 0.0};
          ev.eval(x, vals.data());
          double s = 0.0;
          for (double v : vals) s += v * v;
          if (s > r.value * r.value) {
            r.value = std::sqrt(s);
            r.x = x;
          }
        }
    span = step;
  }
  return r;
}

ScalarField upsample(const ScalarField& f, int factor) {
  if (factor < 1) throw std::invalid_argument("upsample: factor >= 1");
  if (factor == 1) return f;
  SpectralScalar s = to_spectral(f);
  for (int a = 0; a < f.g.dim; ++a) zero_nyquist(s, a);
  Grid big = f.g;
  for (int a = 0; a < f.g.dim; ++a) big.n[a] *= factor;
  SpectralScalar out(big);
  auto ns = f.g.nspec();
  for (int i = 0; i < ns[0]; ++i) {
    int mi = f.g.kindex(0, i);
    int bi = mi >= 0 ? mi : mi + big.n[0];
    for (int j = 0; j < ns[1]; ++j) {
      int mj = f.g.kindex(1, j);
      int bj = mj >= 0 ? mj : mj + big.n[1];
      for (int k = 0; k < ns[2]; ++k) {
        int mk = f.g.dim == 3 ? f.g.kindex(2, k) : 0;
        int bk = mk >= 0 ? mk : mk + big.n[2];
        out.c[big.sidx(bi, f.g.dim == 2 ? mj : bj, f.g.dim == 3 ? mk : 0)] =
            s.c[f.g.sidx(i, j, k)];
      }
    }
  }
  return to_physical(out);
}

ScalarField restrict_modes(const ScalarField& f, const Grid& coarse) {
  if (coarse.dim != f.g.dim) throw std::invalid_argument("restrict_modes: dim mismatch");
  SpectralScalar s = to_spectral(f);
  SpectralScalar out(coarse);
  auto ns = coarse.nspec();
  for (int i = 0; i < ns[0]; ++i) {
    int mi = coarse.kindex(0, i);
    if (coarse.n[0] % 2 == 0 && mi == coarse.n[0] / 2) continue;
    int fi = mi >= 0 ? mi : mi + f.g.n[0];
    for (int j = 0; j < ns[1]; ++j) {
      int mj = coarse.kindex(1, j);
      if (coarse.n[1] % 2 == 0 && std::abs(mj) == coarse.n[1] / 2) continue;
      int fj = mj >= 0 ? mj : mj + f.g.n[1];
      for (int k = 0; k < ns[2]; ++k) {
        int mk = coarse.dim == 3 ? coarse.kindex(2, k) : 0;
        if (coarse.dim == 3 && coarse.n[2] % 2 == 0 && mk == coarse.n[2] / 2) continue;
        int fk = mk >= 0 ? mk : mk + f.g.n[2];
        out.c[coarse.sidx(i, j, k)] =
            s.c[f.g.sidx(fi, coarse.dim == 2 ? mj : fj, coarse.dim == 3 ? mk : 0)];
      }
    }
  }
  return to_physical(out);
}

}  // namespace vortiline
