#include "vortiline/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

namespace vortiline::fft {
namespace {

// One cached plan pair + aligned scratch per grid shape.  FFTW planning is
// not thread safe and c2r destroys its input, so all execution goes through
// the entry mutex with copies in/out of the scratch buffers.
struct PlanEntry {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  std::size_t nreal = 0, ncplx = 0;
  std::mutex mtx;
};

std::mutex g_table_mtx;
std::map<std::array<int, 4>, PlanEntry*>& table() {
  static std::map<std::array<int, 4>, PlanEntry*> t;
  return t;
}

PlanEntry& entry_for(const Grid& g) {
  std::array<int, 4> key{g.dim, g.n[0], g.n[1], g.n[2]};
  std::lock_guard<std::mutex> lk(g_table_mtx);
  auto& t = table();
  auto it = t.find(key);
  if (it != t.end()) return *it->second;

  auto* e = new PlanEntry;
  e->nreal = g.size();
  e->ncplx = g.spec_size();
  e->real = fftw_alloc_real(e->nreal);
  e->cplx = fftw_alloc_complex(e->ncplx);
  int rank = g.dim;
  int dims[3] = {g.n[0], g.n[1], g.n[2]};
  e->fwd = fftw_plan_dft_r2c(rank, dims, e->real, e->cplx, FFTW_ESTIMATE);
  e->bwd = fftw_plan_dft_c2r(rank, dims, e->cplx, e->real, FFTW_ESTIMATE);
  if (!e->fwd || !e->bwd) throw std::runtime_error("fft: planning failed");
  t.emplace(key, e);
  return *e;
}

}  // namespace

SpectralScalar forward(const ScalarField& f) {
  PlanEntry& e = entry_for(f.g);
  SpectralScalar out(f.g);
  const double scale = 1.0 / double(f.g.size());
  std::lock_guard<std::mutex> lk(e.mtx);
  std::memcpy(e.real, f.v.data(), e.nreal * sizeof(double));
  fftw_execute(e.fwd);
  auto* src = reinterpret_cast<const std::complex<double>*>(e.cplx);
  for (std::size_t i = 0; i < e.ncplx; ++i) out.c[i] = src[i] * scale;
  return out;
}

ScalarField inverse(const SpectralScalar& s) {
  PlanEntry& e = entry_for(s.g);
  ScalarField out(s.g);
  std::lock_guard<std::mutex> lk(e.mtx);
  std::memcpy(e.cplx, s.c.data(), e.ncplx * sizeof(fftw_complex));
  fftw_execute(e.bwd);
  std::memcpy(out.v.data(), e.real, e.nreal * sizeof(double));
  return out;
}

}  // namespace vortiline::fft
