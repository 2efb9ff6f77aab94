#include "vortiline/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

namespace vortiline {
namespace {

constexpr char kMagic[4] = {'V', 'L', 'N', '1'};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

void put(std::FILE* f, const void* p, std::size_t n) {
  if (std::fwrite(p, 1, n, f) != n) throw std::runtime_error("snapshot: short write");
}
void get(std::FILE* f, void* p, std::size_t n) {
  if (std::fread(p, 1, n, f) != n) throw std::runtime_error("snapshot: short read");
}

}  // namespace

void write_snapshot(const std::string& path, const Grid& g,
                    const std::vector<const std::vector<double>*>& comps, double time) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "wb"));
  if (!f) throw std::runtime_error("snapshot: cannot open " + path + " for writing");
  put(f.get(), kMagic, 4);
  std::uint32_t dim = g.dim;
  put(f.get(), &dim, 4);
  for (int a = 0; a < g.dim; ++a) {
    std::uint32_t n = g.n[a];
    put(f.get(), &n, 4);
  }
  std::uint32_t nc = std::uint32_t(comps.size());
  put(f.get(), &nc, 4);
  put(f.get(), &time, 8);
  for (int a = 0; a < g.dim; ++a) put(f.get(), &g.length[a], 8);
  for (auto* c : comps) {
    if (c->size() != g.size()) throw std::runtime_error("snapshot: component size mismatch");
    put(f.get(), c->data(), c->size() * 8);
  }
}

Snapshot read_snapshot(const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("snapshot: cannot open " + path);
  char magic[4];
  get(f.get(), magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("snapshot: bad magic in " + path);
  std::uint32_t dim = 0;
  get(f.get(), &dim, 4);
  if (dim != 2 && dim != 3) throw std::runtime_error("snapshot: bad dim");
  Snapshot s;
  std::array<int, 3> n{1, 1, 1};
  for (std::uint32_t a = 0; a < dim; ++a) {
    std::uint32_t v = 0;
    get(f.get(), &v, 4);
    n[a] = int(v);
  }
  s.g = dim == 2 ? Grid::make2d(n[0], n[1]) : Grid::make3d(n[0], n[1], n[2]);
  std::uint32_t nc = 0;
  get(f.get(), &nc, 4);
  get(f.get(), &s.time, 8);
  for (std::uint32_t a = 0; a < dim; ++a) get(f.get(), &s.g.length[a], 8);
  s.comps.resize(nc);
  for (auto& c : s.comps) {
    c.resize(s.g.size());
    get(f.get(), c.data(), c.size() * 8);
  }
  return s;
}

}  // namespace vortiline
