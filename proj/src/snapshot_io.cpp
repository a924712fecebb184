#include "qsol/snapshot_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace qsol {

namespace {

constexpr char kMagic[8] = {'Q', 'S', 'O', 'L', 'S', 'N', 'P', '1'};
constexpr std::uint32_t kOrderTag = 0x01020304u;

template <typename T>
void write_pod(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& f, T& v) {
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void save_snapshot(const GaussianState& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot open snapshot file for writing: " + path);
  f.write(kMagic, sizeof(kMagic));
  write_pod(f, kOrderTag);
  write_pod(f, static_cast<std::uint32_t>(s.grid.domain == Domain::Frequency ? 1 : 0));
  write_pod(f, static_cast<std::uint64_t>(s.grid.sites));
  write_pod(f, s.grid.length);
  write_pod(f, s.t);
  const auto m = static_cast<std::size_t>(s.grid.sites);
  f.write(reinterpret_cast<const char*>(s.mean.data()), m * sizeof(Complex));
  f.write(reinterpret_cast<const char*>(s.normal.data()), m * m * sizeof(Complex));
  f.write(reinterpret_cast<const char*>(s.anomalous.data()), m * m * sizeof(Complex));
  if (!f) throw ConfigError("snapshot write failed: " + path);
}

GaussianState load_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open snapshot file: " + path);
  char magic[8];
  f.read(magic, sizeof(magic));
  if (!f || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw ConfigError("not a snapshot file (bad magic): " + path);
  std::uint32_t order = 0, domain = 0;
  std::uint64_t m = 0;
  double length = 0.0, t = 0.0;
  read_pod(f, order);
  if (order != kOrderTag)
    throw ConfigError("snapshot byte order does not match this machine: " + path);
  read_pod(f, domain);
  read_pod(f, m);
  read_pod(f, length);
  read_pod(f, t);
  if (!f || m < 2 || domain > 1) throw ConfigError("corrupt snapshot header: " + path);

  Grid pos = build_grid(static_cast<int>(m), length);
  GaussianState s = GaussianState::vacuum(domain == 1 ? frequency_grid(pos) : pos);
  s.t = t;
  f.read(reinterpret_cast<char*>(s.mean.data()), m * sizeof(Complex));
  f.read(reinterpret_cast<char*>(s.normal.data()), m * m * sizeof(Complex));
  f.read(reinterpret_cast<char*>(s.anomalous.data()), m * m * sizeof(Complex));
  if (!f) throw ConfigError("snapshot truncated: " + path);
  return s;
}

}  // namespace qsol
