#include "conelab/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace conelab {

namespace {

constexpr char kMagic[8] = {'C', 'O', 'N', 'E', 'W', '0', '0', '1'};

void put_u64(std::string& buf, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void put_f64(std::string& buf, double v) { put_u64(buf, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_u64(p)); }

}  // namespace

void write_snapshot(const std::filesystem::path& path, const VectorField& field,
                    double rho, double nu) {
  std::string buf;
  const GridSpec& g = field.spec();
  buf.reserve(72 + field.comps.size() * g.size() * 8);
  buf.append(kMagic, sizeof(kMagic));
  put_u64(buf, static_cast<std::uint64_t>(g.n));
  put_u64(buf, static_cast<std::uint64_t>(field.frame()));
  put_u64(buf, static_cast<std::uint64_t>(g.points_per_axis));
  put_f64(buf, g.half_extent);
  put_f64(buf, rho);
  put_f64(buf, nu);
  put_f64(buf, field.time_tag());
  put_u64(buf, static_cast<std::uint64_t>(field.comps.size()));
  for (const auto& comp : field.comps)
    for (const double v : comp.samples) put_f64(buf, v);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_snapshot: cannot open " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write_snapshot: write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_snapshot: cannot open " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 72 || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("read_snapshot: bad magic in " + path.string());

  const auto* p = reinterpret_cast<const unsigned char*>(buf.data()) + 8;
  const auto n = static_cast<int>(get_u64(p));
  const auto frame = static_cast<Frame>(get_u64(p + 8));
  const auto points = static_cast<int>(get_u64(p + 16));
  const double half_extent = get_f64(p + 24);
  const double rho = get_f64(p + 32);
  const double nu = get_f64(p + 40);
  const double time_tag = get_f64(p + 48);
  const auto comps = static_cast<std::size_t>(get_u64(p + 56));

  const GridSpec grid(n, points, half_extent);
  const std::size_t expected = 72 + comps * grid.size() * 8;
  if (buf.size() != expected)
    throw std::runtime_error("read_snapshot: truncated file " + path.string());

  Snapshot snap;
  snap.rho = rho;
  snap.nu = nu;
  snap.field.comps.assign(comps, ScalarField(grid, frame, time_tag));
  const auto* data = p + 64;
  for (std::size_t c = 0; c < comps; ++c)
    for (std::size_t q = 0; q < grid.size(); ++q, data += 8)
      snap.field.comps[c].samples[q] = get_f64(data);
  return snap;
}

}  // namespace conelab
