#include "disslab/dlf_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include <zlib.h>

namespace disslab {

namespace {

static_assert(std::endian::native == std::endian::little, "DLF1 I/O assumes a little-endian host");

constexpr std::size_t kMagicBytes = 64;

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw Error("truncated DLF1 header");
  return v;
}

}  // namespace

std::uint32_t crc32_of(const void* data, std::size_t bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  const auto* p = static_cast<const Bytef*>(data);
  while (bytes > 0) {
    const uInt chunk = static_cast<uInt>(std::min<std::size_t>(bytes, 1u << 30));
    crc = crc32(crc, p, chunk);
    p += chunk;
    bytes -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

void write_dlf(const std::string& path, const SpaceTimeField& field) {
  const PeriodicGrid& g = field.grid();
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + tmp + " for writing");
    std::string magic = "DLF1";
    magic.resize(kMagicBytes, ' ');
    os.write(magic.data(), kMagicBytes);
    put<std::uint32_t>(os, g.d);
    put<std::uint32_t>(os, g.n);
    put<std::uint32_t>(os, field.components());
    put<std::uint32_t>(os, g.nt);
    put<double>(os, g.L);
    put<double>(os, g.dt);
    put<double>(os, field.info().viscosity);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(field.info().name.size()));
    os.write(field.info().name.data(), static_cast<std::streamsize>(field.info().name.size()));
    const std::size_t bytes = field.samples().size() * sizeof(double);
    os.write(reinterpret_cast<const char*>(field.samples().data()),
             static_cast<std::streamsize>(bytes));
    put<std::uint32_t>(os, crc32_of(field.samples().data(), bytes));
    if (!os) throw Error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error("cannot move " + tmp + " into place");
}

SpaceTimeField read_dlf(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  char magic[kMagicBytes];
  if (!is.read(magic, kMagicBytes)) throw Error("truncated DLF1 header");
  if (std::memcmp(magic, "DLF1", 4) != 0) throw Error("bad DLF1 magic in " + path);
  const auto d = get<std::uint32_t>(is);
  const auto n = get<std::uint32_t>(is);
  const auto c = get<std::uint32_t>(is);
  const auto nt = get<std::uint32_t>(is);
  const auto L = get<double>(is);
  const auto dt = get<double>(is);
  const auto nu = get<double>(is);
  const auto name_len = get<std::uint32_t>(is);
  if (name_len > (1u << 20)) throw Error("implausible DLF1 name length");
  std::string name(name_len, '\0');
  if (!is.read(name.data(), name_len)) throw Error("truncated DLF1 name");
  const PeriodicGrid g = make_grid(static_cast<int>(d), static_cast<int>(n), L,
                                   static_cast<int>(nt), dt);
  if (c < 1 || c > 16) throw Error("implausible DLF1 component count");
  Eigen::ArrayXd samples(g.points() * c * nt);
  const std::size_t bytes = samples.size() * sizeof(double);
  if (!is.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(bytes)))
    throw Error("truncated DLF1 payload");
  const auto stored = get<std::uint32_t>(is);
  if (stored != crc32_of(samples.data(), bytes)) throw Error("DLF1 checksum mismatch in " + path);
  return SpaceTimeField(g, static_cast<int>(c), std::move(samples), FieldInfo{name, nu, ""});
}

}  // namespace disslab
