#include "fairal/snapshot_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>

#include "fairal/errors.hpp"

namespace fairal {

namespace {

constexpr char kMagic[5] = {'F', 'A', 'L', 'W', '1'};

// The writers emit little-endian bytes regardless of host order so snapshot
// files stay portable.
void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) {
    b[i] = static_cast<unsigned char>(bits >> (8 * i));
  }
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw IoError("snapshot: truncated integer field");
  }
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) {
    throw IoError("snapshot: truncated float payload");
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_snapshot(const ParameterSet& params, std::ostream& out) {
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    put_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put_u32(out, static_cast<std::uint32_t>(p.value.rank()));
    for (std::size_t d : p.value.shape()) {
      put_u32(out, static_cast<std::uint32_t>(d));
    }
    for (double v : p.value.values()) put_f64(out, v);
  }
  if (!out) throw IoError("snapshot: write failed");
}

void save_snapshot_file(const ParameterSet& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("snapshot: cannot open for write: " + path);
  save_snapshot(params, out);
}

ParameterSet load_snapshot(std::istream& in) {
  char magic[5];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError("snapshot: bad magic, not a FALW1 file");
  }
  std::uint32_t count = get_u32(in);
  ParameterSet params;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t name_len = get_u32(in);
    std::string name(name_len, '\0');
    if (name_len > 0 && !in.read(name.data(), name_len)) {
      throw IoError("snapshot: truncated parameter name");
    }
    std::uint32_t rank = get_u32(in);
    if (rank > 8) throw IoError("snapshot: implausible tensor rank");
    std::vector<std::size_t> shape(rank);
    std::size_t total = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      shape[d] = get_u32(in);
      if (shape[d] != 0 &&
          total > std::numeric_limits<std::size_t>::max() / shape[d]) {
        throw IoError("snapshot: tensor size overflow");
      }
      total *= shape[d];
    }
    std::vector<double> values(total);
    for (std::size_t v = 0; v < total; ++v) values[v] = get_f64(in);
    params.add(std::move(name), Tensor(std::move(shape), std::move(values)));
  }
  return params;
}

ParameterSet load_snapshot_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("snapshot: cannot open for read: " + path);
  return load_snapshot(in);
}

}  // namespace fairal
