#include "fkdv/binary_cache.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace fkdv {
namespace {

constexpr std::array<char, 8> kMagic{'F', 'K', 'D', 'V', 'C', 'A', 'C', 'H'};

template <class T> void put(std::string& buf, T v) {
  std::array<char, sizeof(T)> b;
  std::memcpy(b.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(b.begin(), b.end());
  buf.append(b.data(), b.size());
}

template <class T> bool get(std::istream& in, T& v) {
  std::array<char, sizeof(T)> b;
  if (!in.read(b.data(), sizeof(T)))
    return false;
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(b.begin(), b.end());
  std::memcpy(&v, b.data(), sizeof(T));
  return true;
}

// FNV-1a, for file names only; the full key is checked on load.
std::string digest(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return fmt::format("{:016x}", h);
}

} // namespace

std::string OffsetBlockKey::text() const {
  // hex floats keep the key exact
  return fmt::format("blocks alpha={:a} n={} length={:a} inner={} pv={} near={:a} tol={:a} images={} kind={} "
                     "backend={} modes={}",
                     alpha, n_elems, length, quad.inner_pts, quad.pv_pts, quad.near_split, quad.image_tail_tol,
                     quad.max_images, to_string(kind), to_string(backend),
                     backend == AssemblyBackend::spectral ? m_modes : 0L);
}

std::string SpectralKey::text() const {
  return fmt::format("spectral experiment={} alpha={:a} m={} dt={:a} t0={:a} t1={:a}", experiment, alpha, m, dt, t0,
                     t_final);
}

void write_cache_record(const std::filesystem::path& file, unsigned kind, const std::string& key,
                        const std::vector<double>& values) {
  std::string buf(kMagic.begin(), kMagic.end());
  put<std::uint32_t>(buf, kCacheVersion);
  put<std::uint32_t>(buf, kind);
  put<std::uint64_t>(buf, key.size());
  buf += key;
  put<std::uint64_t>(buf, values.size());
  for (double v : values)
    put<double>(buf, v);
  std::filesystem::create_directories(file.parent_path());
  auto tmp = file;
  tmp += fmt::format(".tmp{:x}", std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out.write(buf.data(), static_cast<std::streamsize>(buf.size())))
      throw std::runtime_error(fmt::format("cannot write cache file {}", tmp.string()));
  }
  std::filesystem::rename(tmp, file);
}

std::optional<std::vector<double>> read_cache_record(const std::filesystem::path& file, unsigned kind,
                                                     const std::string& key) {
  std::ifstream in(file, std::ios::binary);
  if (!in)
    return std::nullopt;
  std::array<char, 8> magic;
  std::uint32_t version = 0;
  std::uint32_t stored_kind = 0;
  std::uint64_t key_len = 0;
  if (!in.read(magic.data(), magic.size()) || magic != kMagic || !get(in, version) || version != kCacheVersion ||
      !get(in, stored_kind) || stored_kind != kind || !get(in, key_len) || key_len != key.size())
    return std::nullopt;
  std::string stored(key_len, '\0');
  if (!in.read(stored.data(), static_cast<std::streamsize>(key_len)) || stored != key)
    return std::nullopt;
  std::uint64_t count = 0;
  if (!get(in, count) || count > (1ULL << 34))
    return std::nullopt;
  std::vector<double> values(count);
  for (auto& v : values)
    if (!get(in, v))
      return std::nullopt;
  return values;
}

std::optional<OffsetBlocks> load_offset_blocks(const std::filesystem::path& dir, const OffsetBlockKey& key) {
  const std::string text = key.text();
  auto values = read_cache_record(dir / ("blocks_" + digest(text) + ".bin"), 1, text);
  if (!values || values->size() != 4 * static_cast<std::size_t>(key.n_elems))
    return std::nullopt;
  OffsetBlocks blocks(static_cast<std::size_t>(key.n_elems));
  for (std::size_t m = 0; m < blocks.size(); ++m)
    blocks[m] << (*values)[4 * m], (*values)[4 * m + 1], (*values)[4 * m + 2], (*values)[4 * m + 3];
  return blocks;
}

void store_offset_blocks(const std::filesystem::path& dir, const OffsetBlockKey& key, const OffsetBlocks& blocks) {
  std::vector<double> values;
  values.reserve(4 * blocks.size());
  for (const auto& b : blocks)
    values.insert(values.end(), {b(0, 0), b(0, 1), b(1, 0), b(1, 1)});
  const std::string text = key.text();
  write_cache_record(dir / ("blocks_" + digest(text) + ".bin"), 1, text, values);
}

std::optional<std::vector<double>> load_spectral_reference(const std::filesystem::path& dir, const SpectralKey& key) {
  const std::string text = key.text();
  auto values = read_cache_record(dir / ("spectral_" + digest(text) + ".bin"), 2, text);
  if (values && values->size() != static_cast<std::size_t>(key.m))
    return std::nullopt;
  return values;
}

void store_spectral_reference(const std::filesystem::path& dir, const SpectralKey& key,
                              const std::vector<double>& samples) {
  const std::string text = key.text();
  write_cache_record(dir / ("spectral_" + digest(text) + ".bin"), 2, text, samples);
}

} // namespace fkdv
