#pragma once

// On-disk caches. Layout, all little-endian:
//   8 bytes  magic "FKDVCACH"
//   u32      format version
//   u32      payload kind (1 = offset blocks, 2 = spectral reference samples)
//   u64      key length in bytes, followed by the key text (UTF-8)
//   u64      number of f64 values, followed by the values
// The key text spells out every parameter the payload depends on, so a
// mismatching file is treated as a miss. Values are stored bit-for-bit.

#include "fkdv/frac_assembly.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fkdv {

inline constexpr unsigned kCacheVersion = 1;

struct OffsetBlockKey {
  double alpha;
  int n_elems;
  double length;
  QuadratureSpec quad;
  OperatorKind kind;
  AssemblyBackend backend;
  long m_modes;

  std::string text() const;
};

struct SpectralKey {
  std::string experiment;
  double alpha;
  int m;
  double dt;
  double t0;
  double t_final;

  std::string text() const;
};

std::optional<OffsetBlocks> load_offset_blocks(const std::filesystem::path& dir, const OffsetBlockKey& key);
void store_offset_blocks(const std::filesystem::path& dir, const OffsetBlockKey& key, const OffsetBlocks& blocks);

std::optional<std::vector<double>> load_spectral_reference(const std::filesystem::path& dir, const SpectralKey& key);
void store_spectral_reference(const std::filesystem::path& dir, const SpectralKey& key,
                              const std::vector<double>& samples);

/// Low-level record I/O used by both caches. Throws std::runtime_error on I/O failure.
void write_cache_record(const std::filesystem::path& file, unsigned kind, const std::string& key,
                        const std::vector<double>& values);
/// Returns nothing if the file is absent, malformed, of another version, or keyed differently.
std::optional<std::vector<double>> read_cache_record(const std::filesystem::path& file, unsigned kind,
                                                     const std::string& key);

} // namespace fkdv
