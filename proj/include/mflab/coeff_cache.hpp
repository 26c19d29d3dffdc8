#pragma once

// On-disk cache of eigenform q-expansions.
//
// One text file per (weight, n_terms), named f<weight>_<n_terms>.qexp:
//
//   mflab-qexp-cache
//   version 1
//   weight <k>
//   n_terms <n>
//   checksum fnv1a64:<16 lowercase hex digits>
//   <a(0)>
//   <a(1)>
//   ...                         (exactly n lines, decimal, leading '-' if negative)
//
// The checksum is FNV-1a (64-bit) over the coefficient lines, each including
// its trailing '\n'. A file that fails to parse or whose checksum does not
// match is treated as absent and rewritten.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "mflab/qexp.hpp"

namespace mflab::qexp {

inline constexpr int kCacheFormatVersion = 1;

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ULL);

class CoefficientCache {
 public:
  explicit CoefficientCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path path_for(int weight, std::size_t n_terms) const;

  /// The cached form if an intact file with at least n_terms coefficients exists.
  std::optional<Eigenform> load(int weight, std::size_t n_terms) const;
  void store(const Eigenform& f) const;

  Eigenform get_or_compute(int weight, std::size_t n_terms,
                           std::size_t terms_cap = kDefaultTermsCap) const;

 private:
  std::optional<Eigenform> read_file(const std::filesystem::path& path, int weight,
                                     std::size_t n_terms) const;

  std::filesystem::path dir_;
};

}  // namespace mflab::qexp
