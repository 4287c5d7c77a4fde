#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <unordered_map>

#include "ote/fmm.hpp"

namespace ote {

struct CacheKey {
  std::uint64_t geometry = 0;
  bool imaginary = false;
  double frequency = 0.0;
  double kx = 0.0;
  double ky = 0.0;
  int M = 0;
  int branch = 0;

  bool operator==(const CacheKey&) const = default;
};

struct CacheKeyHash {
  std::size_t operator()(const CacheKey& k) const;
};

// In-memory S-matrix store with an optional on-disk mirror (one versioned
// binary file per geometry hash). Lookups return exact copies, so caching
// never changes a result.
class SMatrixCache {
 public:
  static constexpr std::uint32_t format_version = 1;

  explicit SMatrixCache(std::optional<std::filesystem::path> directory = std::nullopt,
                        std::size_t capacity = 10000);
  ~SMatrixCache();
  SMatrixCache(const SMatrixCache&) = delete;
  SMatrixCache& operator=(const SMatrixCache&) = delete;

  std::optional<SMatrix> find(const CacheKey& key);
  void insert(const CacheKey& key, const SMatrix& s);
  // Writes new entries of every touched geometry to disk.
  void flush();

  std::size_t size() const;
  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }

 private:
  void load_geometry(std::uint64_t geometry);
  std::filesystem::path file_for(std::uint64_t geometry) const;

  std::optional<std::filesystem::path> directory_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::unordered_map<CacheKey, SMatrix, CacheKeyHash> entries_;
  std::set<std::uint64_t> loaded_;
  std::set<std::uint64_t> dirty_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

}  // namespace ote
