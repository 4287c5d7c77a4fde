#include "ote/smatrix_cache.hpp"

#include <cstring>
#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "ote/hash.hpp"

namespace ote {

namespace {

constexpr char kMagic[8] = {'O', 'T', 'E', 'S', 'M', 'A', 'T', '\0'};

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::istream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof v));
}

void put_matrix(std::ostream& out, const CMat& m) {
  out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(cplx)));
}

bool get_matrix(std::istream& in, CMat& m, int dim) {
  m.resize(dim, dim);
  return static_cast<bool>(
      in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(cplx))));
}

}  // namespace

std::size_t CacheKeyHash::operator()(const CacheKey& k) const {
  Fnv1a h;
  h.add(static_cast<std::int64_t>(k.geometry)).add(static_cast<std::int64_t>(k.imaginary));
  h.add(k.frequency).add(k.kx).add(k.ky).add(static_cast<std::int64_t>(k.M));
  h.add(static_cast<std::int64_t>(k.branch));
  return static_cast<std::size_t>(h.value());
}

SMatrixCache::SMatrixCache(std::optional<std::filesystem::path> directory, std::size_t capacity)
    : directory_(std::move(directory)), capacity_(capacity) {
  if (directory_) std::filesystem::create_directories(*directory_);
}

SMatrixCache::~SMatrixCache() {
  try {
    flush();
  } catch (const std::exception& e) {
    spdlog::warn("S-matrix cache flush failed: {}", e.what());
  }
}

std::filesystem::path SMatrixCache::file_for(std::uint64_t geometry) const {
  return *directory_ / fmt::format("smatrix-v{}-{:016x}.bin", format_version, geometry);
}

void SMatrixCache::load_geometry(std::uint64_t geometry) {
  if (!loaded_.insert(geometry).second || !directory_) return;
  std::ifstream in(file_for(geometry), std::ios::binary);
  if (!in) return;
  char magic[8];
  std::uint32_t version = 0;
  std::uint64_t stored_geometry = 0;
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0 || !get(in, version) ||
      version != format_version || !get(in, stored_geometry) || stored_geometry != geometry) {
    spdlog::warn("ignoring stale or foreign S-matrix cache file for geometry {:016x}", geometry);
    return;
  }
  for (;;) {
    CacheKey k;
    k.geometry = geometry;
    std::uint8_t imag = 0, masked = 0;
    std::int32_t M = 0, branch = 0, dim = 0;
    if (!get(in, imag) || !get(in, k.frequency) || !get(in, k.kx) || !get(in, k.ky) || !get(in, M) ||
        !get(in, branch) || !get(in, masked) || !get(in, dim))
      break;
    k.imaginary = imag != 0;
    k.M = M;
    k.branch = branch;
    CMat rm, tm, tp, rp;
    if (dim <= 0 || dim > 4096 || !get_matrix(in, rm, dim) || !get_matrix(in, tm, dim) ||
        !get_matrix(in, tp, dim) || !get_matrix(in, rp, dim))
      break;
    SMatrix s(std::move(rm), std::move(tm), std::move(tp), std::move(rp));
    if (masked) s.mask_transmission();
    if (entries_.size() < capacity_) entries_.emplace(k, std::move(s));
  }
}

std::optional<SMatrix> SMatrixCache::find(const CacheKey& key) {
  std::lock_guard lock(mutex_);
  load_geometry(key.geometry);
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return it->second;
}

void SMatrixCache::insert(const CacheKey& key, const SMatrix& s) {
  std::lock_guard lock(mutex_);
  load_geometry(key.geometry);
  if (entries_.size() >= capacity_) return;
  if (entries_.emplace(key, s).second) dirty_.insert(key.geometry);
}

void SMatrixCache::flush() {
  std::lock_guard lock(mutex_);
  if (!directory_) return;
  for (std::uint64_t geometry : dirty_) {
    const auto path = file_for(geometry);
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out.write(kMagic, 8);
      put(out, format_version);
      put(out, geometry);
      for (const auto& [k, s] : entries_) {
        if (k.geometry != geometry) continue;
        put(out, static_cast<std::uint8_t>(k.imaginary));
        put(out, k.frequency);
        put(out, k.kx);
        put(out, k.ky);
        put(out, static_cast<std::int32_t>(k.M));
        put(out, static_cast<std::int32_t>(k.branch));
        put(out, static_cast<std::uint8_t>(s.transmission_masked()));
        put(out, static_cast<std::int32_t>(s.dim()));
        put_matrix(out, s.r_minus());
        if (s.transmission_masked()) {
          const CMat zero = CMat::Zero(s.dim(), s.dim());
          put_matrix(out, zero);
          put_matrix(out, zero);
        } else {
          put_matrix(out, s.t_minus());
          put_matrix(out, s.t_plus());
        }
        put_matrix(out, s.r_plus());
      }
    }
    std::filesystem::rename(tmp, path);
  }
  dirty_.clear();
}

std::size_t SMatrixCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

}  // namespace ote
