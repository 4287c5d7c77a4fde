#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

namespace ote {

// FNV-1a over raw bytes; stable across runs, used for cache keys.
class Fnv1a {
 public:
  Fnv1a& add_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 1099511628211ull;
    }
    return *this;
  }
  Fnv1a& add(double v) {
    if (v == 0.0) v = 0.0;  // fold -0
    return add_bytes(&v, sizeof v);
  }
  Fnv1a& add(std::int64_t v) { return add_bytes(&v, sizeof v); }
  Fnv1a& add(std::string_view s) {
    add(static_cast<std::int64_t>(s.size()));
    return add_bytes(s.data(), s.size());
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 1469598103934665603ull;
};

}  // namespace ote
