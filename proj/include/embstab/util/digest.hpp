#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace embstab {

/// Incremental FNV-1a 64-bit digest. Used to fingerprint configs, graphs and
/// embedding matrices in manifests; not cryptographic.
class Digest {
 public:
  Digest& bytes(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }

  Digest& str(std::string_view s) { return bytes(s.data(), s.size()); }

  template <typename T>
  Digest& pod(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    return bytes(&v, sizeof(v));
  }

  std::uint64_t value() const { return state_; }

  std::string hex() const {
    static const char* k = "0123456789abcdef";
    std::string out(16, '0');
    std::uint64_t v = state_;
    for (int i = 15; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = k[v & 0xf];
      v >>= 4;
    }
    return out;
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace embstab
