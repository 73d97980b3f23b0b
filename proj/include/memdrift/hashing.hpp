#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace memdrift {

/// 64-bit FNV-1a. Stable across platforms; used for content keys and provenance, not security.
class Fnv1a {
 public:
  Fnv1a& update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }

  /// Appends a field followed by a separator byte so ("ab","c") and ("a","bc") differ.
  Fnv1a& field(std::string_view bytes) {
    update(bytes);
    return update(std::string_view("\x1f", 1));
  }

  std::uint64_t digest() const { return state_; }

  std::string hex() const { return to_hex(state_); }

  static std::string to_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string content_hash(std::string_view bytes) { return Fnv1a{}.update(bytes).hex(); }

}  // namespace memdrift
