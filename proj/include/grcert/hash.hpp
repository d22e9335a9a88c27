#ifndef GRCERT_HASH_HPP
#define GRCERT_HASH_HPP

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace grcert {

// FNV-1a 64-bit content hash, used for manifest artifact hashes and config
// fingerprints.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return std::string(buf);
}

}  // namespace grcert

#endif
