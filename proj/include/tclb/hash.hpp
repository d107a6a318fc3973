#pragma once

#include <cstdint>
#include <string>

namespace tclb {

// FNV-1a 64-bit content hash, rendered as fixed-width hex. Used to pin
// certificate payloads so verification cannot silently run against
// different objects.
inline std::string fnv1a64_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace tclb
