#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

namespace qsol {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kFloatFormat = "%.17g";

// 17 significant digits round-trip any double exactly; every CSV field uses
// this so reruns are byte-identical.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), kFloatFormat, v);
  return buf;
}

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace qsol
