#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rankwalk {

// FNV-1a, 64-bit. Stable across platforms; used to fingerprint inputs and
// configurations so artifacts can state what produced them.
inline constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::string to_hex16(std::uint64_t v);

// Splits on a delimiter without any quoting rules; the ranking CSVs we ingest
// do not quote fields. Empty fields are preserved.
std::vector<std::string_view> split(std::string_view line, char delim);

std::string_view trim(std::string_view s);

// L1/2 distance between two distributions of equal length.
double total_variation(std::span<const double> a, std::span<const double> b);

}  // namespace rankwalk
