#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "rankwalk/errors.hpp"

namespace rankwalk {

// Identifier recorded next to every sample set. The generator below plus the
// two derivations in this header fully determine the stream, so two builds
// that report the same identifier and seed produce bit-identical draws.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64/lemire-u53/v1";

// Seeded pseudorandom stream. std::mt19937_64 has a standard-mandated output
// sequence; the float and bounded-int derivations are written out here rather
// than taken from <random> distributions, whose mappings vary by vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, m). Lower-tail rejection keeps it exactly uniform.
  std::uint64_t uniform_index(std::uint64_t m) {
    if (m == 0) throw StructuralError("uniform_index: empty range");
    const std::uint64_t threshold = (0 - m) % m;  // 2^64 mod m
    std::uint64_t x = gen_();
    while (x < threshold) x = gen_();
    return x % m;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace rankwalk
