#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace detpart {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;
using BlockId = std::int32_t;
using Weight = std::int64_t;
using Gain = std::int64_t;

inline constexpr BlockId kInvalidBlock = -1;
inline constexpr VertexId kInvalidVertex = std::numeric_limits<VertexId>::max();

// Exact non-negative rational, used for epsilon and other tolerances that
// take part in balance decisions.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  // Parses "0.03", "1", "3/100". Throws std::invalid_argument otherwise.
  static Rational parse(std::string_view text);
  static Rational from_double(double value, std::int64_t den = 1'000'000);

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;

  friend bool operator==(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
  }
};

// 64-bit FNV-1a, the hash used for partition and phase fingerprints.
class Fnv1a {
 public:
  static constexpr std::uint64_t kOffset = 14695981039346656037ULL;
  static constexpr std::uint64_t kPrime = 1099511628211ULL;

  void add_byte(std::uint8_t b) {
    state_ ^= b;
    state_ *= kPrime;
  }
  void add_u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) add_byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void add_u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) add_byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = kOffset;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed ^ splitmix64(salt));
}

}  // namespace detpart
