#include "detpart/types.h"

#include <cctype>
#include <cmath>
#include <numeric>

namespace detpart {

Rational Rational::parse(std::string_view text) {
  auto fail = [&] { throw std::invalid_argument("not a non-negative rational: '" + std::string(text) + "'"); };
  if (text.empty()) fail();
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const Rational n = parse(text.substr(0, slash));
    const Rational d = parse(text.substr(slash + 1));
    if (n.den != 1 || d.den != 1 || d.num == 0) fail();
    const std::int64_t g = std::gcd(n.num, d.num);
    return {n.num / (g == 0 ? 1 : g), d.num / (g == 0 ? 1 : g)};
  }
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_dot) fail();
      seen_dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) fail();
    seen_digit = true;
    if (num > (std::numeric_limits<std::int64_t>::max() - 9) / 10) fail();
    num = num * 10 + (c - '0');
    if (seen_dot) {
      if (den > std::numeric_limits<std::int64_t>::max() / 10) fail();
      den *= 10;
    }
  }
  if (!seen_digit) fail();
  const std::int64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

Rational Rational::from_double(double value, std::int64_t den) {
  if (!(value >= 0.0)) throw std::invalid_argument("negative rational");
  const auto num = static_cast<std::int64_t>(std::llround(value * static_cast<double>(den)));
  const std::int64_t g = std::gcd(num, den);
  return {num / (g == 0 ? 1 : g), den / (g == 0 ? 1 : g)};
}

std::string Rational::to_string() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

}  // namespace detpart
