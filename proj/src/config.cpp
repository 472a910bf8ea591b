#include "detpart/config.h"

#include <algorithm>
#include <charconv>
#include <stdexcept>
#include <string>

namespace detpart {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw std::invalid_argument("invalid value '" + std::string(value) + "' for " + std::string(key));
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  bad_value(key, value);
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value);
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const double d = std::stod(std::string(value), &used);
    if (used != value.size()) bad_value(key, value);
    return d;
  } catch (const std::logic_error&) {
    bad_value(key, value);
  }
}

Rational parse_rational(std::string_view key, std::string_view value) {
  try {
    return Rational::parse(value);
  } catch (const std::invalid_argument&) {
    bad_value(key, value);
  }
}

}  // namespace

Config Config::from_preset(std::string_view name) {
  Config config;
  if (name == "detjet") {
    config.preset = "detjet";
  } else if (name == "detflows") {
    config.preset = "detflows";
    config.flows.enabled = true;
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
  }
  return config;
}

void Config::set(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw std::invalid_argument("override must be key=value: '" + std::string(assignment) + "'");
  }
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

void Config::set(std::string_view key, std::string_view value) {
  if (key == "coarsening.contraction_limit") {
    coarsening.contraction_limit = parse_int<std::size_t>(key, value);
  } else if (key == "coarsening.max_cluster_weight_factor") {
    coarsening.max_cluster_weight_factor = parse_double(key, value);
  } else if (key == "coarsening.prefix_doubling") {
    coarsening.prefix_doubling = parse_bool(key, value);
  } else if (key == "coarsening.swap_prevention") {
    coarsening.swap_prevention = parse_bool(key, value);
  } else if (key == "coarsening.rating_bugfix") {
    coarsening.rating_bugfix = parse_bool(key, value);
  } else if (key == "coarsening.subrounds") {
    coarsening.subrounds = parse_int<int>(key, value);
  } else if (key == "initial.portfolio_size") {
    initial.portfolio_size = parse_int<int>(key, value);
  } else if (key == "jet.temperatures") {
    std::vector<Rational> temps;
    std::size_t start = 0;
    while (start <= value.size()) {
      const auto comma = value.find(',', start);
      const auto item = value.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      temps.push_back(parse_rational(key, item));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    jet.temperatures = std::move(temps);
  } else if (key == "jet.max_nonimproving") {
    jet.max_nonimproving = parse_int<int>(key, value);
  } else if (key == "jet.deadzone_factor") {
    jet.deadzone_factor = parse_rational(key, value);
  } else if (key == "jet.lock_moves") {
    jet.lock_moves = parse_bool(key, value);
  } else if (key == "jet.max_rebalance_rounds") {
    jet.max_rebalance_rounds = parse_int<int>(key, value);
  } else if (key == "jet.inject_float_reduction") {
    jet.inject_float_reduction = parse_bool(key, value);
  } else if (key == "flows.enabled") {
    flows.enabled = parse_bool(key, value);
  } else if (key == "flows.time_budget_s") {
    flows.time_budget_s = parse_double(key, value);
  } else if (key == "flows.max_piercing_factor") {
    flows.max_piercing_factor = parse_double(key, value);
  } else if (key == "audit") {
    audit = parse_bool(key, value);
  } else {
    throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  }
  validate();
}

void Config::validate() const {
  if (coarsening.max_cluster_weight_factor <= 0.0) {
    throw std::invalid_argument("coarsening.max_cluster_weight_factor must be positive");
  }
  if (coarsening.subrounds < 1) throw std::invalid_argument("coarsening.subrounds must be >= 1");
  if (initial.portfolio_size < 1) throw std::invalid_argument("initial.portfolio_size must be >= 1");
  if (jet.temperatures.empty()) throw std::invalid_argument("jet.temperatures must be nonempty");
  for (std::size_t i = 0; i < jet.temperatures.size(); ++i) {
    const Rational& t = jet.temperatures[i];
    if (t.num > t.den) throw std::invalid_argument("jet temperatures must lie in [0, 1]");
    if (i > 0) {
      const Rational& prev = jet.temperatures[i - 1];
      if (static_cast<__int128>(t.num) * prev.den > static_cast<__int128>(prev.num) * t.den) {
        throw std::invalid_argument("jet.temperatures must be nonincreasing");
      }
    }
  }
  if (jet.max_nonimproving < 1) throw std::invalid_argument("jet.max_nonimproving must be >= 1");
  if (jet.max_rebalance_rounds < 1) throw std::invalid_argument("jet.max_rebalance_rounds must be >= 1");
  if (flows.time_budget_s < 0.0) throw std::invalid_argument("flows.time_budget_s must be >= 0");
  if (flows.max_piercing_factor <= 0.0) throw std::invalid_argument("flows.max_piercing_factor must be positive");
}

}  // namespace detpart
