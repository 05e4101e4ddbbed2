#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "theta_forge/big_real.hpp"

namespace test_support {

inline const nlohmann::json& oracles() {
  static const nlohmann::json data = [] {
    std::ifstream in(THETA_FORGE_ORACLE_FILE);
    return nlohmann::json::parse(in);
  }();
  return data;
}

inline theta_forge::BigReal oracle(const std::string& text, mpfr_prec_t bits) {
  return theta_forge::BigReal::from_string(text, bits);
}

/// Relative difference |a - b| / max(|a|, |b|), as a double for assertions.
inline double rel_diff(const theta_forge::BigReal& a, const theta_forge::BigReal& b) {
  return theta_forge::relative_difference(a, b).to_double();
}

/// 10^-e as a double; comparisons below 1e-300 are not needed here.
inline double tiny(int e) { return theta_forge::ten_to_minus(e, 64).to_double(); }

}  // namespace test_support
