#pragma once

#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "gridforge/qseries.hpp"

namespace gridforge {

/// Human-readable form, e.g. "q^-2 + 8*q^-1 - 224 + 2144*q + O(q^2)".
/// Exact series omit the O-term; the exact zero prints as "0".
std::string to_text(const QSeries& s);

/// Inverse of to_text. Accepts rational coefficients ("3/2*q^4") and an
/// optional trailing "O(q^P)". Throws DomainError on malformed input.
QSeries parse_text(std::string_view text);

/// {"prec": P, "coeffs": [[e, "num/den"], ...]} with exponents ascending.
/// Exact series serialize "prec" as null.
nlohmann::json to_json(const QSeries& s);
QSeries from_json(const nlohmann::json& j);

inline std::ostream& operator<<(std::ostream& os, const QSeries& s) {
  return os << to_text(s);
}

std::string coeff_to_string(const Coeff& c);
Coeff coeff_from_string(const std::string& s);

}  // namespace gridforge
