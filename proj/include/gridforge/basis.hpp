#pragma once

// Row-reduced canonical bases of M_k^(inf)(N) (space Inf) and of the subspace
// vanishing at the cusps other than infinity (space Hat), and dual grids.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridforge/qseries.hpp"

namespace gridforge {

enum class Space { Inf, Hat };

std::string to_string(Space s);
Space parse_space(const std::string& text);  // "inf" | "hat"

/// Elements f_m = q^-m + sum_{n > B} c_n q^n for m = m0, m0 + 1, ...
/// with m0 = -B and B = v_k(N) (Inf) or u_k(N) (Hat).
struct CanonicalBasis {
  std::int64_t N = 0;
  std::int64_t k = 0;
  Space space = Space::Inf;
  std::int64_t B = 0;
  std::int64_t prec = 0;
  std::vector<QSeries> elements;

  std::int64_t m0() const { return -B; }
  std::int64_t m_end() const { return m0() + static_cast<std::int64_t>(elements.size()); }
  bool has(std::int64_t m) const { return m >= m0() && m < m_end(); }
  /// Throws DomainError when m is outside the built range.
  const QSeries& element(std::int64_t m) const;

  nlohmann::json to_json() const;
};

/// Gap bound B for (N, k, space).
std::int64_t gap_bound(std::int64_t N, std::int64_t k, Space space);

/// Smallest precision build_basis accepts for `count` elements.
std::int64_t required_prec(std::int64_t N, std::int64_t k, Space space, std::int64_t count);

/// F_P^l * F_k' (Inf), times the cusp killer for Hat; absolute precision prec.
QSeries first_element(std::int64_t N, std::int64_t k, Space space, std::int64_t prec);

/// psi times the last element, row reduced against every earlier element.
/// Precision of the result is limited by the inputs.
QSeries next_element(const CanonicalBasis& so_far, const QSeries& psi);

/// Throws PrecisionError("insufficient precision: ... need prec >= R") when
/// prec < required_prec. Results are cached per (N, k, space).
CanonicalBasis build_basis(std::int64_t N, std::int64_t k, Space space, std::int64_t count,
                           std::int64_t prec);

struct ModularGrid {
  std::int64_t N = 0;
  std::int64_t k = 0;
  CanonicalBasis fside;  // weight k, Inf
  CanonicalBasis gside;  // weight 2 - k, Hat
};

ModularGrid build_grid(std::int64_t N, std::int64_t k, std::int64_t count, std::int64_t prec);

struct DualityCell {
  std::int64_t m = 0;
  std::int64_t n = 0;
  Coeff a;  // a_k(m, n)
  Coeff b;  // b_{2-k}(n, m)
};

struct DualityResult {
  Coeff residual;                    // max |a + b| over the box
  std::optional<DualityCell> witness;  // a cell attaining it, when nonzero
  std::int64_t cells = 0;
};

/// Box: the first m_count f-indices against the first n_count g-indices.
/// Throws DomainError when the box exceeds what the grid holds.
DualityResult duality_residual(const ModularGrid& grid, std::int64_t m_count,
                               std::int64_t n_count);

}  // namespace gridforge
