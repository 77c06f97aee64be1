#pragma once

// q-expansions of the classical building blocks: eta quotients, Eisenstein
// series, the level-one forms and the Serre derivative.
//
// Every generator takes the absolute precision of the result: the returned
// series is exactly O(q^prec).

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "gridforge/qseries.hpp"

namespace gridforge {

/// prod_d eta(d z)^{r_d}.
struct EtaQuotient {
  std::map<std::int64_t, std::int64_t> exps;  // d -> r_d, r_d != 0

  /// (1/2) sum r_d. Throws DomainError when the sum is odd.
  std::int64_t weight() const;

  /// 24 times the order at infinity: sum d * r_d.
  std::int64_t order_times_24() const;

  /// Order at infinity (sum d * r_d) / 24; DomainError if fractional.
  std::int64_t order_at_infinity() const;

  /// "eta(1)^-4 * eta(2)^8"; factors ascending in d.
  std::string to_string() const;
  static EtaQuotient parse(std::string_view text);

  friend bool operator==(const EtaQuotient&, const EtaQuotient&) = default;
};

/// sum_{d | n} d^r.
Coeff sigma(unsigned r, std::int64_t n);

struct EisensteinSpec {
  int weight = 4;          // one of 2, 4, 6, 8, 10, 14
  std::int64_t scale = 1;  // argument d z
};

/// 1 - (2w/B_w) sum sigma_{w-1}(n) q^{dn}.
QSeries eisenstein(const EisensteinSpec& spec, std::int64_t prec);

/// (N E_2(Nz) - E_2(z)) / (N - 1): holomorphic weight 2 on Gamma_0(N).
QSeries phi(std::int64_t N, std::int64_t prec);

/// prod_{n >= 1} (1 - q^n)^r, via the pentagonal-number recurrence.
QSeries euler_power(std::int64_t r, std::int64_t prec);

QSeries eta_quotient_expand(const EtaQuotient& e, std::int64_t prec);

/// E_{k'} for k' in {0, 4, 6, 8, 10, 14}; E_8, E_10, E_14 as products of
/// E_4 and E_6.
QSeries level_one_form(int kp, std::int64_t prec);
QSeries delta(std::int64_t prec);
QSeries j_function(std::int64_t prec);

/// D f - (k/12) E_2 f. Keeps the precision of f unless `prec` is smaller.
QSeries serre_derivative(const QSeries& f, std::int64_t k,
                         std::int64_t prec = QSeries::kExact);

}  // namespace gridforge
