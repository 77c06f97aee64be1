#pragma once

// Truncated Laurent series in q with exact rational coefficients.
//
// A QSeries stores the nonzero coefficients below its precision P, sorted by
// exponent; every coefficient at an exponent >= P is unknown (O(q^P)).
// Polynomials that are known exactly carry the sentinel precision kExact.

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace gridforge {

using Coeff = mpq_class;

struct Term {
  std::int64_t exp;
  Coeff coeff;
};

class QSeries {
 public:
  /// Precision of a series that is known exactly (a Laurent polynomial).
  static constexpr std::int64_t kExact = std::int64_t{1} << 40;

  /// The exact zero series.
  QSeries() = default;

  /// Zero to precision `prec`, i.e. O(q^prec).
  static QSeries zero(std::int64_t prec);

  /// c * q^e + O(q^prec). A zero coefficient yields an empty series.
  static QSeries monomial(const Coeff& c, std::int64_t e,
                          std::int64_t prec = kExact);

  /// The constant 1 (exact unless prec is given).
  static QSeries one(std::int64_t prec = kExact) { return monomial(1, 0, prec); }

  /// Builds a series from (exponent, coefficient) pairs in any order.
  /// Duplicate exponents are summed; terms at or above `prec` are dropped.
  static QSeries from_terms(std::vector<Term> terms,
                            std::int64_t prec = kExact);
  static QSeries from_ints(
      std::initializer_list<std::pair<std::int64_t, long>> terms,
      std::int64_t prec = kExact);

  std::int64_t prec() const { return prec_; }
  bool is_exact() const { return prec_ >= kExact; }

  /// True when no nonzero coefficient is known (the series is O(q^prec)).
  bool empty() const { return terms_.empty(); }

  /// Minimal stored exponent. Throws DomainError on an empty series.
  std::int64_t valuation() const;

  /// Valuation, or prec() when empty (a lower bound for the true valuation).
  std::int64_t valuation_bound() const {
    return terms_.empty() ? prec_ : terms_.front().exp;
  }

  /// Coefficient of q^n. Throws PrecisionError when n >= prec().
  Coeff coeff(std::int64_t n) const;

  /// Leading coefficient. Throws DomainError on an empty series.
  const Coeff& leading() const;

  std::span<const Term> terms() const { return terms_; }

  /// Restriction to exponents < p (precision becomes min(prec, p)).
  QSeries truncate(std::int64_t p) const;

  QSeries scale(const Coeff& c) const;

  /// Multiplies by q^s.
  QSeries shift(std::int64_t s) const;

  /// Substitutes q -> q^d for d >= 1.
  QSeries stretch(std::int64_t d) const;

  /// Terms with exponent <= max_exp.
  QSeries head(std::int64_t max_exp) const { return truncate(max_exp + 1); }

  /// this += c * other, restricted to the common precision.
  QSeries& axpy(const Coeff& c, const QSeries& other);

  QSeries& operator+=(const QSeries& other);
  QSeries& operator-=(const QSeries& other);
  QSeries operator-() const { return scale(-1); }

  /// Exact structural equality (same precision and same coefficients).
  friend bool operator==(const QSeries& a, const QSeries& b);

 private:
  std::vector<Term> terms_;
  std::int64_t prec_ = kExact;
};

QSeries operator+(QSeries a, const QSeries& b);
QSeries operator-(QSeries a, const QSeries& b);

/// Cauchy product. Result precision is min(a.prec + val(b), b.prec + val(a)),
/// further capped at `cap`.
QSeries mul(const QSeries& a, const QSeries& b,
            std::int64_t cap = QSeries::kExact);
inline QSeries operator*(const QSeries& a, const QSeries& b) {
  return mul(a, b);
}

/// Multiplicative inverse to precision min(prec, a.prec - 2*val(a)).
/// Throws DomainError("cannot invert zero series") when a is empty.
QSeries invert(const QSeries& a, std::int64_t prec);

/// n-th power by binary exponentiation; n < 0 inverts first. The result is
/// capped at `cap`, which must be finite when n < 0 and `a` is exact.
QSeries pow(const QSeries& a, std::int64_t n,
            std::int64_t cap = QSeries::kExact);

/// D = q d/dq: the coefficient at q^n becomes n * c_n.
QSeries derive(const QSeries& a);

struct PrecComparison {
  bool equal;
  std::int64_t prec;  // the precision the comparison was performed at
};

/// Compares all coefficients below min(a.prec, b.prec).
PrecComparison eq_to_prec(const QSeries& a, const QSeries& b);

/// Checked exponent arithmetic; throws std::overflow_error.
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

/// Precision arithmetic that saturates at QSeries::kExact.
std::int64_t prec_add(std::int64_t p, std::int64_t delta);

}  // namespace gridforge
