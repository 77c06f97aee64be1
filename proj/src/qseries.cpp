#include "gridforge/qseries.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "gridforge/error.hpp"

namespace gridforge {

namespace {

// Coeff(num, den) built from integers is not reduced; arithmetic assumes it is.
Coeff canonical(Coeff c) {
  c.canonicalize();
  return c;
}

// Exponents are kept well inside int64 so that precision sums never wrap.
constexpr std::int64_t kMaxExponent = std::int64_t{1} << 36;

void check_exponent(std::int64_t e) {
  if (e > kMaxExponent || e < -kMaxExponent) {
    throw std::overflow_error("q-exponent out of range: " + std::to_string(e));
  }
}

// Common denominator of all coefficients, and the integer numerators scaled
// to it. Products of integer vectors avoid a gcd per accumulation.
struct IntegerView {
  mpz_class denom{1};
  std::vector<mpz_class> nums;
};

IntegerView to_integers(std::span<const Term> terms) {
  IntegerView view;
  for (const auto& t : terms) {
    if (t.coeff.get_den() != 1) {
      mpz_lcm(view.denom.get_mpz_t(), view.denom.get_mpz_t(),
              t.coeff.get_den_mpz_t());
    }
  }
  view.nums.reserve(terms.size());
  for (const auto& t : terms) {
    if (view.denom == 1) {
      view.nums.emplace_back(t.coeff.get_num());
    } else {
      mpz_class n = view.denom / t.coeff.get_den();
      n *= t.coeff.get_num();
      view.nums.push_back(std::move(n));
    }
  }
  return view;
}

}  // namespace

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) {
    throw std::overflow_error("exponent overflow");
  }
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw std::overflow_error("exponent overflow");
  }
  return r;
}

std::int64_t prec_add(std::int64_t p, std::int64_t delta) {
  if (p >= QSeries::kExact || delta >= QSeries::kExact) {
    return QSeries::kExact;
  }
  const std::int64_t r = checked_add(p, delta);
  return std::min(r, QSeries::kExact);
}

QSeries QSeries::zero(std::int64_t prec) {
  QSeries s;
  s.prec_ = std::min(prec, kExact);
  return s;
}

QSeries QSeries::monomial(const Coeff& c_in, std::int64_t e, std::int64_t prec) {
  check_exponent(e);
  const Coeff c = canonical(c_in);
  QSeries s = zero(prec);
  if (c != 0 && e < s.prec_) {
    s.terms_.push_back({e, c});
  }
  return s;
}

QSeries QSeries::from_terms(std::vector<Term> terms, std::int64_t prec) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.exp < b.exp; });
  QSeries s = zero(prec);
  for (auto& t : terms) {
    check_exponent(t.exp);
    if (t.exp >= s.prec_) break;
    t.coeff.canonicalize();
    if (!s.terms_.empty() && s.terms_.back().exp == t.exp) {
      s.terms_.back().coeff += t.coeff;
      if (s.terms_.back().coeff == 0) s.terms_.pop_back();
    } else if (t.coeff != 0) {
      s.terms_.push_back(std::move(t));
    }
  }
  return s;
}

QSeries QSeries::from_ints(
    std::initializer_list<std::pair<std::int64_t, long>> terms,
    std::int64_t prec) {
  std::vector<Term> v;
  v.reserve(terms.size());
  for (const auto& [e, c] : terms) v.push_back({e, Coeff(c)});
  return from_terms(std::move(v), prec);
}

std::int64_t QSeries::valuation() const {
  if (terms_.empty()) {
    throw DomainError("valuation of an empty series");
  }
  return terms_.front().exp;
}

const Coeff& QSeries::leading() const {
  if (terms_.empty()) {
    throw DomainError("leading coefficient of an empty series");
  }
  return terms_.front().coeff;
}

Coeff QSeries::coeff(std::int64_t n) const {
  if (n >= prec_) {
    throw PrecisionError("coefficient not determined at this precision: q^" +
                         std::to_string(n) + " with O(q^" +
                         std::to_string(prec_) + ")");
  }
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), n,
      [](const Term& t, std::int64_t e) { return t.exp < e; });
  if (it != terms_.end() && it->exp == n) return it->coeff;
  return Coeff(0);
}

QSeries QSeries::truncate(std::int64_t p) const {
  QSeries s = zero(std::min(p, prec_));
  for (const auto& t : terms_) {
    if (t.exp >= s.prec_) break;
    s.terms_.push_back(t);
  }
  return s;
}

QSeries QSeries::scale(const Coeff& c_in) const {
  const Coeff c = canonical(c_in);
  QSeries s = zero(prec_);
  if (c == 0) return s;
  s.terms_.reserve(terms_.size());
  for (const auto& t : terms_) s.terms_.push_back({t.exp, t.coeff * c});
  return s;
}

QSeries QSeries::shift(std::int64_t k) const {
  QSeries s = zero(prec_add(prec_, k));
  s.terms_.reserve(terms_.size());
  for (const auto& t : terms_) {
    const std::int64_t e = checked_add(t.exp, k);
    check_exponent(e);
    s.terms_.push_back({e, t.coeff});
  }
  return s;
}

QSeries QSeries::stretch(std::int64_t d) const {
  if (d < 1) throw DomainError("stretch factor must be positive");
  QSeries s = zero(is_exact() ? kExact : checked_mul(prec_, d));
  s.terms_.reserve(terms_.size());
  for (const auto& t : terms_) {
    const std::int64_t e = checked_mul(t.exp, d);
    check_exponent(e);
    s.terms_.push_back({e, t.coeff});
  }
  return s;
}

QSeries& QSeries::axpy(const Coeff& c_in, const QSeries& other) {
  const Coeff c = canonical(c_in);
  const std::int64_t p = std::min(prec_, other.prec_);
  std::vector<Term> out;
  out.reserve(terms_.size() + other.terms_.size());
  auto a = terms_.begin();
  auto b = other.terms_.begin();
  const auto a_end = terms_.end();
  const auto b_end = other.terms_.end();
  while (a != a_end || b != b_end) {
    const std::int64_t ea = a != a_end ? a->exp : kExact;
    const std::int64_t eb = b != b_end ? b->exp : kExact;
    const std::int64_t e = std::min(ea, eb);
    if (e >= p) break;
    if (ea < eb) {
      out.push_back(std::move(*a++));
    } else if (eb < ea) {
      if (c != 0) out.push_back({eb, c * b->coeff});
      ++b;
    } else {
      Coeff v = std::move(a->coeff);
      if (c != 0) v += c * b->coeff;
      if (v != 0) out.push_back({e, std::move(v)});
      ++a;
      ++b;
    }
  }
  terms_ = std::move(out);
  prec_ = p;
  return *this;
}

QSeries& QSeries::operator+=(const QSeries& other) { return axpy(1, other); }
QSeries& QSeries::operator-=(const QSeries& other) { return axpy(-1, other); }

bool operator==(const QSeries& a, const QSeries& b) {
  if (a.prec_ != b.prec_ || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (a.terms_[i].exp != b.terms_[i].exp ||
        a.terms_[i].coeff != b.terms_[i].coeff) {
      return false;
    }
  }
  return true;
}

QSeries operator+(QSeries a, const QSeries& b) { return a += b; }
QSeries operator-(QSeries a, const QSeries& b) { return a -= b; }

QSeries mul(const QSeries& a, const QSeries& b, std::int64_t cap) {
  const std::int64_t p = std::min(
      {prec_add(a.prec(), b.valuation_bound()),
       prec_add(b.prec(), a.valuation_bound()), std::min(cap, QSeries::kExact)});
  if (a.empty() || b.empty()) return QSeries::zero(p);

  const std::int64_t lo = checked_add(a.valuation(), b.valuation());
  if (lo >= p) return QSeries::zero(p);

  const auto ta = a.terms();
  const auto tb = b.terms();
  const IntegerView ia = to_integers(ta);
  const IntegerView ib = to_integers(tb);

  // Dense accumulator over [lo, hi).
  const std::int64_t hi =
      std::min(p, checked_add(checked_add(ta.back().exp, tb.back().exp), 1));
  std::vector<mpz_class> acc(static_cast<std::size_t>(hi - lo));
  for (std::size_t i = 0; i < ta.size(); ++i) {
    const std::int64_t limit = hi - ta[i].exp;
    mpz_srcptr x = ia.nums[i].get_mpz_t();
    for (std::size_t j = 0; j < tb.size() && tb[j].exp < limit; ++j) {
      mpz_addmul(acc[static_cast<std::size_t>(ta[i].exp + tb[j].exp - lo)]
                     .get_mpz_t(),
                 x, ib.nums[j].get_mpz_t());
    }
  }

  const mpz_class denom = ia.denom * ib.denom;
  std::vector<Term> out;
  out.reserve(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k) {
    if (acc[k] == 0) continue;
    Coeff c(acc[k], denom);
    c.canonicalize();
    out.push_back({lo + static_cast<std::int64_t>(k), std::move(c)});
  }
  return QSeries::from_terms(std::move(out), p);
}

QSeries invert(const QSeries& a, std::int64_t prec) {
  if (a.empty()) throw DomainError("cannot invert zero series");
  const std::int64_t w = a.valuation();
  const std::int64_t p =
      std::min(prec, prec_add(a.prec(), checked_mul(-2, w)));
  const std::int64_t n_terms = p + w;  // exponents -w .. p-1
  if (n_terms <= 0) return QSeries::zero(p);

  // Unit part u = a / (c0 q^w) with u_0 = 1.
  const Coeff inv_c0 = 1 / a.leading();
  std::vector<Coeff> u;  // dense, u[i] for i < n_terms
  u.assign(static_cast<std::size_t>(n_terms), Coeff(0));
  bool integral = true;
  for (const auto& t : a.terms()) {
    const std::int64_t i = t.exp - w;
    if (i >= n_terms) break;
    u[static_cast<std::size_t>(i)] = t.coeff * inv_c0;
    if (u[static_cast<std::size_t>(i)].get_den() != 1) integral = false;
  }
  std::vector<std::size_t> support;
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (u[i] != 0) support.push_back(i);
  }

  std::vector<Term> out;
  out.reserve(static_cast<std::size_t>(n_terms));
  if (integral) {
    std::vector<mpz_class> un(u.size());
    for (std::size_t i : support) un[i] = u[i].get_num();
    std::vector<mpz_class> d(u.size());
    d[0] = 1;
    for (std::size_t n = 1; n < d.size(); ++n) {
      mpz_class s = 0;
      for (std::size_t i : support) {
        if (i > n) break;
        mpz_addmul(s.get_mpz_t(), un[i].get_mpz_t(), d[n - i].get_mpz_t());
      }
      d[n] = -s;
    }
    for (std::size_t n = 0; n < d.size(); ++n) {
      if (d[n] != 0) {
        out.push_back({static_cast<std::int64_t>(n) - w, Coeff(d[n]) * inv_c0});
      }
    }
  } else {
    std::vector<Coeff> d(u.size());
    d[0] = 1;
    for (std::size_t n = 1; n < d.size(); ++n) {
      Coeff s = 0;
      for (std::size_t i : support) {
        if (i > n) break;
        s += u[i] * d[n - i];
      }
      d[n] = -s;
    }
    for (std::size_t n = 0; n < d.size(); ++n) {
      if (d[n] != 0) {
        out.push_back({static_cast<std::int64_t>(n) - w, d[n] * inv_c0});
      }
    }
  }
  return QSeries::from_terms(std::move(out), p);
}

QSeries pow(const QSeries& a, std::int64_t n, std::int64_t cap) {
  if (n == 0) return QSeries::one(cap);
  if (n < 0) {
    if (a.empty()) throw DomainError("negative power of zero series");
    if (a.is_exact() && cap >= QSeries::kExact) {
      throw DomainError("negative power of an exact series needs a precision");
    }
    const std::int64_t m = -n;
    const std::int64_t w = a.valuation();
    // b = 1/a has valuation -w; b^m loses (m-1)*w of absolute precision.
    const std::int64_t inv_prec =
        cap >= QSeries::kExact ? QSeries::kExact
                               : prec_add(cap, checked_mul(m - 1, w));
    return pow(invert(a, inv_prec), m, cap);
  }
  // Partial results have valuation >= min(0, n*w), which bounds how much
  // precision the squared base needs.
  const std::int64_t w = a.valuation_bound();
  const std::int64_t base_cap =
      w >= 0 ? cap : prec_add(cap, checked_mul(-n, w));
  QSeries result = QSeries::one();
  QSeries base = a;
  std::int64_t e = n;
  while (true) {
    if (e & 1) result = mul(result, base, base_cap);
    e >>= 1;
    if (e == 0) break;
    base = mul(base, base, base_cap);
  }
  return result.truncate(cap);
}

QSeries derive(const QSeries& a) {
  std::vector<Term> out;
  out.reserve(a.terms().size());
  for (const auto& t : a.terms()) {
    if (t.exp != 0) out.push_back({t.exp, t.coeff * t.exp});
  }
  return QSeries::from_terms(std::move(out), a.prec());
}

PrecComparison eq_to_prec(const QSeries& a, const QSeries& b) {
  const std::int64_t p = std::min(a.prec(), b.prec());
  return {a.truncate(p) == b.truncate(p), p};
}

}  // namespace gridforge
