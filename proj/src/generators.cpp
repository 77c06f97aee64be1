#include "gridforge/generators.hpp"

#include <cctype>
#include <numeric>

#include "gridforge/error.hpp"
#include "gridforge/series_cache.hpp"

namespace gridforge {

namespace {

using detail::round_up_prec;

std::int64_t eisenstein_constant(int w) {
  switch (w) {
    case 2: return -24;
    case 4: return 240;
    case 6: return -504;
    case 8: return 480;
    case 10: return -264;
    case 14: return -24;
    default:
      throw DomainError("unsupported Eisenstein weight " + std::to_string(w));
  }
}

QSeries compute_euler_power(std::int64_t r, std::int64_t prec) {
  if (prec <= 0) return QSeries::zero(prec);
  const auto n_terms = static_cast<std::size_t>(prec);

  // Pentagonal numbers j(3j-1)/2 carry sign (-1)^j.
  std::vector<std::pair<std::int64_t, int>> pent;
  for (std::int64_t j = 1;; ++j) {
    const std::int64_t a = j * (3 * j - 1) / 2;
    const std::int64_t b = j * (3 * j + 1) / 2;
    if (a >= prec) break;
    const int sign = (j % 2 == 0) ? 1 : -1;
    pent.emplace_back(a, sign);
    if (b < prec) pent.emplace_back(b, sign);
  }

  // g = f^r with f_0 = 1:  n g_n = sum_{k=1}^n ((r+1)k - n) f_k g_{n-k}.
  std::vector<mpz_class> g(n_terms);
  g[0] = 1;
  mpz_class acc;
  mpz_class factor;
  for (std::size_t n = 1; n < n_terms; ++n) {
    acc = 0;
    const auto nn = static_cast<std::int64_t>(n);
    for (const auto& [k, sign] : pent) {
      if (k > nn) break;
      const std::int64_t f = ((r + 1) * k - nn) * sign;
      if (f == 0) continue;
      factor = static_cast<long>(f);
      mpz_addmul(acc.get_mpz_t(), factor.get_mpz_t(),
                 g[n - static_cast<std::size_t>(k)].get_mpz_t());
    }
    mpz_divexact_ui(g[n].get_mpz_t(), acc.get_mpz_t(), n);
  }

  std::vector<Term> terms;
  terms.reserve(n_terms);
  for (std::size_t n = 0; n < n_terms; ++n) {
    if (g[n] != 0) terms.push_back({static_cast<std::int64_t>(n), Coeff(g[n])});
  }
  return QSeries::from_terms(std::move(terms), prec);
}

QSeries compute_eisenstein(int w, std::int64_t prec) {
  const mpz_class c = static_cast<long>(eisenstein_constant(w));
  std::vector<Term> terms;
  terms.push_back({0, Coeff(1)});
  for (std::int64_t n = 1; n < prec; ++n) {
    terms.push_back({n, Coeff(c * sigma(static_cast<unsigned>(w - 1), n))});
  }
  return QSeries::from_terms(std::move(terms), prec);
}

detail::SeriesCache<std::int64_t>& euler_cache() {
  static detail::SeriesCache<std::int64_t> cache;
  return cache;
}

detail::SeriesCache<int>& eisenstein_cache() {
  static detail::SeriesCache<int> cache;
  return cache;
}

}  // namespace

std::int64_t EtaQuotient::weight() const {
  std::int64_t s = 0;
  for (const auto& [d, r] : exps) s += r;
  if (s % 2 != 0) {
    throw DomainError("eta quotient of half-integral weight: " + to_string());
  }
  return s / 2;
}

std::int64_t EtaQuotient::order_times_24() const {
  std::int64_t s = 0;
  for (const auto& [d, r] : exps) s = checked_add(s, checked_mul(d, r));
  return s;
}

std::int64_t EtaQuotient::order_at_infinity() const {
  const std::int64_t s = order_times_24();
  if (s % 24 != 0) {
    throw DomainError("fractional leading exponent " + std::to_string(s) +
                      "/24 for " + to_string());
  }
  return s / 24;
}

std::string EtaQuotient::to_string() const {
  std::string out;
  for (const auto& [d, r] : exps) {
    if (!out.empty()) out += " * ";
    out += "eta(" + std::to_string(d) + ")^" + std::to_string(r);
  }
  return out.empty() ? "1" : out;
}

EtaQuotient EtaQuotient::parse(std::string_view text) {
  EtaQuotient e;
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto fail = [&](const std::string& what) {
    throw DomainError("cannot parse eta quotient \"" + std::string(text) +
                      "\": " + what);
  };
  auto integer = [&]() -> std::int64_t {
    std::size_t start = pos;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    const std::string s(text.substr(start, pos - start));
    if (s.empty() || s == "-" || s == "+") fail("expected integer");
    return std::stoll(s);
  };
  skip_ws();
  if (text.substr(pos) == "1") return e;
  while (true) {
    skip_ws();
    if (text.substr(pos, 4) != "eta(") fail("expected 'eta('");
    pos += 4;
    const std::int64_t d = integer();
    if (d < 1) fail("eta argument must be a positive integer");
    if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
    ++pos;
    std::int64_t r = 1;
    if (pos < text.size() && text[pos] == '^') {
      ++pos;
      r = integer();
    }
    e.exps[d] += r;
    if (e.exps[d] == 0) e.exps.erase(d);
    skip_ws();
    if (pos == text.size()) break;
    if (text[pos] != '*') fail("expected '*'");
    ++pos;
  }
  return e;
}

Coeff sigma(unsigned r, std::int64_t n) {
  if (n < 1) throw DomainError("sigma requires n >= 1");
  mpz_class total = 0;
  mpz_class term;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    mpz_ui_pow_ui(term.get_mpz_t(), static_cast<unsigned long>(d), r);
    total += term;
    const std::int64_t e = n / d;
    if (e != d) {
      mpz_ui_pow_ui(term.get_mpz_t(), static_cast<unsigned long>(e), r);
      total += term;
    }
  }
  return Coeff(total);
}

QSeries eisenstein(const EisensteinSpec& spec, std::int64_t prec) {
  eisenstein_constant(spec.weight);  // validates the weight
  if (spec.scale < 1) throw DomainError("Eisenstein scaling must be >= 1");
  const std::int64_t base_prec = (prec + spec.scale - 1) / spec.scale;
  QSeries base = eisenstein_cache().get(
      spec.weight, std::max<std::int64_t>(base_prec, 1), [&](std::int64_t p) {
        return compute_eisenstein(spec.weight, round_up_prec(p));
      });
  return base.stretch(spec.scale).truncate(prec);
}

QSeries phi(std::int64_t N, std::int64_t prec) {
  if (N < 2) throw DomainError("phi requires N >= 2");
  QSeries e_big = eisenstein({2, N}, prec).scale(N);
  e_big -= eisenstein({2, 1}, prec);
  return e_big.scale(Coeff(1, N - 1));
}

QSeries euler_power(std::int64_t r, std::int64_t prec) {
  if (prec <= 0) return QSeries::zero(prec);
  if (r == 0) return QSeries::one(prec);
  return euler_cache().get(r, prec, [&](std::int64_t p) {
    return compute_euler_power(r, round_up_prec(p));
  });
}

QSeries eta_quotient_expand(const EtaQuotient& e, std::int64_t prec) {
  const std::int64_t lead = e.order_at_infinity();
  const std::int64_t rel = prec - lead;
  if (rel <= 0) return QSeries::zero(prec);
  QSeries product = QSeries::one(rel);
  for (const auto& [d, r] : e.exps) {
    const std::int64_t pd = (rel + d - 1) / d;
    product = mul(product, euler_power(r, pd).stretch(d), rel);
  }
  return product.shift(lead).truncate(prec);
}

QSeries level_one_form(int kp, std::int64_t prec) {
  switch (kp) {
    case 0: return QSeries::one(prec);
    case 4: return eisenstein({4, 1}, prec);
    case 6: return eisenstein({6, 1}, prec);
    case 8: {
      const QSeries e4 = eisenstein({4, 1}, prec);
      return mul(e4, e4, prec);
    }
    case 10: return mul(eisenstein({4, 1}, prec), eisenstein({6, 1}, prec), prec);
    case 14: {
      const QSeries e4 = eisenstein({4, 1}, prec);
      return mul(mul(e4, e4, prec), eisenstein({6, 1}, prec), prec);
    }
    default:
      throw DomainError("level-one weight k' must be one of 0,4,6,8,10,14; got " +
                        std::to_string(kp));
  }
}

QSeries delta(std::int64_t prec) {
  const QSeries e4 = eisenstein({4, 1}, prec);
  const QSeries e6 = eisenstein({6, 1}, prec);
  QSeries d = pow(e4, 3, prec);
  d -= mul(e6, e6, prec);
  return d.scale(Coeff(1, 1728));
}

QSeries j_function(std::int64_t prec) {
  const QSeries inv_delta = invert(delta(prec + 2), prec);
  return mul(pow(eisenstein({4, 1}, prec + 1), 3, prec + 1), inv_delta, prec);
}

QSeries serre_derivative(const QSeries& f, std::int64_t k, std::int64_t prec) {
  const std::int64_t p = std::min(prec, f.prec());
  QSeries out = derive(f).truncate(p);
  if (k == 0 || f.empty()) return out;
  const std::int64_t e2_prec =
      p >= QSeries::kExact ? p : p - f.valuation();
  if (e2_prec >= QSeries::kExact) {
    throw DomainError("Serre derivative of an exact series needs a precision");
  }
  const QSeries e2f = mul(eisenstein({2, 1}, e2_prec), f, p);
  out.axpy(Coeff(-k, 12), e2f);
  return out;
}

}  // namespace gridforge
