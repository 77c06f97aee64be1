#include "gridforge/traceops.hpp"

#include <algorithm>

#include "gridforge/error.hpp"
#include "gridforge/leveldata.hpp"
#include "gridforge/qseries_io.hpp"

namespace gridforge {

namespace {

// Sign of the obstruction sum in the weight-(2-k) identity. With
// H = -sum_n g_n(tau) q^n, expanding the traces gives H_{k,M} PLUS the
// products f^(N)_{k,u(N)+x} g^(M)_{2-k,-(u(N)+x)}.
constexpr int kDualObstructionSign = 1;

void require_divides(std::int64_t N, std::int64_t M) {
  get_level(N);
  get_level(M);
  if (M <= 0 || N % M != 0) {
    throw DomainError("level " + std::to_string(M) + " does not divide " + std::to_string(N));
  }
}

// Basis at (N, k, space) holding indices up to m_max, at precision >= prec.
CanonicalBasis basis_through(std::int64_t N, std::int64_t k, Space space, std::int64_t m_max,
                             std::int64_t prec) {
  const std::int64_t m0 = -gap_bound(N, k, space);
  const std::int64_t count = std::max<std::int64_t>(m_max - m0 + 1, 1);
  return build_basis(N, k, space, count, std::max(prec, required_prec(N, k, space, count)));
}

struct Matched {
  QSeries expansion;
  std::vector<std::pair<std::int64_t, Coeff>> combination;
};

// The level-M combination with the same coefficients as f at exponents up to
// the gap bound of `target`.
Matched match_principal_part(const QSeries& f, const CanonicalBasis& target, std::int64_t prec) {
  Matched out{QSeries::zero(prec), {}};
  if (f.empty()) return out;
  for (const auto& t : f.terms()) {
    if (t.exp > target.B) break;
    out.combination.emplace_back(-t.exp, t.coeff);
    out.expansion.axpy(t.coeff, target.element(-t.exp));
  }
  return out;
}

std::string cell_text(std::int64_t outer, std::int64_t inner, const Coeff& lhs,
                      const Coeff& rhs) {
  return "outer " + std::to_string(outer) + ", inner " + std::to_string(inner) + ": " +
         coeff_to_string(lhs) + " vs " + coeff_to_string(rhs);
}

// Compares two families over the outer window and inner exponents < inner_prec.
GenfunCheck compare_families(const DoubleSeries& lhs, const DoubleSeries& rhs,
                             std::int64_t outer_lo, std::int64_t outer_hi,
                             std::int64_t inner_prec) {
  GenfunCheck out;
  out.holds = true;
  for (std::int64_t t = outer_lo; t < outer_hi; ++t) {
    auto get = [&](const DoubleSeries& d) {
      auto it = d.find(t);
      return it == d.end() ? QSeries::zero(inner_prec) : it->second;
    };
    const QSeries a = get(lhs);
    const QSeries b = get(rhs);
    if (a.prec() < inner_prec || b.prec() < inner_prec) {
      throw PrecisionError("generating-function family lost precision at outer index " +
                           std::to_string(t));
    }
    const std::int64_t lo = std::min(a.valuation_bound(), b.valuation_bound());
    for (std::int64_t e = lo; e < inner_prec; ++e) {
      ++out.cells;
      const Coeff x = a.coeff(e);
      const Coeff y = b.coeff(e);
      if (x != y && out.holds) {
        out.holds = false;
        out.mismatch = cell_text(t, e, x, y);
      }
    }
  }
  return out;
}

// (A(x) - A(y)) * sum_i e_i(y) x^i  versus  R_outer(x) R_inner(y), outer
// exponents of x in [i0 - 1, i0 - 1 + P), inner exponents of y below P.
GenfunCheck closed_form_side(const QSeries& A, const CanonicalBasis& family,
                             const QSeries& r_outer, const QSeries& r_inner, std::int64_t P) {
  const std::int64_t i0 = family.m0();
  const std::int64_t lo = i0 - 1;
  const std::int64_t hi = lo + P;
  DoubleSeries lhs, rhs;
  for (std::int64_t t = lo; t < hi; ++t) {
    QSeries acc = QSeries::zero(P);
    for (const auto& term : A.terms()) {
      const std::int64_t i = t - term.exp;
      if (i < i0) break;  // exponents of A ascend, so i only decreases
      acc.axpy(term.coeff, family.element(i));
    }
    if (family.has(t)) acc -= mul(A, family.element(t), P);
    lhs[t] = acc;
    rhs[t] = r_inner.scale(r_outer.coeff(t)).truncate(P);
  }
  return compare_families(lhs, rhs, lo, hi, P);
}

}  // namespace

bool mk_trivial(std::int64_t M, std::int64_t k) {
  if (M == 1) return k == 2 || k < 0;
  return k < 0;
}

bool sk_trivial(std::int64_t M, std::int64_t k) {
  if (M == 1) return k == 14 || k < 12;
  if (M == 2) return k < 8;
  if (M == 3) return k < 6;
  return k < 4;
}

nlohmann::json TraceReport::to_json() const {
  nlohmann::json comb = nlohmann::json::array();
  for (const auto& [idx, c] : combination) comb.push_back({idx, coeff_to_string(c)});
  nlohmann::json j = {{"from", N},         {"to", M},
                      {"k", k},            {"space", gridforge::to_string(space)},
                      {"m", m},            {"applicable", applicable},
                      {"reason", reason},  {"combination", comb}};
  j["expansion"] = applicable ? gridforge::to_json(expansion) : nlohmann::json(nullptr);
  return j;
}

std::optional<std::string> trace_obstacle(std::int64_t N, std::int64_t M, std::int64_t k,
                                          Space space) {
  require_divides(N, M);
  if (M == N) return std::nullopt;
  if (space == Space::Inf) {
    if (mk_trivial(M, k) || k == 0) return std::nullopt;
    return std::string("trace not determined by principal part: M_k(M)≠0");
  }
  if (sk_trivial(M, k)) return std::nullopt;
  return std::string("trace not determined by principal part: S_k(M)≠0");
}

TraceReport trace(std::int64_t N, std::int64_t M, std::int64_t k, Space space, std::int64_t m,
                  std::int64_t prec) {
  require_divides(N, M);
  TraceReport r;
  r.N = N;
  r.M = M;
  r.k = k;
  r.space = space;
  r.m = m;
  const std::int64_t m0 = -gap_bound(N, k, space);
  if (m < m0) {
    throw DomainError("index " + std::to_string(m) + " below the first basis index " +
                      std::to_string(m0));
  }
  if (auto why = trace_obstacle(N, M, k, space)) {
    r.reason = *why;
    return r;
  }
  r.applicable = true;
  const QSeries f = basis_through(N, k, space, m, prec).element(m);
  if (M == N) {
    r.reason = "identity";
    r.expansion = f.truncate(prec);
    r.combination = {{m, Coeff(1)}};
    return r;
  }
  if (space == Space::Inf && k == 0 && !mk_trivial(M, k)) {
    r.reason = "weight 0: determined up to an additive constant; canonical basis normalization";
  }
  const CanonicalBasis target = basis_through(M, k, space, m, prec);
  Matched mt = match_principal_part(f, target, prec);
  r.expansion = mt.expansion.truncate(prec);
  r.combination = std::move(mt.combination);
  return r;
}

QSeries trace_form(std::int64_t N, std::int64_t M, std::int64_t k, Space space, const QSeries& f,
                   std::int64_t prec) {
  if (auto why = trace_obstacle(N, M, k, space)) throw DomainError(*why);
  if (M == N) return f.truncate(prec);
  const std::int64_t top = f.empty() ? -gap_bound(M, k, space) : -f.valuation();
  const CanonicalBasis target = basis_through(M, k, space, top, prec);
  if (f.prec() <= target.B) {
    throw PrecisionError("form known only below q^" + std::to_string(f.prec()) +
                         ", trace needs coefficients through q^" + std::to_string(target.B));
  }
  return match_principal_part(f, target, prec).expansion.truncate(prec);
}

std::string Classification::to_string() const {
  if (preserved) return "Preserved";
  std::string s = "NotPreserved(";
  for (std::size_t i = 0; i < cases.size(); ++i) s += (i ? "," : "") + cases[i];
  return s + ")";
}

Classification classify(std::int64_t N, std::int64_t M, std::int64_t k) {
  require_divides(N, M);
  Classification c;
  const std::int64_t vN = v_of(N, k), vM = v_of(M, k);
  const std::int64_t uN = u_of(N, 2 - k), uM = u_of(M, 2 - k);
  c.preserved = M == N || (vN == vM && uN == uM);
  if (c.preserved) return c;
  if (vN < vM) c.cases.push_back("f-side");
  if (uN < uM) c.cases.push_back("g-side");
  return c;
}

bool theorem_list_preserved(std::int64_t N, std::int64_t M, std::int64_t k) {
  if (M == N || k == 0) return true;
  if (k == -2 && (N == 2 || N == 3 || N == 4)) return true;
  return k == -4 && N == 2 && M == 1;
}

std::string BasisRef::to_string() const {
  return std::string(space == Space::Inf ? "f" : "g") + "^(" + std::to_string(level) + ")_{" +
         std::to_string(weight) + "," + std::to_string(index) + "}";
}

nlohmann::json ObstructionList::to_json() const {
  auto pairs = [](const std::vector<ObstructionPair>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& p : v) a.push_back({p.f.to_string(), p.g.to_string()});
    return a;
  };
  return {{"from", N}, {"to", M}, {"k", k}, {"fside", pairs(fside)}, {"gside", pairs(gside)}};
}

ObstructionList obstructions(std::int64_t N, std::int64_t M, std::int64_t k) {
  require_divides(N, M);
  ObstructionList out{N, M, k, {}, {}};
  const std::int64_t vN = v_of(N, k), vM = v_of(M, k);
  for (std::int64_t x = 1; x <= vM - vN; ++x) {
    out.fside.push_back({{M, k, Space::Inf, -(vN + x)}, {N, 2 - k, Space::Hat, vN + x}});
  }
  const std::int64_t uN = u_of(N, 2 - k), uM = u_of(M, 2 - k);
  for (std::int64_t x = 1; x <= uM - uN; ++x) {
    out.gside.push_back({{N, k, Space::Inf, uN + x}, {M, 2 - k, Space::Hat, -(uN + x)}});
  }
  return out;
}

GenfunCheck genfun_check(std::int64_t N, std::int64_t M, std::int64_t k, std::int64_t P,
                         GridSide side) {
  if (P <= 0) return {true, 0, ""};
  const ObstructionList obs = obstructions(N, M, k);
  const std::int64_t prec = P + 2;
  DoubleSeries lhs, rhs;
  std::int64_t lo = 0;

  if (side == GridSide::Weight) {
    if (auto why = trace_obstacle(N, M, k, Space::Inf)) throw DomainError(*why);
    const std::int64_t startN = -v_of(N, k), startM = -v_of(M, k);
    lo = std::min(startN, startM);
    const std::int64_t hi = lo + P;
    const CanonicalBasis fN = basis_through(N, k, Space::Inf, hi, prec);
    const CanonicalBasis fM = basis_through(M, k, Space::Inf, hi, prec);
    std::int64_t g_max = startN;
    for (const auto& p : obs.fside) g_max = std::max(g_max, p.g.index);
    const CanonicalBasis gN = basis_through(N, 2 - k, Space::Hat, g_max, std::max(prec, hi + 1));
    for (std::int64_t t = lo; t < hi; ++t) {
      if (t >= startN) {
        lhs[t] = M == N ? fN.element(t).truncate(P)
                        : match_principal_part(fN.element(t), fM, P).expansion;
      }
      QSeries r = t >= startM ? fM.element(t).truncate(P) : QSeries::zero(P);
      for (const auto& p : obs.fside) {
        r.axpy(-gN.element(p.g.index).coeff(t), fM.element(p.f.index));
      }
      rhs[t] = r;
    }
    return compare_families(lhs, rhs, lo, hi, P);
  }

  if (auto why = trace_obstacle(N, M, 2 - k, Space::Hat)) throw DomainError(*why);
  const std::int64_t startN = -u_of(N, 2 - k), startM = -u_of(M, 2 - k);
  lo = std::min(startN, startM);
  const std::int64_t hi = lo + P;
  const CanonicalBasis gN = basis_through(N, 2 - k, Space::Hat, hi, prec);
  const CanonicalBasis gM = basis_through(M, 2 - k, Space::Hat, hi, prec);
  std::int64_t f_max = startN;
  for (const auto& p : obs.gside) f_max = std::max(f_max, p.f.index);
  const CanonicalBasis fN = basis_through(N, k, Space::Inf, f_max, std::max(prec, hi + 1));
  for (std::int64_t n = lo; n < hi; ++n) {
    if (n >= startN) {
      lhs[n] = -(M == N ? gN.element(n).truncate(P)
                        : match_principal_part(gN.element(n), gM, P).expansion);
    }
    QSeries r = n >= startM ? -gM.element(n).truncate(P) : QSeries::zero(P);
    for (const auto& p : obs.gside) {
      r.axpy(kDualObstructionSign * fN.element(p.f.index).coeff(n), gM.element(p.g.index));
    }
    rhs[n] = r;
  }
  return compare_families(lhs, rhs, lo, hi, P);
}

GenfunCheck genfun_level4_closed_form(std::int64_t k, std::int64_t P) {
  if (k % 2 != 0) throw DomainError("weight must be even, got " + std::to_string(k));
  if (P <= 0) return {true, 0, ""};
  const std::int64_t l = k / 2;
  const std::int64_t count = P + 2;
  auto basis = [&](std::int64_t w, Space s) {
    return build_basis(4, w, s, count,
                       std::max(P + 2, required_prec(4, w, s, count)));
  };
  const CanonicalBasis f = basis(k, Space::Inf);
  const CanonicalBasis g = basis(2 - k, Space::Hat);
  // multiplied by f_{k,t}, whose valuation reaches -(l + P)
  const QSeries f01 = build_basis(4, 0, Space::Inf, 2, P + std::abs(l) + count + 8).element(1);
  if (f.m0() != -l || g.m0() != l + 1) {
    throw ValidationError("level-4 bases do not start at f_{k,-l}, g_{2-k,l+1}");
  }
  const QSeries& num_f = f.element(-l);
  const QSeries& num_g = g.element(l + 1);
  GenfunCheck a = closed_form_side(f01, f, num_g, num_f, P);
  GenfunCheck b = closed_form_side(f01, g, num_f, num_g, P);
  GenfunCheck out;
  out.holds = a.holds && b.holds;
  out.cells = a.cells + b.cells;
  out.mismatch = !a.holds ? "f-expansion " + a.mismatch
                          : (!b.holds ? "g-expansion " + b.mismatch : "");
  return out;
}

std::optional<bool> empirical_preserved(std::int64_t N, std::int64_t M, std::int64_t k,
                                        std::int64_t box, std::int64_t prec) {
  if (trace_obstacle(N, M, k, Space::Inf) || trace_obstacle(N, M, 2 - k, Space::Hat)) {
    return std::nullopt;
  }
  const std::int64_t m_lo = -v_of(N, k);
  const std::int64_t n_lo = -u_of(N, 2 - k);
  const std::int64_t p = std::max(prec, std::max(m_lo, n_lo) + box + 1);
  const CanonicalBasis fN = basis_through(N, k, Space::Inf, m_lo + box - 1, p);
  const CanonicalBasis gN = basis_through(N, 2 - k, Space::Hat, n_lo + box - 1, p);
  const CanonicalBasis fM = basis_through(M, k, Space::Inf, m_lo + box - 1, p);
  const CanonicalBasis gM = basis_through(M, 2 - k, Space::Hat, n_lo + box - 1, p);
  std::vector<QSeries> tf, tg;
  for (std::int64_t i = 0; i < box; ++i) {
    tf.push_back(M == N ? fN.element(m_lo + i) : match_principal_part(fN.element(m_lo + i), fM, p).expansion);
    tg.push_back(M == N ? gN.element(n_lo + i) : match_principal_part(gN.element(n_lo + i), gM, p).expansion);
  }
  for (std::int64_t i = 0; i < box; ++i) {
    for (std::int64_t j = 0; j < box; ++j) {
      if (tf[i].coeff(n_lo + j) != -tg[j].coeff(m_lo + i)) return false;
    }
  }
  return true;
}

}  // namespace gridforge
