#include <algorithm>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "gridforge/error.hpp"
#include "gridforge/generators.hpp"
#include "gridforge/leveldata.hpp"
#include "gridforge/qseries_io.hpp"
#include "gridforge/seedsynth.hpp"

using namespace gridforge;

namespace {

using cplx = std::complex<long double>;
constexpr long double kPi = 3.141592653589793238462643383279502884L;

cplx eval(const QSeries& f, cplx tau) {
  const cplx q = std::exp(cplx(0, 2 * kPi) * tau);
  cplx s = 0;
  for (const auto& t : f.terms()) s += static_cast<long double>(t.coeff.get_d()) * std::pow(q, t.exp);
  return s;
}

bool has_label(const SpanningFamily& f, const std::string& label) {
  return std::any_of(f.members.begin(), f.members.end(),
                     [&](const FamilyMember& m) { return m.label == label; });
}

}  // namespace

TEST(ValenceBound, Examples) {
  EXPECT_EQ(valence_bound(1, 12), 1);
  EXPECT_EQ(valence_bound(13, 4), 4);
  EXPECT_EQ(valence_bound(13, 6), 7);
  EXPECT_EQ(valence_bound(25, 2), 5);
  EXPECT_EQ(valence_bound(10, 4), 6);
  EXPECT_EQ(valence_bound(4, 2), 1);
}

TEST(BuildFamily, Members) {
  const auto f7 = build_family(7, 4, 0);
  EXPECT_TRUE(has_label(f7, "E4(z)"));
  EXPECT_TRUE(has_label(f7, "E4(7z)"));
  EXPECT_TRUE(has_label(f7, "phi(7)*phi(7)"));
  for (const auto& m : f7.members) EXPECT_EQ(m.pole_order, 0);

  const auto f10 = build_family(10, 2, 0);
  EXPECT_TRUE(has_label(f10, "phi(2)"));
  EXPECT_TRUE(has_label(f10, "phi(5)"));
  EXPECT_TRUE(has_label(f10, "phi(10)"));

  const auto f13 = build_family(13, 4, 2);
  ASSERT_TRUE(has_label(f13, "theta_2(phi(13)*psi)"));
  for (const auto& m : f13.members) {
    const QSeries s = m.build(12);
    EXPECT_EQ(s.prec(), 12) << m.label;
    if (!s.empty()) EXPECT_GE(s.valuation(), -m.pole_order) << m.label;
  }
}

TEST(BuildFamily, Errors) {
  EXPECT_THROW(build_family(7, 3, 0), DomainError);
  EXPECT_THROW(build_family(11, 4, 0), DomainError);
  try {
    build_family(7, -2, 0);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("empty generator pool"), std::string::npos);
  }
}

TEST(Synthesis, MatchesPrintedPrefixes) {
  int checked = 0;
  for (std::int64_t N : genus_zero_levels()) {
    const auto& d = get_level(N);
    for (const auto& p : d.printed) {
      if (!p.weight || p.typo) continue;
      if (d.seed_recipes.at(*p.weight).kind == SeedKind::ClosedForm) continue;
      const QSeries want = parse_text(p.text);
      EXPECT_EQ(seed_form(N, *p.weight, want.prec()), want) << N << " F" << *p.weight;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 4);  // 7/4, 10/2, 10/4, 25/2
}

TEST(Synthesis, ValuationAndNormalization) {
  for (auto [N, k] : {std::pair{7, 4}, {10, 2}, {10, 4}, {13, 4}, {13, 6}, {25, 2}}) {
    const QSeries f = synthesize_seed(N, k, 40);
    EXPECT_EQ(f.prec(), 40);
    EXPECT_EQ(f.valuation(), v_of(N, k));
    EXPECT_EQ(f.leading(), 1);
    const auto& a = synthesis_audit(N, k);
    EXPECT_EQ(a.valuation, v_of(N, k));
    EXPECT_GE(a.reduction_prec, valence_bound(N, k) + 2);
    EXPECT_FALSE(a.combination.empty());
    EXPECT_EQ(a.to_json()["members"].size(), a.labels.size());
  }
}

TEST(Synthesis, LevelThirteenCorrectsPrintedData) {
  EXPECT_EQ(synthesize_seed(13, 4, 12),
            parse_text("q^4 + q^5 + 3*q^6 + 3*q^7 + 4*q^8 + 6*q^9 + 10*q^10 + 10*q^11 + O(q^12)"));
  EXPECT_EQ(synthesize_seed(13, 6, 10),
            parse_text("q^6 + 2*q^7 + 4*q^8 + 6*q^9 + O(q^10)"));
  const auto& d = get_level(13);
  for (const auto& p : d.printed) {
    if (!p.weight || (*p.weight != 4 && *p.weight != 6)) continue;
    EXPECT_TRUE(p.typo);
    const QSeries printed = parse_text(p.text);
    EXPECT_NE(seed_form(13, *p.weight, printed.prec()), printed);
  }
  // the printed F8, F10 are the products of the printed F4, F6
  auto line = [&](int w) {
    for (const auto& p : d.printed) {
      if (p.weight && *p.weight == w) return parse_text(p.text);
    }
    return QSeries::zero(0);
  };
  EXPECT_EQ(mul(line(4), line(4)).truncate(14), line(8));
  EXPECT_EQ(mul(line(4), line(6)).truncate(15), line(10));
}

// Synthesis applied to weights that do have closed forms.
TEST(Synthesis, AgreesWithClosedForms) {
  for (auto [N, k] : {std::pair{2, 4}, {3, 4}, {3, 6}, {5, 4}, {7, 6}}) {
    EXPECT_EQ(synthesize_seed(N, k, 60), seed_form(N, static_cast<int>(k), 60)) << N << " " << k;
  }
}

TEST(Synthesis, HigherPrecisionExtendsLower) {
  const QSeries lo = synthesize_seed(25, 2, 30);
  const QSeries hi = synthesize_seed(25, 2, 200);
  EXPECT_EQ(hi.truncate(30), lo);
}

TEST(Reduction, OrderIndependent) {
  const auto fam = build_family(10, 4, 3);
  const Reduction base = reduce_family(fam, 10);
  auto shuffled = fam;
  std::mt19937 rng(7);
  for (int trial = 0; trial < 3; ++trial) {
    std::shuffle(shuffled.members.begin(), shuffled.members.end(), rng);
    const Reduction r = reduce_family(shuffled, 10);
    EXPECT_EQ(r.element, base.element);
    EXPECT_EQ(r.rank, base.rank);
  }
}

TEST(Reduction, CombinationReproducesElement) {
  const auto fam = build_family(7, 4, 2);
  const Reduction r = reduce_family(fam, 9);
  QSeries acc = QSeries::zero(9);
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    if (r.combination[i] != 0) acc.axpy(r.combination[i], fam.members[i].build(9));
  }
  EXPECT_EQ(acc, r.element);
}

TEST(Reduction, SmallFamilyIsDeficient) {
  // Holomorphic products alone cannot reach valuation 4 at level 13.
  const Reduction r = reduce_family(build_family(13, 4, 0), 8);
  EXPECT_LT(r.element.valuation(), 4);
}

// f(gamma tau) = (c tau + d)^k f(tau) for gamma in Gamma_0(N), evaluated
// numerically from the exact coefficients.
TEST(Synthesis, NumericModularity) {
  struct Case {
    std::int64_t N, k;
    long double a, b, c, d;
    cplx tau;
  };
  const Case cases[] = {
      {13, 4, 2, 1, 13, 7, cplx(-7.0L / 13 + 0.01L, 0.08L)},
      {13, 6, 2, 1, 13, 7, cplx(-7.0L / 13 + 0.01L, 0.08L)},
      {13, 4, 1, 0, 13, 1, cplx(-1.0L / 13 + 0.005L, 0.07L)},
      {25, 2, 1, 0, 25, 1, cplx(-1.0L / 25 + 0.002L, 0.04L)},
      {10, 4, 3, 1, 20, 7, cplx(-7.0L / 20 + 0.004L, 0.05L)},
      {7, 4, 1, 0, 7, 1, cplx(-1.0L / 7 + 0.01L, 0.12L)},
  };
  for (const auto& cs : cases) {
    const QSeries f = synthesize_seed(cs.N, cs.k, 1200);
    const cplx g = (cs.a * cs.tau + cs.b) / (cs.c * cs.tau + cs.d);
    ASSERT_GT(g.imag(), 0.03L);
    const cplx lhs = eval(f, g);
    const cplx rhs = std::pow(cs.c * cs.tau + cs.d, static_cast<int>(cs.k)) * eval(f, cs.tau);
    EXPECT_LT(std::abs(lhs - rhs), 1e-8L * (1 + std::abs(rhs))) << cs.N << " " << cs.k;
  }
}
