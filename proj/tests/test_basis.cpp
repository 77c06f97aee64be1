#include <numeric>

#include <gtest/gtest.h>

#include "gridforge/basis.hpp"
#include "gridforge/error.hpp"
#include "gridforge/generators.hpp"
#include "gridforge/leveldata.hpp"
#include "gridforge/qseries_io.hpp"

using namespace gridforge;

namespace {

QSeries head(const QSeries& s, std::int64_t p) { return s.truncate(p); }
QSeries text(const char* t) { return parse_text(t); }

}  // namespace

TEST(FirstElement, Examples) {
  EXPECT_EQ(first_element(5, 0, Space::Inf, 10), QSeries::one(10));
  EXPECT_EQ(first_element(5, 2, Space::Hat, 4), text("q^-1 - 9*q - 20*q^2 + 90*q^3 + O(q^4)"));
  EXPECT_EQ(first_element(13, 12, Space::Inf, 19),
            text("q^14 + 2*q^15 + 5*q^16 + 10*q^17 + 20*q^18 + O(q^19)"));
  EXPECT_EQ(first_element(2, -6, Space::Inf, 1).valuation(), -2);
}

TEST(FirstElement, NegativePowersKeepPrecision) {
  // Delta^-2 E_4 at level 1, weight -20: valuation -2, requested precision kept
  const QSeries f = first_element(1, -20, Space::Inf, 30);
  EXPECT_EQ(f.prec(), 30);
  const QSeries check = mul(f, pow(delta(40), 2), 28);
  EXPECT_EQ(check, eisenstein({4, 1}, 28));
}

TEST(NextElement, LevelFiveWeightZero) {
  const CanonicalBasis b = build_basis(5, 0, Space::Inf, 4, 20);
  EXPECT_EQ(head(b.element(0), 4), QSeries::one(4));
  EXPECT_EQ(head(b.element(1), 3), text("q^-1 + 9*q + 10*q^2 + O(q^3)"));
  EXPECT_EQ(head(b.element(2), 3), text("q^-2 + 20*q + 21*q^2 + O(q^3)"));
  EXPECT_EQ(head(b.element(3), 3), text("q^-3 - 90*q + 288*q^2 + O(q^3)"));
  // the displayed recursion step: f_2 = psi f_1 + 6 f_1 - 18
  const QSeries psi = hauptmodul_series(5, 30);
  QSeries f2 = mul(psi, b.element(1));
  f2.axpy(6, b.element(1));
  f2.axpy(-18, QSeries::one());
  EXPECT_EQ(head(f2, 19), head(b.element(2), 19));
}

TEST(NextElement, LevelOneWeightZero) {
  const CanonicalBasis b = build_basis(1, 0, Space::Inf, 3, 20);
  EXPECT_EQ(head(b.element(2), 3), text("q^-2 + 42987520*q + 40491909396*q^2 + O(q^3)"));
}

// Independent oracle: at level 1 the weight-0 elements are j_m = m (j - 744)|T_m,
// whose coefficients are c_m(n) = sum_{d | (m, n)} (m / d) c(mn / d^2).
TEST(Basis, LevelOneWeightZeroMatchesHeckeImages) {
  const QSeries j = j_function(60);
  const CanonicalBasis b = build_basis(1, 0, Space::Inf, 6, 20);
  for (std::int64_t m = 1; m <= 5; ++m) {
    for (std::int64_t n = 1; n <= 10; ++n) {
      Coeff want = 0;
      const std::int64_t g = std::gcd(m, n);
      for (std::int64_t d = 1; d <= g; ++d) {
        if (g % d == 0) want += Coeff(m / d) * j.coeff(m * n / (d * d));
      }
      EXPECT_EQ(b.element(m).coeff(n), want) << m << " " << n;
    }
  }
}

TEST(Grid, LevelFourWeightZero) {
  const ModularGrid g = build_grid(4, 0, 4, 12);
  EXPECT_EQ(head(g.fside.element(0), 7), QSeries::one(7));
  EXPECT_EQ(head(g.fside.element(1), 6), text("q^-1 + 20*q - 62*q^3 + 216*q^5 + O(q^6)"));
  EXPECT_EQ(head(g.fside.element(2), 7),
            text("q^-2 + 276*q^2 - 2048*q^4 + 11202*q^6 + O(q^7)"));
  EXPECT_EQ(head(g.fside.element(3), 6), text("q^-3 - 186*q + 4928*q^3 - 51831*q^5 + O(q^6)"));
  EXPECT_EQ(head(g.gside.element(1), 6), text("q^-1 - 20*q + 186*q^3 - 1080*q^5 + O(q^6)"));
  EXPECT_EQ(head(g.gside.element(2), 7),
            text("q^-2 - 276*q^2 + 4096*q^4 - 33606*q^6 + O(q^7)"));
  EXPECT_EQ(head(g.gside.element(3), 6), text("q^-3 + 62*q - 4928*q^3 + 86385*q^5 + O(q^6)"));
}

TEST(Grid, LevelTwoWeightMinusSix) {
  const ModularGrid g = build_grid(2, -6, 4, 12);
  EXPECT_EQ(g.fside.m0(), 2);
  EXPECT_EQ(g.gside.m0(), -1);
  EXPECT_EQ(head(g.fside.element(2), 2), text("q^-2 + 8*q^-1 - 224 + 2144*q + O(q^2)"));
  EXPECT_EQ(head(g.fside.element(3), 2), text("q^-3 - 12*q^-1 + 4096 - 98226*q + O(q^2)"));
  EXPECT_EQ(head(g.fside.element(4), 2), text("q^-4 - 64*q^-1 - 31200 + 1817856*q + O(q^2)"));
  EXPECT_EQ(head(g.gside.element(-1), 5), text("q - 8*q^2 + 12*q^3 + 64*q^4 + O(q^5)"));
  EXPECT_EQ(head(g.gside.element(0), 5), text("1 + 224*q^2 - 4096*q^3 + 31200*q^4 + O(q^5)"));
  // printed with -181756 for the last coefficient; duality with f_{-6,4}
  // (coefficient 1817856 at q) forces -1817856
  EXPECT_EQ(head(g.gside.element(1), 5),
            text("q^-1 - 2144*q^2 + 98226*q^3 - 1817856*q^4 + O(q^5)"));
}

TEST(Grid, LevelOne) {
  const ModularGrid g = build_grid(1, 0, 4, 10);
  EXPECT_EQ(g.fside.m0(), 0);
  EXPECT_EQ(head(g.fside.element(0), 3), QSeries::one(3));
  EXPECT_EQ(head(g.fside.element(1), 4),
            text("q^-1 + 196884*q + 21493760*q^2 + 864299970*q^3 + O(q^4)"));
  EXPECT_EQ(head(g.fside.element(3), 4),
            text("q^-3 + 2592899910*q + 12756069900288*q^2 + 9529320689550144*q^3 + O(q^4)"));
  EXPECT_EQ(head(g.gside.element(1), 4),
            text("q^-1 - 196884*q - 42987520*q^2 - 2592899910*q^3 + O(q^4)"));
  EXPECT_EQ(head(g.gside.element(2), 4),
            text("q^-2 - 21493760*q - 40491909396*q^2 - 12756069900288*q^3 + O(q^4)"));
  EXPECT_EQ(head(g.gside.element(3), 4),
            text("q^-3 - 864299970*q - 8504046600192*q^2 - 9529320689550144*q^3 + O(q^4)"));
}

TEST(Duality, Examples) {
  const ModularGrid g5 = build_grid(5, 0, 3, 10);
  EXPECT_EQ(g5.fside.element(2).coeff(1), 20);
  EXPECT_EQ(g5.gside.element(1).coeff(2), -20);
  EXPECT_EQ(duality_residual(g5, 3, 3).residual, 0);
  const ModularGrid g1 = build_grid(1, 0, 3, 10);
  const DualityResult r1 = duality_residual(g1, 3, 3);
  EXPECT_EQ(r1.residual, 0);
  EXPECT_EQ(r1.cells, 9);
  EXPECT_FALSE(r1.witness.has_value());
  EXPECT_EQ(duality_residual(g1, 0, 0).residual, 0);
}

TEST(Duality, WitnessAndRangeErrors) {
  ModularGrid g = build_grid(5, 0, 3, 10);
  g.fside.elements[1].axpy(Coeff(7, 2), QSeries::monomial(1, 2));
  const DualityResult r = duality_residual(g, 3, 3);
  EXPECT_EQ(r.residual, Coeff(7, 2));
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness->m, 1);
  EXPECT_EQ(r.witness->n, 2);
  EXPECT_THROW(duality_residual(g, 4, 3), DomainError);
}

TEST(Basis, PrecisionAudit) {
  EXPECT_EQ(required_prec(18, 10, Space::Inf, 20), 55);
  try {
    build_basis(18, 10, Space::Inf, 20, 54);
    FAIL();
  } catch (const PrecisionError& e) {
    EXPECT_NE(std::string(e.what()).find("need prec >= 55"), std::string::npos);
  }
  EXPECT_THROW(build_basis(5, 0, Space::Inf, 0, 20), DomainError);
  EXPECT_NO_THROW(build_basis(18, 10, Space::Inf, 20, 55));
}

TEST(Basis, CacheSlicesAreConsistent) {
  const CanonicalBasis small = build_basis(7, 4, Space::Hat, 3, 20);
  const CanonicalBasis big = build_basis(7, 4, Space::Hat, 8, 40);
  const CanonicalBasis again = build_basis(7, 4, Space::Hat, 3, 20);
  for (std::int64_t m = small.m0(); m < small.m_end(); ++m) {
    EXPECT_EQ(big.element(m).truncate(20), small.element(m));
    EXPECT_EQ(again.element(m), small.element(m));
  }
}

// Gap form, leading normalization, duality and the vanishing rule on every
// level for k in [-10, 10].
TEST(Basis, SweepInvariants) {
  for (std::int64_t N : genus_zero_levels()) {
    for (std::int64_t k = -10; k <= 10; k += 2) {
      const ModularGrid g = build_grid(N, k, 20, 60);
      for (const CanonicalBasis* b : {&g.fside, &g.gside}) {
        for (std::int64_t m = b->m0(); m < b->m_end(); ++m) {
          const QSeries& e = b->element(m);
          ASSERT_EQ(e.valuation(), -m);
          EXPECT_EQ(e.leading(), 1);
          EXPECT_EQ(e.prec(), 60);
          for (const auto& t : e.terms()) {
            if (t.exp == -m) continue;
            EXPECT_GT(t.exp, b->B) << N << " " << b->k << " m=" << m;
          }
        }
      }
      EXPECT_EQ(g.gside.m0(), g.fside.B + 1);
      const DualityResult r = duality_residual(g, 20, 20);
      EXPECT_EQ(r.residual, 0) << "level " << N << " weight " << k;
      for (std::int64_t n = g.gside.m0(); n < g.gside.m_end(); ++n) {
        for (std::int64_t m = -n - 5; m < -n; ++m) EXPECT_EQ(g.gside.element(n).coeff(m), 0);
      }
    }
  }
}

// Every hat element is the Inf combination with the same coefficients up to
// q^{v_k(N)}.
TEST(Basis, HatLiesInInf) {
  for (std::int64_t N : genus_zero_levels()) {
    for (std::int64_t k : {-4, 0, 2, 6}) {
      const CanonicalBasis hat = build_basis(N, k, Space::Hat, 6, 40);
      const std::int64_t top = hat.m_end() - 1;
      const std::int64_t v = v_of(N, k);
      const CanonicalBasis inf = build_basis(N, k, Space::Inf, top + v + 1, 40 + top + v + 1);
      for (std::int64_t m = hat.m0(); m < hat.m_end(); ++m) {
        QSeries r = hat.element(m);
        for (std::int64_t e = -m; e <= v; ++e) r.axpy(-hat.element(m).coeff(e), inf.element(-e));
        EXPECT_TRUE(r.empty()) << N << " " << k << " m=" << m << ": " << r;
      }
    }
  }
}

TEST(Basis, JsonRoundTrip) {
  const CanonicalBasis b = build_basis(3, -2, Space::Hat, 3, 15);
  const auto j = b.to_json();
  EXPECT_EQ(j["space"], "hat");
  ASSERT_EQ(j["elements"].size(), 3u);
  for (const auto& e : j["elements"]) {
    EXPECT_EQ(from_json(e["series"]), b.element(e["m"].get<std::int64_t>()));
  }
}

TEST(Basis, LevelTwentyFivePerformanceShape) {
  const CanonicalBasis b = build_basis(25, 2, Space::Inf, 50, 120);
  EXPECT_EQ(b.elements.size(), 50u);
  EXPECT_EQ(b.m0(), -4);
  EXPECT_EQ(b.element(45).valuation(), -45);
}
