#include "gridforge/leveldata.hpp"

#include <algorithm>

#include "gridforge/error.hpp"
#include "gridforge/qseries_io.hpp"

namespace gridforge {

namespace {

std::int64_t fdiv(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void require_even(std::int64_t k) {
  if (k % 2 != 0) throw DomainError("weight must be even, got " + std::to_string(k));
}

// v_k(N) per level.
std::int64_t v1(std::int64_t k) {
  std::int64_t kp = k - 12 * fdiv(k, 12);
  if (kp == 2) kp = 14;
  return (k - kp) / 12;
}
std::int64_t v2(std::int64_t k) { return fdiv(k, 4); }
std::int64_t v3(std::int64_t k) {
  const std::int64_t l = fdiv(k, 6);
  return 2 * l + (k - 6 * l) / 3;
}
std::int64_t v4(std::int64_t k) { return k / 2; }
std::int64_t v5(std::int64_t k) { return 2 * fdiv(k, 4); }
std::int64_t v_k(std::int64_t k) { return k; }
std::int64_t v7(std::int64_t k) {
  const std::int64_t l = fdiv(k, 6);
  return 4 * l + 2 * ((k - 6 * l) / 3);
}
std::int64_t v10(std::int64_t k) {
  const std::int64_t l = fdiv(k, 4);
  return 6 * l + (k - 4 * l);
}
std::int64_t v_2k(std::int64_t k) { return 2 * k; }
std::int64_t v13(std::int64_t k) {
  const std::int64_t l = fdiv(k, 12);
  const std::int64_t kp = k - 12 * l;
  return 14 * l + (kp == 2 ? 0 : kp);
}
std::int64_t v_3k(std::int64_t k) { return 3 * k; }
std::int64_t v25(std::int64_t k) {
  const std::int64_t l = fdiv(k, 4);
  return 10 * l + 2 * (k - 4 * l);
}

using E = SeedExpr;

SeedRecipe closed(int w, SeedExpr e) { return {w, SeedKind::ClosedForm, std::move(e)}; }
SeedRecipe power_of(int w, SeedExpr e) { return {w, SeedKind::PowerOf, std::move(e)}; }
SeedRecipe synth(int w) { return {w, SeedKind::Synthesized, E::synthesized()}; }

PrintedPrefix psi_line(std::string text, bool typo = false) {
  return {std::nullopt, std::move(text), typo};
}
PrintedPrefix seed_line(int w, std::string text) { return {w, std::move(text), false}; }

std::map<int, SeedRecipe> recipes(std::vector<SeedRecipe> list) {
  std::map<int, SeedRecipe> out;
  out.emplace(0, closed(0, E::product({})));
  for (auto& r : list) out.emplace(r.weight, std::move(r));
  return out;
}

std::vector<LevelData> build_registry() {
  std::vector<LevelData> reg;
  const std::vector<std::string> two_cusps = {"inf", "0"};

  {
    LevelData d;
    d.N = 1;
    d.cusp_count = 1;
    d.cusps = {"inf"};
    d.v_formula = v1;
    d.seed_period = 12;
    d.residues = {0, 4, 6, 8, 10, 14};
    d.seed_recipes = recipes({closed(4, E::eisenstein(4)), closed(6, E::eisenstein(6)),
                              closed(8, E::eisenstein(8)), closed(10, E::eisenstein(10)),
                              closed(14, E::eisenstein(14)),
                              closed(12, E::eta("eta(1)^24"))});
    d.cusp_poly = {1};
    d.printed = {psi_line("q^-1 + 744 + 196884*q + 21493760*q^2 + 864299970*q^3 + O(q^4)")};
    reg.push_back(std::move(d));
  }
  {
    LevelData d;
    d.N = 2;
    d.cusp_count = 2;
    d.cusps = two_cusps;
    d.hauptmodul = EtaQuotient::parse("eta(1)^24 * eta(2)^-24");
    d.v_formula = v2;
    d.seed_period = 4;
    d.residues = {0, 2};
    d.seed_recipes = recipes(
        {closed(2, E::phi(2)),
         closed(4, E::sum({{Coeff(1, 240), E::eisenstein(4)},
                           {Coeff(-1, 240), E::eisenstein(4, 2)}}))});
    d.cusp_poly = {0, 1};
    d.printed = {seed_line(2, "1 + 24*q + 24*q^2 + 96*q^3 + 24*q^4 + O(q^5)"),
                 seed_line(4, "q + 8*q^2 + 28*q^3 + 64*q^4 + O(q^5)"),
                 psi_line("q^-1 - 24 + 276*q - 2048*q^2 + O(q^3)")};
    reg.push_back(std::move(d));
  }
  {
    LevelData d;
    d.N = 3;
    d.cusp_count = 2;
    d.cusps = two_cusps;
    d.hauptmodul = EtaQuotient::parse("eta(1)^12 * eta(3)^-12");
    d.v_formula = v3;
    d.seed_period = 6;
    d.residues = {0, 2, 4};
    d.seed_recipes = recipes(
        {closed(2, E::phi(3)),
         closed(4, E::sum({{Coeff(1, 216), E::eisenstein(4)},
                           {Coeff(-1, 216), E::product({E::seed(2), E::seed(2)})}})),
         closed(6, E::eta("eta(3)^18 * eta(1)^-6"))});
    d.cusp_poly = {0, 1};
    d.printed = {seed_line(2, "1 + 12*q + 36*q^2 + 12*q^3 + 84*q^4 + O(q^5)"),
                 seed_line(4, "q + 9*q^2 + 27*q^3 + 73*q^4 + 126*q^5 + O(q^6)"),
                 seed_line(6, "q^2 + 6*q^3 + 27*q^4 + 80*q^5 + 207*q^6 + O(q^7)"),
                 psi_line("q^-1 - 12 + 54*q - 76*q^2 + O(q^3)")};
    reg.push_back(std::move(d));
  }
  {
    LevelData d;
    d.N = 4;
    d.cusp_count = 3;
    d.cusps = {"0", "1/2", "inf"};
    d.hauptmodul = EtaQuotient::parse("eta(1)^8 * eta(4)^-8");
    d.v_formula = v4;
    d.seed_period = 2;
    d.residues = {0};
    d.seed_recipes = recipes({closed(2, E::sum({{Coeff(1, 8), E::eisenstein(2, 2)},
                                                {Coeff(-1, 24), E::eisenstein(2)},
                                                {Coeff(-1, 12), E::eisenstein(2, 4)}}))});
    d.cusp_poly = {0, 16, 1};
    d.flags = {{"paper_typo", "seed_normalization",
                "printed formula 3E2(2z)-E2(z)-2E2(4z) equals 24 times the printed "
                "expansion; stored divided by 24"},
               {"paper_typo", "hauptmodul_expansion",
                "printed coefficient -62 belongs to q^3, the q^2 coefficient is 0"}};
    d.printed = {seed_line(2, "q + 4*q^3 + 6*q^5 + 8*q^7 + 13*q^9 + O(q^10)"),
                 psi_line("q^-1 - 8 + 20*q - 62*q^2 + O(q^3)", true)};
    reg.push_back(std::move(d));
  }
  {
    LevelData d;
    d.N = 5;
    d.cusp_count = 2;
    d.cusps = two_cusps;
    d.hauptmodul = EtaQuotient::parse("eta(1)^6 * eta(5)^-6");
    d.v_formula = v5;
    d.seed_period = 4;
    d.residues = {0, 2};
    d.seed_recipes =
        recipes({closed(2, E::phi(5)), closed(4, E::eta("eta(5)^10 * eta(1)^-2"))});
    d.cusp_poly = {0, 1};
    d.printed = {seed_line(2, "1 + 6*q + 18*q^2 + 24*q^3 + 42*q^4 + O(q^5)"),
                 seed_line(4, "q^2 + 2*q^3 + 5*q^4 + 10*q^5 + 20*q^6 + O(q^7)"),
                 psi_line("q^-1 - 6 + 9*q + 10*q^2 - 30*q^3 + O(q^4)")};
    reg.push_back(std::move(d));
  }
  {
    LevelData d;
    d.N = 6;
    d.cusp_count = 4;
    d.cusps = {"0", "1/3", "1/2", "inf"};
    d.hauptmodul = EtaQuotient::parse("eta(2)^8 * eta(3)^4 * eta(1)^-4 * eta(6)^-8");
    d.v_formula = v_k;
    d.seed_period = 2;
    d.residues = {0};
    d.seed_recipes =
        recipes({closed(2, E::eta("eta(1)^2 * eta(6)^12 * eta(2)^-4 * eta(3)^-6"))});
    d.cusp_poly = {0, 9, -10, 1};
    d.flags = {{"paper_typo", "cusp_poly",
                "printed as x^3-10x+9x; stored x^3-10x^2+9x, confirmed from numeric "
                "cusp values"}};
    d.printed = {seed_line(2, "q^2 - 2*q^3 + 3*q^4 - q^6 + 7*q^8 + O(q^9)"),
                 psi_line("q^-1 + 4 + 6*q + 4*q^2 - 3*q^3 + O(q^4)")};
    reg.push_back(std::move(d));
  }
  {
    LevelData d;
    d.N = 7;
    d.cusp_count = 2;
    d.cusps = two_cusps;
    d.hauptmodul = EtaQuotient::parse("eta(1)^4 * eta(7)^-4");
    d.v_formula = v7;
    d.seed_period = 6;
    d.residues = {0, 2, 4};
    d.seed_recipes = recipes({closed(2, E::phi(7)), synth(4),
                              closed(6, E::eta("eta(7)^14 * eta(1)^-2"))});
    d.cusp_poly = {0, 1};
    d.printed = {seed_line(2, "1 + 4*q + 12*q^2 + 16*q^3 + 28*q^4 + O(q^5)"),
                 seed_line(4, "q^2 + 3*q^3 + 8*q^4 + 11*q^5 + O(q^6)"),
                 seed_line(6, "q^4 + 2*q^5 + 5*q^6 + 10*q^7 + 20*q^8 + O(q^9)"),
                 psi_line("q^-1 - 4 + 2*q + 8*q^2 - 5*q^3 + O(q^4)")};
    reg.push_back(std::move(d));
  }
  {
    LevelData d;
    d.N = 8;
    d.cusp_count = 4;
    d.cusps = {"0", "1/4", "1/2", "inf"};
    d.hauptmodul = EtaQuotient::parse("eta(1)^4 * eta(4)^2 * eta(2)^-2 * eta(8)^-4");
    d.v_formula = v_k;
    d.seed_period = 2;
    d.residues = {0};
    d.seed_recipes = recipes({closed(2, E::eta("eta(8)^8 * eta(4)^-4"))});
    d.cusp_poly = {0, 32, 12, 1};
    d.printed = {seed_line(2, "q^2 + 4*q^6 + 6*q^10 + 8*q^14 + 13*q^18 + O(q^19)"),
                 psi_line("q^-1 - 4 + 4*q + 2*q^3 - 8*q^5 + O(q^6)")};
    reg.push_back(std::move(d));
  }
  {
    LevelData d;
    d.N = 9;
    d.cusp_count = 4;
    d.cusps = {"0", "1/3", "-1/3", "inf"};
    d.hauptmodul = EtaQuotient::parse("eta(1)^3 * eta(9)^-3");
    d.v_formula = v_k;
    d.seed_period = 2;
    d.residues = {0};
    d.seed_recipes = recipes({closed(2, E::eta("eta(9)^6 * eta(3)^-2"))});
    d.cusp_poly = {0, 27, 9, 1};
    d.flags = {{"paper_typo", "hauptmodul",
                "printed line repeats the level 8 Hauptmodul; stored "
                "eta(1)^3 * eta(9)^-3"}};
    d.printed = {seed_line(2, "q^2 + 2*q^5 + 5*q^8 + 4*q^11 + 8*q^14 + O(q^15)"),
                 psi_line("q^-1 - 4 + 4*q + 2*q^3 - 8*q^5 + O(q^6)", true)};
    reg.push_back(std::move(d));
  }
  {
    LevelData d;
    d.N = 10;
    d.cusp_count = 4;
    d.cusps = {"0", "1/5", "1/2", "inf"};
    d.hauptmodul = EtaQuotient::parse("eta(2) * eta(5)^5 * eta(1)^-1 * eta(10)^-5");
    d.v_formula = v10;
    d.seed_period = 4;
    d.residues = {0, 2};
    d.seed_recipes = recipes({synth(2), synth(4)});
    d.cusp_poly = {0, -4, -3, 1};
    d.printed = {seed_line(2, "q^2 + 3*q^4 - 4*q^5 + 4*q^6 + 7*q^8 + O(q^9)"),
                 seed_line(4, "q^6 - 2*q^7 + 3*q^8 - 6*q^9 + 11*q^10 + O(q^11)"),
                 psi_line("q^-1 + 1 + q + 2*q^2 + 2*q^3 + O(q^4)")};
    reg.push_back(std::move(d));
  }
  {
    LevelData d;
    d.N = 12;
    d.cusp_count = 6;
    d.cusps = {"0", "1/6", "1/4", "1/3", "1/2", "inf"};
    d.hauptmodul = EtaQuotient::parse("eta(4)^4 * eta(6)^2 * eta(2)^-2 * eta(12)^-4");
    d.v_formula = v_2k;
    d.seed_period = 2;
    d.residues = {0};
    d.seed_recipes = recipes({closed(
        2,
        E::sum({
            {Coeff(1, 27),
             E::eta("eta(1)^10 * eta(4) * eta(6)^9 * eta(2)^-7 * eta(3)^-6 * eta(12)^-3")},
            {Coeff(11, 72),
             E::eta("eta(1)^7 * eta(4)^4 * eta(6)^9 * eta(2)^-7 * eta(3)^-5 * eta(12)^-4")},
            {Coeff(-1, 12),
             E::eta("eta(1)^4 * eta(4)^7 * eta(6)^9 * eta(2)^-7 * eta(3)^-4 * eta(12)^-5")},
            {Coeff(1, 54),
             E::eta("eta(1) * eta(4)^10 * eta(6)^9 * eta(2)^-7 * eta(3)^-3 * eta(12)^-6")},
            {Coeff(-1, 8),
             E::eta("eta(1)^9 * eta(4)^3 * eta(6)^2 * eta(2)^-6 * eta(3)^-3 * eta(12)^-1")},
        }))});
    d.cusp_poly = {0, 9, 0, -10, 0, 1};
    d.printed = {seed_line(2, "q^4 - 2*q^6 + 3*q^8 - q^12 + 7*q^16 + O(q^17)"),
                 psi_line("q^-1 + 2*q + q^3 - 2*q^7 + O(q^8)")};
    reg.push_back(std::move(d));
  }
  {
    LevelData d;
    d.N = 13;
    d.cusp_count = 2;
    d.cusps = two_cusps;
    d.hauptmodul = EtaQuotient::parse("eta(1)^2 * eta(13)^-2");
    d.v_formula = v13;
    d.seed_period = 12;
    d.residues = {0, 2, 4, 6, 8, 10};
    d.seed_recipes = recipes({closed(2, E::phi(13)), synth(4), synth(6),
                              power_of(8, E::product({E::seed(4), E::seed(4)})),
                              power_of(10, E::product({E::seed(4), E::seed(6)})),
                              closed(12, E::eta("eta(13)^26 * eta(1)^-2"))});
    d.cusp_poly = {0, 1};
    d.flags = {{"paper_typo", "seed_expansion",
                "printed F4 and F6 are not modular for Gamma0(13); the unique monic forms "
                "of valuation 4 and 6 are q^4 + q^5 + 3*q^6 + 3*q^7 + ... and "
                "q^6 + 2*q^7 + 4*q^8 + 6*q^9 + ...; printed F8, F10 are products of the "
                "printed F4, F6"}};
    d.printed = {seed_line(2, "1 + 2*q + 6*q^2 + 8*q^3 + 14*q^4 + O(q^5)"),
                 PrintedPrefix{4, "q^4 + q^5 + q^6 - q^7 - 3*q^9 + O(q^10)", true},
                 PrintedPrefix{6, "q^6 + q^7 + q^8 + 3*q^9 + 2*q^11 + O(q^12)", true},
                 PrintedPrefix{8, "q^8 + 2*q^9 + 3*q^10 - q^12 - 8*q^13 + O(q^14)", true},
                 PrintedPrefix{10, "q^10 + 2*q^11 + 3*q^12 + 4*q^13 + 3*q^14 + O(q^15)", true},
                 seed_line(12, "q^14 + 2*q^15 + 5*q^16 + 10*q^17 + 20*q^18 + O(q^19)"),
                 psi_line("q^-1 - 2 - q + 2*q^2 + q^3 + O(q^4)")};
    reg.push_back(std::move(d));
  }
  {
    LevelData d;
    d.N = 16;
    d.cusp_count = 6;
    d.cusps = {"0", "1/8", "1/4", "-1/4", "1/2", "inf"};
    d.hauptmodul = EtaQuotient::parse("eta(1)^2 * eta(8) * eta(2)^-1 * eta(16)^-2");
    d.v_formula = v_2k;
    d.seed_period = 2;
    d.residues = {0};
    d.seed_recipes = recipes({closed(2, E::eta("eta(16)^8 * eta(8)^-4"))});
    d.cusp_poly = {0, 64, 80, 40, 10, 1};
    d.printed = {seed_line(2, "q^4 + 4*q^12 + 6*q^20 + 8*q^28 + 13*q^36 + O(q^37)"),
                 psi_line("q^-1 - 2 + 2*q^3 - q^7 + O(q^8)")};
    reg.push_back(std::move(d));
  }
  {
    LevelData d;
    d.N = 18;
    d.cusp_count = 8;
    d.cusps = {"0", "1/9", "1/6", "-1/6", "1/3", "-1/3", "1/2", "inf"};
    d.hauptmodul = EtaQuotient::parse("eta(6) * eta(9)^3 * eta(3)^-1 * eta(18)^-3");
    d.v_formula = v_3k;
    d.seed_period = 2;
    d.residues = {0};
    d.seed_recipes = recipes({closed(
        2,
        E::sum({
            {Coeff(25, 216),
             E::eta("eta(1)^8 * eta(6)^2 * eta(9)^4 * eta(2)^-4 * eta(3)^-4 * eta(18)^-2")},
            {Coeff(-11, 144),
             E::eta("eta(1)^3 * eta(6)^8 * eta(9)^7 * eta(2)^-3 * eta(3)^-6 * eta(18)^-5")},
            {Coeff(-121, 972),
             E::eta("eta(1)^6 * eta(6)^7 * eta(9) * eta(2)^-3 * eta(3)^-5 * eta(18)^-2")},
            {Coeff(-41, 144),
             E::eta("eta(1)^6 * eta(6)^2 * eta(9)^6 * eta(2)^-3 * eta(3)^-4 * eta(18)^-3")},
            {Coeff(67, 144),
             E::eta("eta(1)^4 * eta(6)^7 * eta(9)^3 * eta(2)^-2 * eta(3)^-5 * eta(18)^-3")},
            {Coeff(1, 972),
             E::eta("eta(2)^9 * eta(3)^8 * eta(18) * eta(1)^-6 * eta(6)^-6 * eta(9)^-2")},
            {Coeff(-125, 1296),
             E::eta("eta(1) * eta(2)^4 * eta(9)^2 * eta(3)^-1 * eta(6)^-1 * eta(18)^-1")},
        }))});
    d.cusp_poly = {0, -8, 0, 0, -7, 0, 0, 1};
    d.printed = {seed_line(2, "q^6 - 2*q^9 + 3*q^12 - q^18 + 7*q^24 + O(q^25)"),
                 psi_line("q^-1 + q^2 + q^5 - q^8 + O(q^9)")};
    reg.push_back(std::move(d));
  }
  {
    LevelData d;
    d.N = 25;
    d.cusp_count = 6;
    d.cusps = {"0", "1/5", "-1/5", "2/5", "-2/5", "inf"};
    d.hauptmodul = EtaQuotient::parse("eta(1) * eta(25)^-1");
    d.v_formula = v25;
    d.seed_period = 4;
    d.residues = {0, 2};
    d.seed_recipes = recipes({synth(2), closed(4, E::eta("eta(25)^10 * eta(5)^-2"))});
    d.cusp_poly = {0, 25, 25, 15, 5, 1};
    d.printed = {seed_line(2, "q^4 + q^6 + 2*q^9 + 3*q^14 + 2*q^16 + O(q^17)"),
                 seed_line(4, "q^10 + 2*q^15 + 5*q^20 + 10*q^25 + 20*q^30 + O(q^31)"),
                 psi_line("q^-1 - 1 - q + q^4 + q^6 + O(q^7)")};
    reg.push_back(std::move(d));
  }
  return reg;
}

const std::vector<LevelData>& registry() {
  static const std::vector<LevelData> reg = build_registry();
  return reg;
}

std::string coeff_text(const Coeff& c) { return coeff_to_string(c); }

}  // namespace

// ---- SeedExpr ----

SeedExpr SeedExpr::eta(std::string_view text) {
  SeedExpr e;
  e.kind_ = Kind::Eta;
  e.eta_ = EtaQuotient::parse(text);
  return e;
}

SeedExpr SeedExpr::eisenstein(int weight, std::int64_t scale) {
  SeedExpr e;
  e.kind_ = Kind::Eisenstein;
  e.eis_ = {weight, scale};
  return e;
}

SeedExpr SeedExpr::phi(std::int64_t N) {
  SeedExpr e;
  e.kind_ = Kind::Phi;
  e.number_ = N;
  return e;
}

SeedExpr SeedExpr::seed(int weight) {
  SeedExpr e;
  e.kind_ = Kind::SeedRef;
  e.number_ = weight;
  return e;
}

SeedExpr SeedExpr::sum(std::vector<std::pair<Coeff, SeedExpr>> terms) {
  SeedExpr e;
  e.kind_ = Kind::Sum;
  for (auto& [c, t] : terms) {
    c.canonicalize();
    e.coeffs_.push_back(c);
    e.children_.push_back(std::move(t));
  }
  return e;
}

SeedExpr SeedExpr::product(std::vector<SeedExpr> factors) {
  SeedExpr e;
  e.kind_ = Kind::Product;
  e.children_ = std::move(factors);
  return e;
}

SeedExpr SeedExpr::synthesized() { return SeedExpr(); }

std::string SeedExpr::to_string() const {
  switch (kind_) {
    case Kind::Eta: return eta_.to_string();
    case Kind::Eisenstein:
      return "E" + std::to_string(eis_.weight) + "(" + std::to_string(eis_.scale) + "z)";
    case Kind::Phi: return "phi(" + std::to_string(number_) + ")";
    case Kind::SeedRef: return "F" + std::to_string(number_);
    case Kind::Synthesized: return "synthesized";
    case Kind::Sum: {
      std::string out;
      for (std::size_t i = 0; i < children_.size(); ++i) {
        if (i > 0) out += " + ";
        out += coeff_text(coeffs_[i]) + " * (" + children_[i].to_string() + ")";
      }
      return out.empty() ? "0" : out;
    }
    case Kind::Product: {
      std::string out;
      for (const auto& c : children_) {
        if (!out.empty()) out += " * ";
        out += c.to_string();
      }
      return out.empty() ? "1" : out;
    }
  }
  return {};
}

std::string to_string(SeedKind kind) {
  switch (kind) {
    case SeedKind::ClosedForm: return "closed_form";
    case SeedKind::PowerOf: return "power_of";
    case SeedKind::Synthesized: return "synthesized";
  }
  return {};
}

// ---- LevelData ----

std::int64_t LevelData::v(std::int64_t k) const {
  require_even(k);
  return v_formula(k);
}

std::pair<std::int64_t, int> LevelData::decompose(std::int64_t k) const {
  require_even(k);
  for (int kp : residues) {
    const std::int64_t diff = k - kp;
    if (diff % seed_period == 0) return {diff / seed_period, kp};
  }
  throw DomainError("no residue weight for k=" + std::to_string(k) + " at level " +
                    std::to_string(N));
}

std::string LevelData::hauptmodul_text() const {
  return hauptmodul ? hauptmodul->to_string() : "j";
}

std::string LevelData::cusp_poly_text() const {
  std::string out;
  for (std::size_t i = cusp_poly.size(); i-- > 0;) {
    const std::int64_t c = cusp_poly[i];
    if (c == 0) continue;
    const std::int64_t a = c < 0 ? -c : c;
    if (out.empty()) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    if (i == 0 || a != 1) out += std::to_string(a);
    if (i > 0 && a != 1) out += "*";
    if (i == 1) out += "x";
    if (i > 1) out += "x^" + std::to_string(i);
  }
  return out;
}

const std::vector<std::int64_t>& genus_zero_levels() {
  static const std::vector<std::int64_t> levels = {1, 2, 3, 4, 5, 6, 7, 8,
                                                   9, 10, 12, 13, 16, 18, 25};
  return levels;
}

bool is_genus_zero(std::int64_t N) {
  const auto& l = genus_zero_levels();
  return std::find(l.begin(), l.end(), N) != l.end();
}

const LevelData& get_level(std::int64_t N) {
  for (const auto& d : registry()) {
    if (d.N == N) return d;
  }
  throw DomainError("level not genus zero: " + std::to_string(N));
}

std::int64_t v_of(std::int64_t N, std::int64_t k) { return get_level(N).v(k); }
std::int64_t u_of(std::int64_t N, std::int64_t k) { return get_level(N).u(k); }

const std::vector<DataFlag>& registry_flags() {
  static const std::vector<DataFlag> flags = {
      {"paper_typo", "basis_gap",
       "displayed summation start -v+1 contradicts the printed examples; tails start "
       "at exponent v+1 (u+1 for the hat space)"}};
  return flags;
}

QSeries hauptmodul_series(std::int64_t N, std::int64_t prec) {
  const LevelData& d = get_level(N);
  if (!d.hauptmodul) return j_function(prec);
  return eta_quotient_expand(*d.hauptmodul, prec);
}

QSeries cusp_killer(std::int64_t N, std::int64_t prec) {
  const LevelData& d = get_level(N);
  const auto deg = static_cast<std::int64_t>(d.cusp_poly.size()) - 1;
  if (deg == 0) return QSeries::one(prec);
  // Horner: each multiplication by psi costs one unit of precision.
  const QSeries psi = hauptmodul_series(N, prec + deg - 1);
  QSeries acc = QSeries::one();
  for (std::int64_t i = deg - 1; i >= 0; --i) {
    acc = mul(acc, psi, prec + i);
    const std::int64_t c = d.cusp_poly[static_cast<std::size_t>(i)];
    if (c != 0) acc += QSeries::monomial(Coeff(c), 0);
  }
  return acc.truncate(prec);
}

QSeries evaluate(const SeedExpr& e, std::int64_t N, std::int64_t prec,
                 const SeedLookup& lookup) {
  using K = SeedExpr::Kind;
  switch (e.kind()) {
    case K::Eta: return eta_quotient_expand(e.eta_quotient(), prec);
    case K::Eisenstein: return eisenstein(e.eisenstein_spec(), prec);
    case K::Phi: return phi(e.number(), prec);
    case K::SeedRef: return lookup(static_cast<int>(e.number()), prec);
    case K::Synthesized:
      throw DomainError("synthesized seed has no closed form");
    case K::Sum: {
      QSeries out = QSeries::zero(prec);
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        out.axpy(e.coeffs()[i], evaluate(e.children()[i], N, prec, lookup));
      }
      return out;
    }
    case K::Product: {
      std::vector<QSeries> factors;
      for (const auto& c : e.children()) factors.push_back(evaluate(c, N, prec, lookup));
      // A factor with a pole costs the others precision; re-evaluate if so.
      std::int64_t deficit = 0;
      for (const auto& f : factors) {
        if (!f.empty() && f.valuation() < 0) deficit -= f.valuation();
      }
      if (deficit > 0) {
        factors.clear();
        for (const auto& c : e.children()) {
          factors.push_back(evaluate(c, N, prec + deficit, lookup));
        }
      }
      QSeries out = QSeries::one(prec);
      for (const auto& f : factors) out = mul(out, f, prec);
      return out;
    }
  }
  throw DomainError("unknown seed expression");
}

nlohmann::json registry_dump() {
  using nlohmann::json;
  json levels = json::array();
  for (const auto& d : registry()) {
    json entry;
    entry["N"] = d.N;
    entry["cusp_count"] = d.cusp_count;
    entry["cusps"] = d.cusps;
    entry["hauptmodul"] = d.hauptmodul_text();
    entry["u_minus_v"] = -(d.cusp_count - 1);
    json vu = json::array();
    for (std::int64_t k = -10; k <= 14; k += 2) {
      vu.push_back({{"k", k}, {"v", d.v(k)}, {"u", d.u(k)}});
    }
    entry["vanishing"] = vu;
    entry["seed_period"] = d.seed_period;
    entry["residues"] = d.residues;
    json seeds = json::array();
    for (const auto& [w, r] : d.seed_recipes) {
      seeds.push_back({{"weight", w}, {"kind", to_string(r.kind)},
                       {"formula", r.expr.to_string()}});
    }
    entry["seeds"] = seeds;
    entry["cusp_poly"] = d.cusp_poly_text();
    json flags = json::array();
    for (const auto& f : d.flags) {
      flags.push_back({{"code", f.code}, {"subject", f.subject}, {"note", f.note}});
    }
    entry["flags"] = flags;
    levels.push_back(entry);
  }
  json global = json::array();
  for (const auto& f : registry_flags()) {
    global.push_back({{"code", f.code}, {"subject", f.subject}, {"note", f.note}});
  }
  return {{"levels", levels}, {"flags", global}};
}

}  // namespace gridforge
