#pragma once

// Static per-level data for the genus-zero levels
// N in {1,2,3,4,5,6,7,8,9,10,12,13,16,18,25}.
//
// The first basis element of weight k is F_P^l * F_{k'} where P is the
// level's seed period, k = P*l + k', and k' runs over a fixed residue set.
// Every F_w is described by a SeedExpr.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridforge/generators.hpp"
#include "gridforge/qseries.hpp"

namespace gridforge {

class SeedExpr {
 public:
  enum class Kind { Eta, Eisenstein, Phi, SeedRef, Sum, Product, Synthesized };

  static SeedExpr eta(std::string_view text);
  static SeedExpr eisenstein(int weight, std::int64_t scale = 1);
  static SeedExpr phi(std::int64_t N);
  static SeedExpr seed(int weight);  // F_weight of the same level
  static SeedExpr sum(std::vector<std::pair<Coeff, SeedExpr>> terms);
  static SeedExpr product(std::vector<SeedExpr> factors);
  static SeedExpr synthesized();

  Kind kind() const { return kind_; }
  const EtaQuotient& eta_quotient() const { return eta_; }
  const EisensteinSpec& eisenstein_spec() const { return eis_; }
  std::int64_t number() const { return number_; }
  const std::vector<SeedExpr>& children() const { return children_; }
  const std::vector<Coeff>& coeffs() const { return coeffs_; }

  std::string to_string() const;

 private:
  Kind kind_ = Kind::Synthesized;
  EtaQuotient eta_;
  EisensteinSpec eis_;
  std::int64_t number_ = 0;
  std::vector<SeedExpr> children_;
  std::vector<Coeff> coeffs_;
};

enum class SeedKind { ClosedForm, PowerOf, Synthesized };
std::string to_string(SeedKind kind);

struct SeedRecipe {
  int weight = 0;
  SeedKind kind = SeedKind::ClosedForm;
  SeedExpr expr;
};

/// A q-expansion prefix as printed in the literature, kept for conformance
/// checks. `weight` is the seed weight, or nullopt for the Hauptmodul.
struct PrintedPrefix {
  std::optional<int> weight;
  std::string text;
  bool typo = false;
};

struct DataFlag {
  std::string code;     // e.g. "paper_typo"
  std::string subject;  // e.g. "hauptmodul"
  std::string note;
};

struct LevelData {
  std::int64_t N = 1;
  int cusp_count = 1;
  std::vector<std::string> cusps;
  std::optional<EtaQuotient> hauptmodul;  // nullopt at level 1 (j)
  std::int64_t (*v_formula)(std::int64_t k) = nullptr;
  int seed_period = 12;
  std::vector<int> residues;               // admissible k'
  std::map<int, SeedRecipe> seed_recipes;  // every residue and the period weight
  std::vector<std::int64_t> cusp_poly;     // ascending coefficients, monic
  std::vector<DataFlag> flags;
  std::vector<PrintedPrefix> printed;

  std::int64_t v(std::int64_t k) const;
  std::int64_t u(std::int64_t k) const { return v(k) - (cusp_count - 1); }

  /// k = seed_period * l + k' with k' a residue weight. Returns {l, k'}.
  std::pair<std::int64_t, int> decompose(std::int64_t k) const;

  std::string hauptmodul_text() const;
  std::string cusp_poly_text() const;
};

const std::vector<std::int64_t>& genus_zero_levels();
bool is_genus_zero(std::int64_t N);

/// Throws DomainError("level not genus zero: N") for other N.
const LevelData& get_level(std::int64_t N);

/// Both throw DomainError for odd k.
std::int64_t v_of(std::int64_t N, std::int64_t k);
std::int64_t u_of(std::int64_t N, std::int64_t k);

/// Registry-wide annotations that are not tied to one level.
const std::vector<DataFlag>& registry_flags();

/// psi^(N), or j at level 1, to absolute precision prec.
QSeries hauptmodul_series(std::int64_t N, std::int64_t prec);

/// P(psi^(N)) for the level's cusp polynomial P.
QSeries cusp_killer(std::int64_t N, std::int64_t prec);

/// Supplies F_w of the current level (needed for SeedRef and Synthesized).
using SeedLookup = std::function<QSeries(int weight, std::int64_t prec)>;

/// Evaluates a seed expression at level N to absolute precision prec.
QSeries evaluate(const SeedExpr& e, std::int64_t N, std::int64_t prec,
                 const SeedLookup& lookup);

nlohmann::json registry_dump();

}  // namespace gridforge
