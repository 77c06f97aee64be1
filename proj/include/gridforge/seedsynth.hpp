#pragma once

// First basis elements without a closed form, found by exact row reduction
// over a family of forms in M_k^(inf)(N) built from phi_d, E4(dz), E6(dz),
// lower-weight seeds, powers of the Hauptmodul and Serre derivatives.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridforge/qseries.hpp"

namespace gridforge {

struct FamilyMember {
  std::string label;
  std::int64_t pole_order = 0;                    // j in h * psi^j
  std::function<QSeries(std::int64_t)> build;     // absolute precision -> series
};

struct SpanningFamily {
  std::int64_t N = 0;
  std::int64_t k = 0;
  std::int64_t J = 0;
  std::vector<FamilyMember> members;
};

/// Throws DomainError when the weight-k pool is empty.
SpanningFamily build_family(std::int64_t N, std::int64_t k, std::int64_t J);

/// Echelon reduction result: the monic element of maximal valuation in the
/// span (to precision prec) and its coefficients on the members.
struct Reduction {
  QSeries element;
  std::vector<Coeff> combination;  // indexed like the members
  std::int64_t rank = 0;
  std::vector<std::int64_t> member_valuations;  // kExact-ish sentinel for zero
};

/// Row reduces the members evaluated at absolute precision prec. Pivots are
/// taken at ascending exponents; earlier members keep their pivots.
Reduction reduce_family(const SpanningFamily& family, std::int64_t prec);

struct SynthesisAudit {
  std::int64_t N = 0;
  std::int64_t k = 0;
  std::int64_t J = 0;
  std::int64_t reduction_prec = 0;
  std::int64_t rank = 0;
  std::int64_t valuation = 0;
  std::vector<std::string> labels;
  std::vector<std::int64_t> member_valuations;
  std::vector<std::pair<std::string, Coeff>> combination;  // nonzero entries

  nlohmann::json to_json() const;
};

/// Largest possible valuation of a nonzero form in M_k^(inf)(N):
/// floor(k * index(Gamma_0(N)) / 12).
std::int64_t valence_bound(std::int64_t N, std::int64_t k);

/// The monic form of maximal valuation in M_k^(inf)(N), to absolute precision
/// prec. Tries J = 10, then J = 20. Throws DomainError("spanning family
/// deficient; achieved v'=...") or ValidationError("synthesis contradicts
/// printed data ...").
QSeries synthesize_seed(std::int64_t N, std::int64_t k, std::int64_t prec);
const SynthesisAudit& synthesis_audit(std::int64_t N, std::int64_t k);

/// F_w of level N to absolute precision prec, from the registry recipe,
/// synthesizing where the registry has no closed form.
QSeries seed_form(std::int64_t N, int w, std::int64_t prec);

}  // namespace gridforge
