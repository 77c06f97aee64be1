#pragma once

// The trace tr^N_M on canonical basis elements by principal-part matching,
// the preservation classifier, obstruction terms and truncated checks of
// the generating-function identities.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gridforge/basis.hpp"
#include "gridforge/qseries.hpp"

namespace gridforge {

/// M_k(M) = 0.
bool mk_trivial(std::int64_t M, std::int64_t k);
/// S_k(M) = 0.
bool sk_trivial(std::int64_t M, std::int64_t k);

struct TraceReport {
  std::int64_t N = 0;
  std::int64_t M = 0;
  std::int64_t k = 0;
  Space space = Space::Inf;
  std::int64_t m = 0;
  bool applicable = false;
  std::string reason;  // why not applicable, or a note on the normalization
  QSeries expansion;
  std::vector<std::pair<std::int64_t, Coeff>> combination;  // (level-M index, coefficient)

  nlohmann::json to_json() const;
};

/// Weight 0 on the Inf side is accepted although M_0(M) contains the
/// constants: the result is the canonical-basis combination, i.e. the trace
/// up to an additive constant. Throws DomainError when M does not divide N.
TraceReport trace(std::int64_t N, std::int64_t M, std::int64_t k, Space space, std::int64_t m,
                  std::int64_t prec);

/// Trace of an arbitrary element of the (N, k, space) space given by its
/// expansion (which must reach past the level-M gap bound).
QSeries trace_form(std::int64_t N, std::int64_t M, std::int64_t k, Space space, const QSeries& f,
                   std::int64_t prec);

/// Whether trace() is defined for these arguments (and why not).
std::optional<std::string> trace_obstacle(std::int64_t N, std::int64_t M, std::int64_t k,
                                          Space space);

struct Classification {
  bool preserved = false;
  std::vector<std::string> cases;  // "f-side" (v_k(N) < v_k(M)), "g-side" (u_{2-k})
  std::string to_string() const;
};

Classification classify(std::int64_t N, std::int64_t M, std::int64_t k);

/// The explicit list: k = 0; k = -2 for N in {2, 3, 4}; k = -4 for (2, 1); M = N.
bool theorem_list_preserved(std::int64_t N, std::int64_t M, std::int64_t k);

struct BasisRef {
  std::int64_t level = 0;
  std::int64_t weight = 0;
  Space space = Space::Inf;
  std::int64_t index = 0;
  std::string to_string() const;  // e.g. "f^(1)_{-6,1}"
};

struct ObstructionPair {
  BasisRef f;  // in z
  BasisRef g;  // in tau
};

struct ObstructionList {
  std::int64_t N = 0;
  std::int64_t M = 0;
  std::int64_t k = 0;
  std::vector<ObstructionPair> fside;  // weight-k trace
  std::vector<ObstructionPair> gside;  // weight-(2-k) trace
  bool empty() const { return fside.empty() && gside.empty(); }
  nlohmann::json to_json() const;
};

ObstructionList obstructions(std::int64_t N, std::int64_t M, std::int64_t k);

/// Double series as a family: outer exponent -> series in the other variable.
using DoubleSeries = std::map<std::int64_t, QSeries>;

enum class GridSide { Weight, Dual };  // trace in weight k (z) or in 2 - k (tau)

struct GenfunCheck {
  bool holds = false;
  std::int64_t cells = 0;  // compared coefficients
  std::string mismatch;    // first differing cell when !holds
};

/// Compares trace-of-grid against H_{k,M} corrected by the obstruction
/// products, for outer indices and inner exponents in windows of length P.
/// Throws DomainError when the trace on that side is not determined.
GenfunCheck genfun_check(std::int64_t N, std::int64_t M, std::int64_t k, std::int64_t P,
                         GridSide side);

/// Level-4 closed form H_k = f_{k,-l}(z) g_{2-k,l+1}(tau) / (f_{0,1}(tau) - f_{0,1}(z)),
/// checked in both expansions after clearing the denominator.
GenfunCheck genfun_level4_closed_form(std::int64_t k, std::int64_t P);

/// Empirical preservation test: the traced grids satisfy a'(m,n) = -b'(n,m)
/// on a box x box window. nullopt when a trace is not determined on one side.
std::optional<bool> empirical_preserved(std::int64_t N, std::int64_t M, std::int64_t k,
                                        std::int64_t box, std::int64_t prec);

}  // namespace gridforge
