#include "gridforge/seedsynth.hpp"

#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "gridforge/error.hpp"
#include "gridforge/generators.hpp"
#include "gridforge/leveldata.hpp"
#include "gridforge/qseries_io.hpp"
#include "gridforge/series_cache.hpp"

namespace gridforge {

namespace {

constexpr std::int64_t kNoValuation = std::numeric_limits<std::int64_t>::max();

struct Generator {
  std::string label;
  std::int64_t weight;
  std::function<QSeries(std::int64_t)> build;
};

std::vector<std::int64_t> divisors(std::int64_t N) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = 1; d <= N; ++d) {
    if (N % d == 0) out.push_back(d);
  }
  return out;
}

std::string scaled_label(const std::string& name, std::int64_t d) {
  return name + (d == 1 ? "(z)" : "(" + std::to_string(d) + "z)");
}

std::vector<Generator> generators_for(std::int64_t N, std::int64_t k) {
  std::vector<Generator> gens;
  for (std::int64_t d : divisors(N)) {
    if (d == 1) continue;
    gens.push_back({"phi(" + std::to_string(d) + ")", 2,
                    [d](std::int64_t p) { return phi(d, p); }});
  }
  for (std::int64_t d : divisors(N)) {
    gens.push_back({scaled_label("E4", d), 4,
                    [d](std::int64_t p) { return eisenstein({4, d}, p); }});
    gens.push_back({scaled_label("E6", d), 6,
                    [d](std::int64_t p) { return eisenstein({6, d}, p); }});
  }
  const LevelData& level = get_level(N);
  for (const auto& [w, recipe] : level.seed_recipes) {
    if (w <= 0 || w >= k) continue;
    if (recipe.expr.kind() == SeedExpr::Kind::Phi) continue;  // already a generator
    gens.push_back({"F" + std::to_string(w), w,
                    [N, w = w](std::int64_t p) { return seed_form(N, w, p); }});
  }
  return gens;
}

// All products of generators with total weight w (multisets, ascending index).
std::vector<Generator> monomials(const std::vector<Generator>& gens, std::int64_t w) {
  std::vector<Generator> out;
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t start,
                                                            std::int64_t left) {
    if (left == 0) {
      std::vector<Generator> parts;
      std::string label;
      for (std::size_t i : chosen) {
        parts.push_back(gens[i]);
        if (!label.empty()) label += "*";
        label += gens[i].label;
      }
      if (label.empty()) label = "1";
      out.push_back({label, w, [parts](std::int64_t p) {
                       QSeries acc = QSeries::one(p);
                       for (const auto& g : parts) acc = mul(acc, g.build(p), p);
                       return acc;
                     }});
      return;
    }
    for (std::size_t i = start; i < gens.size(); ++i) {
      if (gens[i].weight > left) continue;
      chosen.push_back(i);
      rec(i, left - gens[i].weight);
      chosen.pop_back();
    }
  };
  if (w >= 0) rec(0, w);
  return out;
}

// psi^j for j <= J to absolute precision p; shared by all members of one
// family. psi^i computed from psi at p + J has precision p + J - i + 1.
class PsiPowers {
 public:
  PsiPowers(std::int64_t N, std::int64_t J) : N_(N), J_(J) {}

  QSeries get(std::int64_t j, std::int64_t p) {
    std::lock_guard lock(mutex_);
    if (p != prec_) {
      prec_ = p;
      powers_.assign(1, QSeries::one());
      psi_ = hauptmodul_series(N_, p + J_);
    }
    while (static_cast<std::int64_t>(powers_.size()) <= j) {
      powers_.push_back(mul(powers_.back(), psi_));
    }
    return powers_[static_cast<std::size_t>(j)].truncate(p);
  }

 private:
  std::int64_t N_;
  std::int64_t J_;
  std::mutex mutex_;
  std::int64_t prec_ = std::numeric_limits<std::int64_t>::min();
  QSeries psi_;
  std::vector<QSeries> powers_;
};

std::string psi_label(std::int64_t j) {
  if (j == 0) return "";
  return j == 1 ? "psi" : "psi^" + std::to_string(j);
}

std::string times(const std::string& a, const std::string& b) {
  if (a == "1" || a.empty()) return b.empty() ? "1" : b;
  if (b.empty()) return a;
  return a + "*" + b;
}

struct Plan {
  SpanningFamily family;
  std::vector<Coeff> combination;
  SynthesisAudit audit;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::pair<std::int64_t, std::int64_t>, std::shared_ptr<const Plan>>& plans() {
  static std::map<std::pair<std::int64_t, std::int64_t>, std::shared_ptr<const Plan>> p;
  return p;
}

std::optional<QSeries> printed_seed(std::int64_t N, std::int64_t k) {
  for (const auto& line : get_level(N).printed) {
    if (line.weight && *line.weight == k && !line.typo) return parse_text(line.text);
  }
  return std::nullopt;
}

std::shared_ptr<const Plan> make_plan(std::int64_t N, std::int64_t k) {
  const std::int64_t v = v_of(N, k);
  const auto printed = printed_seed(N, k);
  std::int64_t reduction_prec = std::max(valence_bound(N, k), v) + 2;
  if (printed) reduction_prec = std::max(reduction_prec, printed->prec());

  std::int64_t achieved = std::numeric_limits<std::int64_t>::min();
  for (std::int64_t J : {10, 20}) {
    auto plan = std::make_shared<Plan>();
    plan->family = build_family(N, k, J);
    Reduction red = reduce_family(plan->family, reduction_prec);
    achieved = red.element.empty() ? std::numeric_limits<std::int64_t>::min()
                                   : red.element.valuation();
    if (achieved < v) continue;
    if (achieved > v) {
      throw ValidationError("synthesis contradicts printed data: level " + std::to_string(N) +
                            " weight " + std::to_string(k) + " has a form of valuation " +
                            std::to_string(achieved) + " > v=" + std::to_string(v));
    }
    if (printed && red.element.truncate(printed->prec()) != *printed) {
      throw ValidationError("synthesis contradicts printed data: level " + std::to_string(N) +
                            " weight " + std::to_string(k) + " gives " +
                            to_text(red.element.truncate(printed->prec())) +
                            ", printed " + to_text(*printed));
    }
    plan->combination = red.combination;
    SynthesisAudit& a = plan->audit;
    a.N = N;
    a.k = k;
    a.J = J;
    a.reduction_prec = reduction_prec;
    a.rank = red.rank;
    a.valuation = achieved;
    a.member_valuations = red.member_valuations;
    for (std::size_t i = 0; i < plan->family.members.size(); ++i) {
      a.labels.push_back(plan->family.members[i].label);
      if (red.combination[i] != 0) {
        a.combination.emplace_back(plan->family.members[i].label, red.combination[i]);
      }
    }
    return plan;
  }
  const std::string got = achieved == std::numeric_limits<std::int64_t>::min()
                              ? "none"
                              : std::to_string(achieved);
  throw DomainError("spanning family deficient; achieved v'=" + got + " (need v=" +
                    std::to_string(v) + ") at level " + std::to_string(N) + " weight " +
                    std::to_string(k) + " with J=20");
}

std::shared_ptr<const Plan> get_plan(std::int64_t N, std::int64_t k) {
  const auto key = std::make_pair(N, k);
  {
    std::lock_guard lock(plan_mutex());
    auto it = plans().find(key);
    if (it != plans().end()) return it->second;
  }
  // Built outside the lock: lower-weight seeds may be synthesized on the way.
  auto plan = make_plan(N, k);
  std::lock_guard lock(plan_mutex());
  return plans().try_emplace(key, std::move(plan)).first->second;
}

detail::SeriesCache<std::pair<std::int64_t, std::int64_t>>& synth_cache() {
  static detail::SeriesCache<std::pair<std::int64_t, std::int64_t>> c;
  return c;
}

detail::SeriesCache<std::pair<std::int64_t, std::int64_t>>& seed_cache() {
  static detail::SeriesCache<std::pair<std::int64_t, std::int64_t>> c;
  return c;
}

}  // namespace

SpanningFamily build_family(std::int64_t N, std::int64_t k, std::int64_t J) {
  if (k % 2 != 0) throw DomainError("weight must be even, got " + std::to_string(k));
  if (J < 0) throw DomainError("pole bound J must be >= 0");
  get_level(N);
  const auto gens = generators_for(N, k);
  const auto pool = monomials(gens, k);
  const auto pool_lower = k >= 2 ? monomials(gens, k - 2) : std::vector<Generator>{};
  if (pool.empty() && pool_lower.empty()) {
    std::string tried;
    for (const auto& g : gens) tried += (tried.empty() ? "" : ", ") + g.label;
    throw DomainError("empty generator pool for level " + std::to_string(N) + " weight " +
                      std::to_string(k) + "; generators tried: " + tried);
  }

  SpanningFamily fam{N, k, J, {}};
  auto psi = std::make_shared<PsiPowers>(N, J);
  for (std::int64_t j = 0; j <= J; ++j) {
    for (const auto& h : pool) {
      fam.members.push_back({times(h.label, psi_label(j)), j,
                             [h, psi, j](std::int64_t p) {
                               return mul(h.build(p + j), psi->get(j, p), p);
                             }});
    }
  }
  for (std::int64_t j = 0; j <= J; ++j) {
    for (const auto& h : pool_lower) {
      if (j == 0 && h.label == "1") continue;  // theta_0(1) = 0
      const std::int64_t w = k - 2;
      fam.members.push_back(
          {"theta_" + std::to_string(w) + "(" + times(h.label, psi_label(j)) + ")", j,
           [h, psi, j, w](std::int64_t p) {
             const QSeries f = mul(h.build(p + j), psi->get(j, p), p);
             return serre_derivative(f, w);
           }});
    }
  }
  return fam;
}

Reduction reduce_family(const SpanningFamily& family, std::int64_t prec) {
  const std::size_t n = family.members.size();
  std::vector<QSeries> rows;
  rows.reserve(n);
  std::int64_t lo = 0;
  Reduction out;
  for (const auto& m : family.members) {
    rows.push_back(m.build(prec));
    if (rows.back().prec() < prec) {
      throw PrecisionError("family member " + m.label + " lost precision");
    }
    const bool zero = rows.back().empty();
    out.member_valuations.push_back(zero ? kNoValuation : rows.back().valuation());
    if (!zero) lo = std::min(lo, rows.back().valuation());
  }
  const auto width = static_cast<std::size_t>(prec - lo);

  struct Row {
    std::vector<Coeff> c;     // coefficients at exponents lo .. prec-1
    std::vector<Coeff> comb;  // coefficients on the members
  };
  std::map<std::size_t, Row> pivots;  // pivot column -> monic row
  for (std::size_t i = 0; i < n; ++i) {
    Row r{std::vector<Coeff>(width), std::vector<Coeff>(n)};
    for (const auto& t : rows[i].terms()) {
      if (t.exp < prec) r.c[static_cast<std::size_t>(t.exp - lo)] = t.coeff;
    }
    r.comb[i] = 1;
    std::size_t col = 0;
    while (true) {
      while (col < width && r.c[col] == 0) ++col;
      if (col == width) break;
      auto it = pivots.find(col);
      if (it == pivots.end()) {
        const Coeff inv = 1 / r.c[col];
        for (auto& x : r.c) x *= inv;
        for (auto& x : r.comb) x *= inv;
        pivots.emplace(col, std::move(r));
        break;
      }
      const Coeff f = r.c[col];
      const Row& p = it->second;
      for (std::size_t j = col; j < width; ++j) {
        if (p.c[j] != 0) r.c[j] -= f * p.c[j];
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (p.comb[j] != 0) r.comb[j] -= f * p.comb[j];
      }
    }
  }
  out.rank = static_cast<std::int64_t>(pivots.size());
  if (pivots.empty()) {
    out.element = QSeries::zero(prec);
    out.combination.assign(n, Coeff(0));
    return out;
  }
  const Row& top = pivots.rbegin()->second;
  std::vector<Term> terms;
  for (std::size_t j = 0; j < width; ++j) {
    if (top.c[j] != 0) terms.push_back({lo + static_cast<std::int64_t>(j), top.c[j]});
  }
  out.element = QSeries::from_terms(std::move(terms), prec);
  out.combination = top.comb;
  return out;
}

nlohmann::json SynthesisAudit::to_json() const {
  nlohmann::json members = nlohmann::json::array();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    nlohmann::json m = {{"label", labels[i]}};
    if (member_valuations[i] == kNoValuation) {
      m["valuation"] = nullptr;
    } else {
      m["valuation"] = member_valuations[i];
    }
    members.push_back(m);
  }
  nlohmann::json comb = nlohmann::json::array();
  for (const auto& [label, c] : combination) comb.push_back({label, coeff_to_string(c)});
  return {{"N", N},
          {"k", k},
          {"J", J},
          {"reduction_prec", reduction_prec},
          {"rank", rank},
          {"valuation", valuation},
          {"members", members},
          {"combination", comb}};
}

std::int64_t valence_bound(std::int64_t N, std::int64_t k) {
  // index of Gamma_0(N) in SL_2(Z): N prod_{p | N} (1 + 1/p)
  std::int64_t index = N;
  std::int64_t m = N;
  for (std::int64_t p = 2; p * p <= m; ++p) {
    if (m % p != 0) continue;
    while (m % p == 0) m /= p;
    index = index / p * (p + 1);
  }
  if (m > 1) index = index / m * (m + 1);
  const std::int64_t num = k * index;
  return num >= 0 ? num / 12 : -((-num + 11) / 12);
}

QSeries synthesize_seed(std::int64_t N, std::int64_t k, std::int64_t prec) {
  const auto plan = get_plan(N, k);
  return synth_cache().get({N, k}, prec, [&](std::int64_t p) {
    const std::int64_t full = detail::round_up_prec(p);
    QSeries out = QSeries::zero(full);
    for (std::size_t i = 0; i < plan->combination.size(); ++i) {
      if (plan->combination[i] == 0) continue;
      out.axpy(plan->combination[i], plan->family.members[i].build(full));
    }
    return out;
  });
}

const SynthesisAudit& synthesis_audit(std::int64_t N, std::int64_t k) {
  return get_plan(N, k)->audit;
}

QSeries seed_form(std::int64_t N, int w, std::int64_t prec) {
  const LevelData& level = get_level(N);
  auto it = level.seed_recipes.find(w);
  if (it == level.seed_recipes.end()) {
    throw DomainError("level " + std::to_string(N) + " has no seed of weight " +
                      std::to_string(w));
  }
  if (it->second.kind == SeedKind::Synthesized) return synthesize_seed(N, w, prec);
  return seed_cache().get({N, w}, prec, [&](std::int64_t p) {
    const SeedLookup lookup = [N](int ww, std::int64_t pp) { return seed_form(N, ww, pp); };
    return evaluate(it->second.expr, N, detail::round_up_prec(p), lookup);
  });
}

}  // namespace gridforge
