#include "gridforge/basis.hpp"

#include <cstdlib>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>

#include "gridforge/error.hpp"
#include "gridforge/leveldata.hpp"
#include "gridforge/qseries_io.hpp"
#include "gridforge/seedsynth.hpp"

namespace gridforge {

namespace {

constexpr std::int64_t kAuditMargin = 5;

// F_w / q^val(F_w) to relative precision r (a unit with leading coefficient 1).
QSeries normalized_seed(std::int64_t N, int w, std::int64_t r) {
  const std::int64_t val = v_of(N, w);
  QSeries f = seed_form(N, w, val + r);
  if (f.empty() || f.valuation() != val || f.leading() != 1) {
    throw ValidationError("seed F" + std::to_string(w) + " of level " + std::to_string(N) +
                          " is not q^" + std::to_string(val) + " + ...");
  }
  return f.shift(-val);
}

using BasisKey = std::tuple<std::int64_t, std::int64_t, Space>;

struct BasisCache {
  std::shared_mutex mutex;
  std::map<BasisKey, CanonicalBasis> entries;
};

BasisCache& basis_cache() {
  static BasisCache c;
  return c;
}

CanonicalBasis slice(const CanonicalBasis& full, std::int64_t count, std::int64_t prec) {
  CanonicalBasis out = full;
  out.prec = prec;
  out.elements.resize(static_cast<std::size_t>(count));
  for (auto& e : out.elements) e = e.truncate(prec);
  return out;
}

CanonicalBasis compute_basis(std::int64_t N, std::int64_t k, Space space, std::int64_t count,
                             std::int64_t prec) {
  CanonicalBasis b;
  b.N = N;
  b.k = k;
  b.space = space;
  b.B = gap_bound(N, k, space);
  b.prec = prec;

  // Each multiplication by psi costs one unit of precision.
  const std::int64_t work = prec + count;
  const QSeries psi = hauptmodul_series(N, work + std::abs(b.m0()) + count + 2);
  b.elements.reserve(static_cast<std::size_t>(count));
  b.elements.push_back(first_element(N, k, space, work));
  while (static_cast<std::int64_t>(b.elements.size()) < count) {
    b.elements.push_back(next_element(b, psi));
  }
  for (auto& e : b.elements) {
    if (e.prec() < prec) {
      throw PrecisionError("basis element lost precision: have " + std::to_string(e.prec()) +
                           ", need " + std::to_string(prec));
    }
    e = e.truncate(prec);
  }
  return b;
}

}  // namespace

std::string to_string(Space s) { return s == Space::Inf ? "inf" : "hat"; }

Space parse_space(const std::string& text) {
  if (text == "inf") return Space::Inf;
  if (text == "hat") return Space::Hat;
  throw DomainError("space must be inf or hat, got '" + text + "'");
}

const QSeries& CanonicalBasis::element(std::int64_t m) const {
  if (!has(m)) {
    throw DomainError("basis index " + std::to_string(m) + " outside built range [" +
                      std::to_string(m0()) + ", " + std::to_string(m_end()) + ")");
  }
  return elements[static_cast<std::size_t>(m - m0())];
}

nlohmann::json CanonicalBasis::to_json() const {
  nlohmann::json els = nlohmann::json::array();
  for (std::int64_t m = m0(); m < m_end(); ++m) {
    els.push_back({{"m", m}, {"series", gridforge::to_json(element(m))}});
  }
  return {{"N", N}, {"k", k}, {"space", to_string(space)}, {"B", B},
          {"prec", prec}, {"elements", els}};
}

std::int64_t gap_bound(std::int64_t N, std::int64_t k, Space space) {
  return space == Space::Inf ? v_of(N, k) : u_of(N, k);
}

std::int64_t required_prec(std::int64_t N, std::int64_t k, Space space, std::int64_t count) {
  return count + std::abs(gap_bound(N, k, space)) + kAuditMargin;
}

QSeries first_element(std::int64_t N, std::int64_t k, Space space, std::int64_t prec) {
  const LevelData& d = get_level(N);
  if (space == Space::Hat) {
    const std::int64_t c = d.cusp_count - 1;
    if (c == 0) return first_element(N, k, Space::Inf, prec);
    const std::int64_t v = d.v(k);
    const QSeries f = first_element(N, k, Space::Inf, prec + c);
    const QSeries killer = cusp_killer(N, std::max<std::int64_t>(prec - v, 1));
    return mul(f, killer, prec);
  }
  const auto [l, kp] = d.decompose(k);
  const std::int64_t v = d.v(k);
  const std::int64_t r = prec - v;  // relative precision needed
  if (r <= 0) return QSeries::zero(prec);
  QSeries out = normalized_seed(N, kp, r);
  if (l != 0) out = mul(pow(normalized_seed(N, d.seed_period, r), l, r), out, r);
  return out.shift(v);
}

QSeries next_element(const CanonicalBasis& so_far, const QSeries& psi) {
  if (so_far.elements.empty()) throw Error("next_element needs a first element");
  const std::int64_t m = so_far.m_end();
  QSeries p = mul(psi, so_far.elements.back());
  for (std::int64_t s = -(m - 1); s <= so_far.B; ++s) {
    if (s >= p.prec()) break;
    const Coeff c = p.coeff(s);
    if (c != 0) p.axpy(-c, so_far.element(-s));
  }
  if (p.empty() || p.valuation() != -m || p.leading() != 1) {
    throw ValidationError("basis recursion produced a non-monic element at m=" +
                          std::to_string(m));
  }
  return p;
}

CanonicalBasis build_basis(std::int64_t N, std::int64_t k, Space space, std::int64_t count,
                           std::int64_t prec) {
  if (count < 1) throw DomainError("count must be >= 1");
  const std::int64_t need = required_prec(N, k, space, count);
  if (prec < need) {
    throw PrecisionError("insufficient precision for " + std::to_string(count) +
                         " elements at level " + std::to_string(N) + " weight " +
                         std::to_string(k) + ": need prec >= " + std::to_string(need));
  }
  const BasisKey key{N, k, space};
  auto& cache = basis_cache();
  std::int64_t build_count = count;
  std::int64_t build_prec = prec;
  {
    std::shared_lock lock(cache.mutex);
    auto it = cache.entries.find(key);
    if (it != cache.entries.end()) {
      const CanonicalBasis& have = it->second;
      const auto have_count = static_cast<std::int64_t>(have.elements.size());
      if (have_count >= count && have.prec >= prec) return slice(have, count, prec);
      build_count = std::max(build_count, have_count);
      build_prec = std::max(build_prec, have.prec);
    }
  }
  CanonicalBasis fresh = compute_basis(N, k, space, build_count, build_prec);
  {
    std::unique_lock lock(cache.mutex);
    auto [it, inserted] = cache.entries.try_emplace(key, fresh);
    if (!inserted && (it->second.elements.size() < fresh.elements.size() ||
                      it->second.prec < fresh.prec)) {
      it->second = fresh;
    }
  }
  return slice(fresh, count, prec);
}

ModularGrid build_grid(std::int64_t N, std::int64_t k, std::int64_t count, std::int64_t prec) {
  return {N, k, build_basis(N, k, Space::Inf, count, prec),
          build_basis(N, 2 - k, Space::Hat, count, prec)};
}

DualityResult duality_residual(const ModularGrid& grid, std::int64_t m_count,
                               std::int64_t n_count) {
  const CanonicalBasis& f = grid.fside;
  const CanonicalBasis& g = grid.gside;
  DualityResult out;
  if (m_count <= 0 || n_count <= 0) return out;
  const std::int64_t m_last = f.m0() + m_count - 1;
  const std::int64_t n_last = g.m0() + n_count - 1;
  if (!f.has(m_last) || !g.has(n_last) || f.prec <= n_last || g.prec <= m_last) {
    throw DomainError("duality box " + std::to_string(m_count) + "x" +
                      std::to_string(n_count) + " exceeds the built grid");
  }
  for (std::int64_t m = f.m0(); m <= m_last; ++m) {
    for (std::int64_t n = g.m0(); n <= n_last; ++n) {
      const Coeff a = f.element(m).coeff(n);
      const Coeff b = g.element(n).coeff(m);
      const Coeff r = abs(Coeff(a + b));
      ++out.cells;
      if (r > out.residual) {
        out.residual = r;
        out.witness = DualityCell{m, n, a, b};
      }
    }
  }
  return out;
}

}  // namespace gridforge
