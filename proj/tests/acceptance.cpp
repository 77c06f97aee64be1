// Prints one line per acceptance criterion. Exits 0 when every criterion
// passes or fails only on pinned errata of the printed data.

#include <iostream>

#include "gridforge/acceptance.hpp"

int main() {
  const auto results = gridforge::run_acceptance();
  for (const auto& r : results) std::cout << r.line() << '\n';
  const bool ok = gridforge::acceptance_ok(results);
  std::cout << (ok ? "acceptance: all failures are documented errata\n"
                   : "acceptance: unexpected failures\n");
  return ok ? 0 : 1;
}
