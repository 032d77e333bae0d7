#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "refmon/monoid.hpp"
#include "refmon/random.hpp"

namespace refmon {

/// Outcome of one sampled property on one system.
struct PropertyResult {
  std::string name;
  std::size_t checked = 0;
  std::size_t failed = 0;
  /// Set when the property does not apply (e.g. regularity with free elements present).
  std::string skipped;
  std::string first_failure;

  bool ok() const { return failed == 0; }
};

struct PropertyOptions {
  std::size_t samples = 100;
  /// Ideal-lattice check only runs up to this many elements.
  std::size_t ideal_lattice_max = 4;
};

/// Runs every structural property of M(J) on sampled elements. Deterministic in the rng state.
std::vector<PropertyResult> run_properties(const Monoid& m, Rng& rng, const PropertyOptions& options = {});

}  // namespace refmon
