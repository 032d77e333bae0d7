#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "refmon/monoid.hpp"

namespace refmon {

using Rng = std::mt19937_64;

/// Uniform integer in [lo, hi]; independent of the standard library's distribution algorithms.
long uniform(Rng& rng, long lo, long hi);

struct RandomSystemOptions {
  std::size_t min_size = 1;
  std::size_t max_size = 5;
  /// Every element has at most one upper cover.
  bool chain_up = false;
  /// Probability that an element is free; 0 gives a system without free elements.
  double free_probability = 0.5;
  bool trivial_groups = false;
  /// Only finite groups.
  bool finite_groups = false;
  /// Retries per element before its group falls back to the trivial group.
  std::size_t retries = 30;
};

/// Random poset on ids e0, e1, ... in which i < j implies index i < index j.
Poset random_poset(Rng& rng, std::size_t n, bool chain_up);

/// Random valid system: groups from {0, Z/2, Z/3, Z/4, Z}, cover maps with entries in [-2, 2].
SystemPtr random_system(Rng& rng, const RandomSystemOptions& options = {});

/// Support uniform among lower subsets of `within`; |n| <= 3 clamped to H_a, torsion uniform, |free| <= 3.
MonElem random_element(const Monoid& m, Rng& rng, const LowerSet& within);
MonElem random_element(const Monoid& m, Rng& rng);
/// Random element of M_i (n >= 1 for free i).
IntVector random_coordinate(const ISystem& sys, Rng& rng, std::size_t i, bool positive_n);

struct Equation {
  MonElem x1, x2, y1, y2;
};

/// Row and column sums of a random square.
Equation planted_equation(const Monoid& m, Rng& rng);
/// x1, x2, y1 random and y2 a leq witness of y1 <= x1 + x2; nullopt when y1 is not below the sum.
std::optional<Equation> sampled_equation(const Monoid& m, Rng& rng);

}  // namespace refmon
