#pragma once

// Brute-force reference implementations. Nothing here calls into Monoid.

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "refmon/fgab.hpp"
#include "refmon/isystem.hpp"
#include "refmon/poset.hpp"

namespace oracle {

using refmon::BigInt;
using refmon::IntMatrix;
using refmon::IntVector;

/// Cofactor expansion; only for small matrices.
BigInt laplace_det(const IntMatrix& a);

/// Every element of a finite group reachable from 0 by adding generators.
std::set<std::vector<long>> subgroup_closure(const refmon::FgGroup& g, const std::vector<IntVector>& gens);

/// Lower sets of p as bitmasks, found through antichains (down-closure of every antichain).
std::set<std::uint32_t> lower_sets_via_antichains(const refmon::Poset& p);

/// Posets on n points up to isomorphism, each with every kind assignment up to isomorphism.
struct LabeledPoset {
  refmon::Poset poset;
  std::vector<refmon::Kind> kinds;
};
std::vector<LabeledPoset> posets_with_kinds(std::size_t n);

/// The primitive monoid of a trivial-group system: support plus multiplicities at free maxima.
class Pierce {
 public:
  struct Elem {
    std::uint32_t support = 0;
    std::map<std::size_t, int> mult;
    bool operator==(const Elem&) const = default;
  };

  Pierce(const refmon::Poset& p, std::vector<refmon::Kind> kinds);

  /// All elements whose multiplicities are at most max_mult.
  std::vector<Elem> elements(int max_mult) const;
  Elem add(const Elem& x, const Elem& y) const;
  bool leq(const Elem& x, const Elem& y) const;
  /// x <= y by searching z among the elements with multiplicities at most max_mult.
  bool leq_by_search(const Elem& x, const Elem& y, int max_mult) const;
  std::vector<std::size_t> maxima(std::uint32_t s) const;
  bool is_free(std::size_t i) const { return kinds_[i] == refmon::Kind::Free; }

 private:
  std::uint32_t down(std::size_t i) const;
  refmon::Poset p_;
  std::vector<refmon::Kind> kinds_;
};

/// Classes of the congruence generated by (x + chi(a,i,alpha), x + chi(a,j,phi_ji(alpha))), j in Max(a), on H_a.
/// Vertices have n <= outer at every free coordinate; returned are the vertices with n <= inner,
/// as ambient vectors paired with a class label.
struct CongruenceVertex {
  IntVector ambient;
  std::size_t label;
};
std::vector<CongruenceVertex> congruence_closure(const refmon::ISystem& sys, const refmon::ElemSet& a, int inner,
                                                 int outer);

}  // namespace oracle
