#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "refmon/isystem.hpp"

namespace refmon {

/// Element of M(J): a support lower set and a full-length ambient vector (zero off the support).
struct MonElem {
  ElemSet support;
  IntVector vec;
};

/// z11 + z12 = x1, z21 + z22 = x2, z11 + z21 = y1, z12 + z22 = y2.
struct RefinementSquare {
  MonElem z11, z12, z21, z22;
};

enum class ElemClass { Zero, FreeElt, RegElt };
std::string to_string(ElemClass c);

/// Quotient data of the component M_a: Z-presentation of Hhat_a / U_a.
struct SupportData {
  ElemSet support;
  std::vector<std::size_t> members;
  std::vector<std::size_t> maxima;
  std::vector<std::size_t> local_offset;  // per element of I, kNone outside the support
  std::vector<std::pair<std::size_t, std::size_t>> spans;  // ambient (offset, length) per member
  std::size_t dim = 0;
  QuotientPresentation quotient;

  IntVector localize(const IntVector& ambient) const;
};

/// The monoid M(J) of a validated system, with a per-support quotient cache.
class Monoid {
 public:
  explicit Monoid(SystemPtr sys);
  Monoid(const Monoid&) = delete;
  Monoid& operator=(const Monoid&) = delete;

  const ISystem& system() const { return *sys_; }
  const SystemPtr& system_ptr() const { return sys_; }
  const Poset& poset() const { return sys_->poset(); }

  MonElem zero() const;
  /// chi_i(x) with x in Ghat_i; throws BadCoordinate unless x lies in M_i.
  MonElem chi(std::size_t i, const IntVector& x) const;
  /// Checks the H_a invariants; throws BadCoordinate.
  MonElem make(const ElemSet& support, IntVector vec) const;
  void check(const MonElem& x) const;

  MonElem add(const MonElem& x, const MonElem& y) const;
  MonElem multiple(const MonElem& x, unsigned k) const;
  bool eq(const MonElem& x, const MonElem& y) const;
  /// Equal element with nonzero blocks only at maximal support elements.
  MonElem normalize(const MonElem& x) const;
  /// Coordinates of x in the quotient group of its component.
  IntVector class_coords(const MonElem& x) const;

  /// z with x + z = y, or nullopt.
  std::optional<MonElem> leq(const MonElem& x, const MonElem& y) const;

  bool valid_square(const RefinementSquare& s, const MonElem& x1, const MonElem& x2, const MonElem& y1,
                    const MonElem& y2) const;
  /// Throws PreconditionViolated unless x1 + x2 = y1 + y2.
  RefinementSquare refine(const MonElem& x1, const MonElem& x2, const MonElem& y1, const MonElem& y2) const;
  /// Constructive refinement for posets with the chain-up property; throws NotChainUp.
  RefinementSquare refine_chain_up(const MonElem& x1, const MonElem& x2, const MonElem& y1,
                                   const MonElem& y2) const;
  /// Elements delta_k (k < i) with sum phi_ik(delta_k) = beta in G_i.
  std::vector<std::pair<std::size_t, IntVector>> decompose_via_c2(std::size_t i, const IntVector& beta) const;
  /// The element sum_k chi_k(delta_k) of such a decomposition.
  MonElem from_decomposition(const std::vector<std::pair<std::size_t, IntVector>>& parts) const;

  /// One prime chi_i(0) or chi_i(1, 0) per element of I.
  std::vector<MonElem> prime_representatives() const;
  /// Every prime; throws PreconditionViolated if some group is infinite.
  std::vector<MonElem> primes() const;
  bool is_prime(const MonElem& x) const;
  std::vector<MonElem> generators() const;
  /// Multiplicity of each entry of generators() in a decomposition of x.
  std::vector<std::size_t> generator_decomposition(const MonElem& x) const;

  bool in_ideal(const MonElem& x, const LowerSet& l) const { return x.support.subset_of(l); }
  LowerSet ideal_generated_by(const MonElem& x) const { return x.support; }

  ElemClass classify(const MonElem& x) const;
  bool is_idempotent(const MonElem& x) const;

  std::shared_ptr<const SupportData> support_data(const ElemSet& a) const;
  /// Lower sets of I contained in s.
  std::vector<LowerSet> lower_subsets(const ElemSet& s) const;

  std::string to_string(const MonElem& x) const;
  std::string to_json(const MonElem& x) const;
  /// Parses {"support":[ids], "coords":{id:{"n":int,"g":[ints]}}}; throws ParseError.
  MonElem parse_json(const std::string& text) const;

 private:
  std::optional<MonElem> leq_with(const MonElem& x, const MonElem& y, const LowerSet& c) const;
  std::optional<RefinementSquare> refine_tuple(const MonElem& x1, const MonElem& x2, const MonElem& y1,
                                               const MonElem& y2, const std::array<LowerSet, 4>& c) const;
  RefinementSquare refine_component(std::size_t k, const MonElem& x1, const MonElem& x2, const MonElem& y1,
                                    const MonElem& y2) const;
  MonElem restrict_to(const MonElem& x, const ElemSet& s) const;
  IntVector block(const MonElem& x, std::size_t i) const;
  IntVector phi_sum(std::size_t k, const MonElem& x) const;
  void decompose_block(std::size_t k, const IntVector& v, std::vector<std::size_t>& counts) const;

  SystemPtr sys_;
  std::vector<LowerSet> lower_sets_;
  mutable std::shared_mutex mutex_;
  mutable std::map<ElemSet, std::shared_ptr<const SupportData>> cache_;
};

/// M(f) for a system hom f (elements of f.source mapped to f.target).
MonElem map_elem(const SystemHom& f, const Monoid& source, const Monoid& target, const MonElem& x);

/// The system read back from M(J): primes under <=*, kinds, component groups and maps (p + x) - p.
struct DerivedSystem {
  SystemPtr system;
  /// sigma_i : G_i -> G'_i in coordinates.
  std::vector<IntMatrix> sigma;
};

DerivedSystem derive_system(const Monoid& m);
/// True iff the derived system is isomorphic to J through the natural identification.
bool roundtrip_check(const Monoid& m, std::vector<std::string>* problems = nullptr);

}  // namespace refmon
