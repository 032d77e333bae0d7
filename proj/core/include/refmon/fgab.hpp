#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "refmon/matrix.hpp"

namespace refmon {

/// U * A * V = D with U, V unimodular and D diagonal with d_1 | d_2 | ...
struct SmithDecomposition {
  IntMatrix U;
  IntMatrix D;
  IntMatrix V;

  /// Number of nonzero diagonal entries.
  std::size_t rank() const;
  const BigInt& diag(std::size_t k) const { return D(k, k); }
};

SmithDecomposition smith(const IntMatrix& a);

/// Column echelon form: a * T = [E | 0] with T unimodular and E of full column rank.
struct ColumnEchelon {
  IntMatrix E;
  IntMatrix T;
  std::size_t rank = 0;
};

ColumnEchelon column_echelon(const IntMatrix& a);

/// Solution set {particular + kernel * t : t integral} of a congruence system, projected on x.
struct LatticeSolution {
  IntVector particular;
  IntMatrix kernel;  // n x p, columns form a lattice basis
};

/// Solves A x = b rowwise, where row r is an equation mod moduli[r] (0 = exact over Z).
std::optional<IntVector> solve_linear(const IntMatrix& a, const IntVector& b, const IntVector& moduli);

/// Full affine solution lattice of the same system, or nullopt if it is empty.
std::optional<LatticeSolution> solve_lattice(const IntMatrix& a, const IntVector& b,
                                             const IntVector& moduli);

enum class CoordTag { Free, Zero, Ge1, ZeroOrGe1 };

struct CoordConstraint {
  CoordTag tag = CoordTag::Free;
  /// For ZeroOrGe1: coordinates [linked_begin, linked_end) must vanish when this one does.
  std::size_t linked_begin = 0;
  std::size_t linked_end = 0;
};

/// Process-wide default for FeasibilityOptions::node_budget.
std::size_t default_node_budget();
void set_default_node_budget(std::size_t budget);

struct FeasibilityOptions {
  std::size_t node_budget = default_node_budget();
};

/// Exact decision of: A x = b (rowwise moduli), plus per-coordinate constraints.
/// Returns a witness or nullopt iff infeasible; throws ResourceLimit if the budget runs out.
std::optional<IntVector> feasible_constrained(const IntMatrix& a, const IntVector& b,
                                              const IntVector& moduli,
                                              std::span<const CoordConstraint> constraints,
                                              const FeasibilityOptions& options = {});

/// Z^rank + Z/d_1 + ... + Z/d_s with d_t >= 2 and d_t | d_{t+1}.
class FgGroup {
 public:
  FgGroup() = default;
  FgGroup(std::size_t rank, std::vector<BigInt> torsion);

  static FgGroup trivial() { return {}; }
  static FgGroup free(std::size_t rank) { return FgGroup(rank, {}); }
  static FgGroup cyclic(long order);

  std::size_t rank() const { return rank_; }
  const std::vector<BigInt>& torsion() const { return torsion_; }
  std::size_t dim() const { return rank_ + torsion_.size(); }
  bool is_trivial() const { return dim() == 0; }
  bool is_finite() const { return rank_ == 0; }
  /// Group order, or 0 if infinite.
  BigInt order() const;

  /// Modulus of coordinate k: 0 for free coordinates.
  BigInt modulus(std::size_t k) const { return k < rank_ ? BigInt(0) : torsion_[k - rank_]; }
  IntVector moduli() const;

  /// Z x G, the Grothendieck group of N x G.
  FgGroup with_free_factor() const { return FgGroup(rank_ + 1, torsion_); }

  IntVector zero() const { return IntVector(dim()); }
  IntVector reduce(IntVector v) const;
  bool is_canonical(const IntVector& v) const;
  bool equal(const IntVector& a, const IntVector& b) const;

  /// All elements of a finite group in lexicographic order.
  std::vector<IntVector> elements() const;
  /// A finite set generating the group as a semigroup.
  std::vector<IntVector> semigroup_generators() const;

  bool operator==(const FgGroup& other) const = default;
  std::string to_string() const;

 private:
  std::size_t rank_ = 0;
  std::vector<BigInt> torsion_;
};

/// Canonical element of an FgGroup: torsion coordinates reduced.
struct GroupElem {
  IntVector coords;
  bool operator==(const GroupElem& other) const = default;
};

/// Semigroup hom out of G (c absent) or out of N x G (c present): (n, g) -> n c + h g.
struct GroupHom {
  FgGroup source;
  FgGroup target;
  IntMatrix h;                 // target.dim() x source.dim()
  std::optional<IntVector> c;  // present iff the source is N x G

  /// Matrix of the Grothendieck extension on Z x G (c as column 0) or of h.
  IntMatrix hat() const;
  IntVector apply(const IntVector& g) const;
  IntVector apply_hat(const IntVector& u) const;
  /// True if h is compatible with the torsion of source and target.
  bool well_defined() const;
};

/// Coefficients of v in the subgroup generated by gens, or nullopt.
std::optional<IntVector> subgroup_membership(const FgGroup& group, const std::vector<IntVector>& gens,
                                             const IntVector& v);

/// True if m (target.dim() x source.dim()) is a well-defined bijective hom source -> target.
bool is_isomorphism(const FgGroup& source, const FgGroup& target, const IntMatrix& m);

/// Group presented as Z^n / (column span of relations): invariant factors plus projection.
struct QuotientPresentation {
  IntMatrix projection;  // rows = kept Smith coordinates
  IntVector moduli;      // one per kept row, 0 for free rows
  FgGroup group() const;
  /// Canonical coordinates of v in the quotient.
  IntVector project(const IntVector& v) const;
  /// A vector of Z^n mapping onto the given quotient coordinates.
  IntMatrix section;  // n x rows
};

QuotientPresentation quotient_presentation(const IntMatrix& relations, std::size_t n);

}  // namespace refmon
