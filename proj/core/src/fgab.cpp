#include "refmon/fgab.hpp"

#include <algorithm>
#include <atomic>
#include <utility>

#include "lp.hpp"
#include "refmon/errors.hpp"

namespace refmon {

// ---------------------------------------------------------------- Smith

std::size_t SmithDecomposition::rank() const {
  std::size_t r = 0;
  while (r < D.rows() && r < D.cols() && sgn(D(r, r)) != 0) ++r;
  return r;
}

namespace {

BigInt abs_of(const BigInt& x) { return sgn(x) < 0 ? BigInt(-x) : x; }

BigInt tdiv(const BigInt& a, const BigInt& b) {
  BigInt q;
  mpz_tdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

bool divides(const BigInt& d, const BigInt& x) {
  return mpz_divisible_p(x.get_mpz_t(), d.get_mpz_t()) != 0;
}

}  // namespace

SmithDecomposition smith(const IntMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  IntMatrix d = a;
  IntMatrix u = IntMatrix::identity(m);
  IntMatrix v = IntMatrix::identity(n);

  for (std::size_t t = 0; t < std::min(m, n); ++t) {
    std::size_t pr = m, pc = n;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j)
        if (sgn(d(i, j)) != 0 && (pr == m || abs_of(d(i, j)) < abs_of(d(pr, pc)))) {
          pr = i;
          pc = j;
        }
    if (pr == m) break;
    d.swap_rows(t, pr);
    u.swap_rows(t, pr);
    d.swap_cols(t, pc);
    v.swap_cols(t, pc);

    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (sgn(d(i, t)) == 0) continue;
        BigInt q = tdiv(d(i, t), d(t, t));
        d.add_row_multiple(i, t, -q);
        u.add_row_multiple(i, t, -q);
        if (sgn(d(i, t)) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (sgn(d(t, j)) == 0) continue;
        BigInt q = tdiv(d(t, j), d(t, t));
        d.add_col_multiple(j, t, -q);
        v.add_col_multiple(j, t, -q);
        if (sgn(d(t, j)) != 0) clean = false;
      }
      if (!clean) {
        std::size_t br = t, bc = t;
        for (std::size_t i = t + 1; i < m; ++i)
          if (sgn(d(i, t)) != 0 && abs_of(d(i, t)) < abs_of(d(br, bc))) {
            br = i;
            bc = t;
          }
        for (std::size_t j = t + 1; j < n; ++j)
          if (sgn(d(t, j)) != 0 && abs_of(d(t, j)) < abs_of(d(br, bc))) {
            br = t;
            bc = j;
          }
        d.swap_rows(t, br);
        u.swap_rows(t, br);
        d.swap_cols(t, bc);
        v.swap_cols(t, bc);
        continue;
      }
      bool fixed = false;
      for (std::size_t i = t + 1; i < m && !fixed; ++i)
        for (std::size_t j = t + 1; j < n && !fixed; ++j)
          if (!divides(d(t, t), d(i, j))) {
            d.add_row_multiple(t, i, 1);
            u.add_row_multiple(t, i, 1);
            fixed = true;
          }
      if (!fixed) break;
    }
    if (sgn(d(t, t)) < 0) {
      d.negate_row(t);
      u.negate_row(t);
    }
  }
  return {std::move(u), std::move(d), std::move(v)};
}

ColumnEchelon column_echelon(const IntMatrix& a) {
  IntMatrix e = a;
  IntMatrix t = IntMatrix::identity(a.cols());
  std::size_t pc = 0;
  for (std::size_t r = 0; r < e.rows() && pc < e.cols(); ++r) {
    for (;;) {
      std::size_t best = e.cols();
      for (std::size_t j = pc; j < e.cols(); ++j)
        if (sgn(e(r, j)) != 0 && (best == e.cols() || abs_of(e(r, j)) < abs_of(e(r, best)))) best = j;
      if (best == e.cols()) break;
      e.swap_cols(pc, best);
      t.swap_cols(pc, best);
      bool clean = true;
      for (std::size_t j = pc + 1; j < e.cols(); ++j) {
        if (sgn(e(r, j)) == 0) continue;
        BigInt q = tdiv(e(r, j), e(r, pc));
        e.add_col_multiple(j, pc, -q);
        t.add_col_multiple(j, pc, -q);
        if (sgn(e(r, j)) != 0) clean = false;
      }
      if (clean) {
        ++pc;
        break;
      }
    }
  }
  return {std::move(e), std::move(t), pc};
}

// ---------------------------------------------------------------- lattices

std::optional<LatticeSolution> solve_lattice(const IntMatrix& a, const IntVector& b,
                                             const IntVector& moduli) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (b.size() != m || moduli.size() != m) throw PreconditionViolated("solve_lattice: dimension mismatch");
  std::size_t k = 0;
  for (const auto& md : moduli)
    if (sgn(md) != 0) ++k;
  IntMatrix ext(m, n + k);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) ext(i, j) = a(i, j);
  std::size_t col = n;
  for (std::size_t i = 0; i < m; ++i)
    if (sgn(moduli[i]) != 0) ext(i, col++) = moduli[i];

  SmithDecomposition s = smith(ext);
  IntVector c = s.U * b;
  const std::size_t r = s.rank();
  IntVector y(n + k);
  for (std::size_t i = 0; i < r; ++i) {
    if (!divides(s.D(i, i), c[i])) return std::nullopt;
    mpz_divexact(y[i].get_mpz_t(), c[i].get_mpz_t(), s.D(i, i).get_mpz_t());
  }
  for (std::size_t i = r; i < m; ++i)
    if (sgn(c[i]) != 0) return std::nullopt;
  IntVector full = s.V * y;
  LatticeSolution out;
  out.particular.assign(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(n));
  IntMatrix gens = s.V.block(0, n, r, n + k);
  ColumnEchelon ce = column_echelon(gens);
  out.kernel = ce.E.block(0, n, 0, ce.rank);
  return out;
}

std::optional<IntVector> solve_linear(const IntMatrix& a, const IntVector& b, const IntVector& moduli) {
  auto sol = solve_lattice(a, b, moduli);
  if (!sol) return std::nullopt;
  return sol->particular;
}

// ---------------------------------------------------------------- feasibility

namespace {
std::atomic<std::size_t> g_default_budget{200000};
}  // namespace

std::size_t default_node_budget() { return g_default_budget.load(std::memory_order_relaxed); }
void set_default_node_budget(std::size_t budget) { g_default_budget.store(budget, std::memory_order_relaxed); }

namespace {

BigInt floor_of(const mpq_class& q) {
  BigInt f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f;
}

bool satisfies(const IntMatrix& g, const IntVector& h, const IntVector& t) {
  IntVector gt = g * t;
  for (std::size_t r = 0; r < h.size(); ++r)
    if (gt[r] < h[r]) return false;
  return true;
}

class FeasibilitySolver {
 public:
  FeasibilitySolver(const IntMatrix& a, const IntVector& b, const IntVector& moduli, std::size_t budget)
      : a_(a), b_(b), moduli_(moduli), budget_(budget) {}

  std::optional<IntVector> search(std::vector<CoordTag>& tags, std::span<const CoordConstraint> cons,
                                  const std::vector<std::size_t>& pending, std::size_t pos) {
    auto sol = solve_resolved(tags);
    if (!sol) return std::nullopt;
    bool ok = true;
    for (std::size_t q = pos; q < pending.size() && ok; ++q) ok = zero_or_ge1_holds(*sol, cons[pending[q]], pending[q]);
    if (ok) return sol;

    const std::size_t i = pending[pos];
    const CoordConstraint& c = cons[i];
    std::vector<CoordTag> saved(tags.begin() + static_cast<std::ptrdiff_t>(c.linked_begin),
                                tags.begin() + static_cast<std::ptrdiff_t>(c.linked_end));
    tags[i] = CoordTag::Zero;
    for (std::size_t j = c.linked_begin; j < c.linked_end; ++j) tags[j] = CoordTag::Zero;
    auto r = search(tags, cons, pending, pos + 1);
    std::copy(saved.begin(), saved.end(), tags.begin() + static_cast<std::ptrdiff_t>(c.linked_begin));
    if (r) {
      tags[i] = CoordTag::Free;
      return r;
    }
    tags[i] = CoordTag::Ge1;
    r = search(tags, cons, pending, pos + 1);
    tags[i] = CoordTag::Free;
    return r;
  }

 private:
  static bool zero_or_ge1_holds(const IntVector& x, const CoordConstraint& c, std::size_t i) {
    if (x[i] >= 1) return true;
    if (sgn(x[i]) != 0) return false;
    for (std::size_t j = c.linked_begin; j < c.linked_end; ++j)
      if (sgn(x[j]) != 0) return false;
    return true;
  }

  /// Decides the system with every coordinate tagged Free, Zero or Ge1.
  std::optional<IntVector> solve_resolved(const std::vector<CoordTag>& tags) {
    const std::size_t n = a_.cols();
    std::vector<std::size_t> zeros, ge1;
    for (std::size_t i = 0; i < n; ++i) {
      if (tags[i] == CoordTag::Zero) zeros.push_back(i);
      if (tags[i] == CoordTag::Ge1) ge1.push_back(i);
    }
    IntMatrix ext(a_.rows() + zeros.size(), n);
    IntVector rhs(ext.rows()), mods(ext.rows());
    for (std::size_t r = 0; r < a_.rows(); ++r) {
      for (std::size_t j = 0; j < n; ++j) ext(r, j) = a_(r, j);
      rhs[r] = b_[r];
      mods[r] = moduli_[r];
    }
    for (std::size_t z = 0; z < zeros.size(); ++z) ext(a_.rows() + z, zeros[z]) = 1;

    auto lat = solve_lattice(ext, rhs, mods);
    if (!lat) return std::nullopt;
    const IntVector& x0 = lat->particular;
    const IntMatrix& basis = lat->kernel;

    bool x0_ok = true;
    for (std::size_t i : ge1)
      if (x0[i] < 1) x0_ok = false;
    if (x0_ok) return x0;

    IntMatrix g_full(ge1.size(), basis.cols());
    IntVector h(ge1.size());
    for (std::size_t r = 0; r < ge1.size(); ++r) {
      for (std::size_t j = 0; j < basis.cols(); ++j) g_full(r, j) = basis(ge1[r], j);
      h[r] = 1 - x0[ge1[r]];
    }
    // Reparameterize so the inequality matrix has independent columns.
    ColumnEchelon ce = column_echelon(g_full);
    IntMatrix g = ce.E.block(0, g_full.rows(), 0, ce.rank);

    auto t_small = branch_and_bound(g, h);
    if (!t_small) return std::nullopt;
    IntVector t_pad(basis.cols());
    for (std::size_t k = 0; k < ce.rank; ++k) t_pad[k] = (*t_small)[k];
    IntVector t = ce.T * t_pad;
    return x0 + basis * t;
  }

  /// Integer t with g t >= h inside a certified box.
  std::optional<IntVector> branch_and_bound(const IntMatrix& g, const IntVector& h) {
    const std::size_t p = g.cols();
    const std::size_t s = g.rows();
    if (p == 0) {
      for (const auto& v : h)
        if (sgn(v) > 0) return std::nullopt;
      return IntVector{};
    }
    // Small-solution bound for {y >= 0 : A y = b}: n (m a)^(2m+1), applied to
    // the standard form g (u - w) - slack = h with n = 2p + s columns.
    BigInt amax = 1;
    for (std::size_t r = 0; r < s; ++r) {
      for (std::size_t k = 0; k < p; ++k) amax = std::max(amax, abs_of(g(r, k)));
      amax = std::max(amax, abs_of(h[r]));
    }
    BigInt ma = amax * static_cast<unsigned long>(std::max<std::size_t>(s, 1));
    BigInt bound;
    mpz_pow_ui(bound.get_mpz_t(), ma.get_mpz_t(), 2 * std::max<std::size_t>(s, 1) + 1);
    bound *= static_cast<unsigned long>(2 * p + s);

    struct Node {
      IntVector lo, hi;
    };
    std::vector<Node> stack;
    stack.push_back({IntVector(p, -bound), IntVector(p, bound)});
    while (!stack.empty()) {
      Node node = std::move(stack.back());
      stack.pop_back();
      if (++nodes_ > budget_) throw ResourceLimit("feasibility search exceeded its node budget");
      auto pt = detail::lp_min_l1(g, h, node.lo, node.hi);
      if (!pt) continue;
      std::size_t frac = p;
      IntVector rounded(p);
      for (std::size_t k = 0; k < p; ++k) {
        const mpq_class& q = (*pt)[k];
        if (q.get_den() != 1 && frac == p) frac = k;
        mpq_class shifted = q + mpq_class(1, 2);
        rounded[k] = std::clamp(floor_of(shifted), node.lo[k], node.hi[k]);
      }
      if (frac == p) {
        IntVector t(p);
        for (std::size_t k = 0; k < p; ++k) t[k] = (*pt)[k].get_num();
        return t;
      }
      if (satisfies(g, h, rounded)) return rounded;
      BigInt f = floor_of((*pt)[frac]);
      Node up = node;
      up.lo[frac] = f + 1;
      Node down = std::move(node);
      down.hi[frac] = f;
      if (up.lo[frac] <= up.hi[frac]) stack.push_back(std::move(up));
      if (down.lo[frac] <= down.hi[frac]) stack.push_back(std::move(down));
    }
    return std::nullopt;
  }

  const IntMatrix& a_;
  const IntVector& b_;
  const IntVector& moduli_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
};

bool congruent_rows(const IntMatrix& a, const IntVector& b, const IntVector& moduli, const IntVector& x) {
  IntVector ax = a * x;
  for (std::size_t r = 0; r < ax.size(); ++r)
    if (reduce_mod(ax[r] - b[r], moduli[r]) != 0) return false;
  return true;
}

}  // namespace

std::optional<IntVector> feasible_constrained(const IntMatrix& a, const IntVector& b, const IntVector& moduli,
                                              std::span<const CoordConstraint> constraints,
                                              const FeasibilityOptions& options) {
  const std::size_t n = a.cols();
  if (constraints.size() != n || b.size() != a.rows() || moduli.size() != a.rows())
    throw PreconditionViolated("feasible_constrained: dimension mismatch");
  std::vector<CoordTag> tags(n);
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < n; ++i) {
    const CoordConstraint& c = constraints[i];
    if (c.tag == CoordTag::ZeroOrGe1) {
      if (c.linked_begin > c.linked_end || c.linked_end > n)
        throw PreconditionViolated("feasible_constrained: bad linked block");
      pending.push_back(i);
      tags[i] = CoordTag::Free;
    } else {
      tags[i] = c.tag;
    }
  }
  FeasibilitySolver solver(a, b, moduli, options.node_budget);
  auto x = solver.search(tags, constraints, pending, 0);
  if (!x) return std::nullopt;

  if (!congruent_rows(a, b, moduli, *x)) throw InternalInvariantViolation("feasibility witness fails equations");
  for (std::size_t i = 0; i < n; ++i) {
    const CoordConstraint& c = constraints[i];
    bool ok = true;
    switch (c.tag) {
      case CoordTag::Free: break;
      case CoordTag::Zero: ok = sgn((*x)[i]) == 0; break;
      case CoordTag::Ge1: ok = (*x)[i] >= 1; break;
      case CoordTag::ZeroOrGe1:
        if (sgn((*x)[i]) == 0) {
          for (std::size_t j = c.linked_begin; j < c.linked_end; ++j) ok = ok && sgn((*x)[j]) == 0;
        } else {
          ok = (*x)[i] >= 1;
        }
        break;
    }
    if (!ok) throw InternalInvariantViolation("feasibility witness fails a coordinate constraint");
  }
  return x;
}

// ---------------------------------------------------------------- groups

FgGroup::FgGroup(std::size_t rank, std::vector<BigInt> torsion) : rank_(rank), torsion_(std::move(torsion)) {
  for (std::size_t t = 0; t < torsion_.size(); ++t) {
    if (torsion_[t] < 2) throw PreconditionViolated("torsion invariant factors must be >= 2");
    if (t > 0 && !divides(torsion_[t - 1], torsion_[t]))
      throw PreconditionViolated("torsion invariant factors must form a divisibility chain");
  }
}

FgGroup FgGroup::cyclic(long order) {
  if (order == 0) return FgGroup(1, {});
  if (order == 1) return FgGroup();
  return FgGroup(0, {BigInt(order)});
}

BigInt FgGroup::order() const {
  if (rank_ > 0) return 0;
  BigInt o = 1;
  for (const auto& d : torsion_) o *= d;
  return o;
}

IntVector FgGroup::moduli() const {
  IntVector m(dim());
  for (std::size_t k = 0; k < dim(); ++k) m[k] = modulus(k);
  return m;
}

IntVector FgGroup::reduce(IntVector v) const {
  if (v.size() != dim()) throw PreconditionViolated("group element has wrong length");
  for (std::size_t t = 0; t < torsion_.size(); ++t) v[rank_ + t] = reduce_mod(v[rank_ + t], torsion_[t]);
  return v;
}

bool FgGroup::is_canonical(const IntVector& v) const {
  if (v.size() != dim()) return false;
  for (std::size_t t = 0; t < torsion_.size(); ++t) {
    const BigInt& x = v[rank_ + t];
    if (sgn(x) < 0 || x >= torsion_[t]) return false;
  }
  return true;
}

bool FgGroup::equal(const IntVector& a, const IntVector& b) const { return reduce(a) == reduce(b); }

std::vector<IntVector> FgGroup::elements() const {
  if (rank_ > 0) throw PreconditionViolated("cannot enumerate an infinite group");
  std::vector<IntVector> out;
  IntVector cur(dim());
  for (;;) {
    out.push_back(cur);
    std::size_t k = dim();
    while (k > 0) {
      --k;
      cur[k] += 1;
      if (cur[k] < torsion_[k]) break;
      cur[k] = 0;
      if (k == 0) return out;
    }
    if (dim() == 0) return out;
  }
}

std::vector<IntVector> FgGroup::semigroup_generators() const {
  std::vector<IntVector> gens;
  if (dim() == 0) {
    gens.push_back(zero());
    return gens;
  }
  for (std::size_t k = 0; k < rank_; ++k) {
    IntVector e = zero();
    e[k] = 1;
    gens.push_back(e);
  }
  if (rank_ > 0) {
    IntVector neg = zero();
    for (std::size_t k = 0; k < rank_; ++k) neg[k] = -1;
    gens.push_back(neg);
  }
  for (std::size_t t = 0; t < torsion_.size(); ++t) {
    IntVector e = zero();
    e[rank_ + t] = 1;
    gens.push_back(e);
  }
  return gens;
}

std::string FgGroup::to_string() const {
  if (dim() == 0) return "0";
  std::string s;
  if (rank_ > 0) s = rank_ == 1 ? "Z" : "Z^" + std::to_string(rank_);
  for (const auto& d : torsion_) {
    if (!s.empty()) s += " + ";
    s += "Z/" + d.get_str();
  }
  return s;
}

IntMatrix GroupHom::hat() const {
  if (!c) return h;
  IntMatrix m(target.dim(), source.dim() + 1);
  for (std::size_t r = 0; r < target.dim(); ++r) {
    m(r, 0) = (*c)[r];
    for (std::size_t j = 0; j < source.dim(); ++j) m(r, j + 1) = h(r, j);
  }
  return m;
}

IntVector GroupHom::apply(const IntVector& g) const { return target.reduce(h * g); }

IntVector GroupHom::apply_hat(const IntVector& u) const { return target.reduce(hat() * u); }

bool GroupHom::well_defined() const {
  if (h.rows() != target.dim() || h.cols() != source.dim()) return false;
  if (c && c->size() != target.dim()) return false;
  for (std::size_t t = 0; t < source.torsion().size(); ++t) {
    const std::size_t j = source.rank() + t;
    IntVector col = scaled(h.col(j), source.torsion()[t]);
    if (!is_zero(target.reduce(col))) return false;
  }
  return true;
}

std::optional<IntVector> subgroup_membership(const FgGroup& group, const std::vector<IntVector>& gens,
                                             const IntVector& v) {
  if (v.size() != group.dim()) throw PreconditionViolated("subgroup_membership: wrong element length");
  IntMatrix a = IntMatrix::from_columns(gens, group.dim());
  return solve_linear(a, v, group.moduli());
}

bool is_isomorphism(const FgGroup& source, const FgGroup& target, const IntMatrix& m) {
  GroupHom hom{source, target, m, std::nullopt};
  if (!hom.well_defined()) return false;
  // Surjective: image plus target relations spans Z^dim.
  IntMatrix rel(target.dim(), target.torsion().size());
  for (std::size_t t = 0; t < target.torsion().size(); ++t) rel(target.rank() + t, t) = target.torsion()[t];
  SmithDecomposition s = smith(m.hconcat(rel));
  if (s.rank() != target.dim()) return false;
  for (std::size_t k = 0; k < s.rank(); ++k)
    if (s.D(k, k) != 1) return false;
  // Injective: the kernel lies in the source relations.
  auto ker = solve_lattice(m, target.zero(), target.moduli());
  if (!ker) return false;
  for (std::size_t j = 0; j < ker->kernel.cols(); ++j)
    if (!is_zero(source.reduce(ker->kernel.col(j)))) return false;
  return true;
}

// ---------------------------------------------------------------- quotients

FgGroup QuotientPresentation::group() const {
  std::size_t rank = 0;
  std::vector<BigInt> torsion;
  for (const auto& m : moduli) {
    if (sgn(m) == 0)
      ++rank;
    else
      torsion.push_back(m);
  }
  return FgGroup(rank, std::move(torsion));
}

IntVector QuotientPresentation::project(const IntVector& v) const {
  IntVector y = projection * v;
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = reduce_mod(y[k], moduli[k]);
  return y;
}

QuotientPresentation quotient_presentation(const IntMatrix& relations, std::size_t n) {
  if (relations.rows() != n) throw PreconditionViolated("quotient_presentation: row mismatch");
  SmithDecomposition s = smith(relations);
  const std::size_t r = s.rank();
  std::vector<std::size_t> keep;
  for (std::size_t k = r; k < n; ++k) keep.push_back(k);
  for (std::size_t k = 0; k < r; ++k)
    if (s.D(k, k) != 1) keep.push_back(k);
  QuotientPresentation q;
  q.projection = IntMatrix(keep.size(), n);
  q.moduli.resize(keep.size());
  IntMatrix uinv = unimodular_inverse(s.U);
  q.section = IntMatrix(n, keep.size());
  for (std::size_t row = 0; row < keep.size(); ++row) {
    const std::size_t k = keep[row];
    for (std::size_t j = 0; j < n; ++j) {
      q.projection(row, j) = s.U(k, j);
      q.section(j, row) = uinv(j, k);
    }
    q.moduli[row] = k < r ? s.D(k, k) : BigInt(0);
  }
  return q;
}

}  // namespace refmon
