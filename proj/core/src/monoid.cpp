#include "refmon/monoid.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <mutex>
#include <sstream>

#include "refmon/errors.hpp"

namespace refmon {

std::string to_string(ElemClass c) {
  switch (c) {
    case ElemClass::Zero:
      return "ZERO";
    case ElemClass::FreeElt:
      return "FREE_ELT";
    case ElemClass::RegElt:
      return "REG_ELT";
  }
  return "?";
}

IntVector SupportData::localize(const IntVector& ambient) const {
  IntVector out(dim);
  std::size_t pos = 0;
  for (const auto& [off, len] : spans)
    for (std::size_t t = 0; t < len; ++t) out[pos++] = ambient[off + t];
  return out;
}

Monoid::Monoid(SystemPtr sys) : sys_(std::move(sys)) {
  if (!sys_) throw PreconditionViolated("Monoid needs a system");
  lower_sets_ = sys_->poset().lower_sets();
}

MonElem Monoid::zero() const { return MonElem{poset().empty_set(), IntVector(sys_->total_dim())}; }

IntVector Monoid::block(const MonElem& x, std::size_t i) const {
  const auto b = x.vec.begin() + static_cast<std::ptrdiff_t>(sys_->offset(i));
  return IntVector(b, b + static_cast<std::ptrdiff_t>(sys_->block_dim(i)));
}

namespace {

void reduce_ambient(const ISystem& sys, IntVector& v) {
  const IntVector& mod = sys.ambient_moduli();
  for (std::size_t k = 0; k < v.size(); ++k)
    if (sgn(mod[k]) != 0) v[k] = reduce_mod(v[k], mod[k]);
}

void put_block(const ISystem& sys, IntVector& v, std::size_t i, const IntVector& b) {
  for (std::size_t t = 0; t < b.size(); ++t) v[sys.offset(i) + t] = b[t];
}

void add_block(const ISystem& sys, IntVector& v, std::size_t i, const IntVector& b) {
  for (std::size_t t = 0; t < b.size(); ++t) v[sys.offset(i) + t] += b[t];
}

}  // namespace

void Monoid::check(const MonElem& x) const {
  const ISystem& s = *sys_;
  if (x.vec.size() != s.total_dim()) throw BadCoordinate("element vector has the wrong length");
  if (x.support.universe() != s.size() || !poset().is_lower(x.support))
    throw BadCoordinate("element support is not a lower set");
  const auto maxima = poset().max_of(x.support);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const IntVector b = block(x, i);
    if (!x.support.test(i)) {
      if (!is_zero(b)) throw BadCoordinate("nonzero coordinate outside the support at " + poset().id(i));
      continue;
    }
    if (!s.is_free(i)) continue;
    const bool is_max = std::find(maxima.begin(), maxima.end(), i) != maxima.end();
    if (is_max && b[0] < 1) throw BadCoordinate("n must be at least 1 at maximal free element " + poset().id(i));
    if (!is_max && b[0] < 0) throw BadCoordinate("negative n at free element " + poset().id(i));
    if (!is_max && b[0] == 0 && !is_zero(s.group(i).reduce(IntVector(b.begin() + 1, b.end()))))
      throw BadCoordinate("n = 0 with nonzero group part at free element " + poset().id(i));
  }
}

MonElem Monoid::make(const ElemSet& support, IntVector vec) const {
  reduce_ambient(*sys_, vec);
  MonElem x{support, std::move(vec)};
  check(x);
  return x;
}

MonElem Monoid::chi(std::size_t i, const IntVector& x) const {
  if (i >= sys_->size()) throw UnknownElement("chi: unknown element index");
  if (x.size() != sys_->block_dim(i))
    throw BadCoordinate("chi: coordinate for " + poset().id(i) + " has length " + std::to_string(x.size()) +
                        ", expected " + std::to_string(sys_->block_dim(i)));
  if (sys_->is_free(i) && x[0] < 1) throw BadCoordinate("chi: n must be at least 1 at free element " + poset().id(i));
  IntVector v(sys_->total_dim());
  put_block(*sys_, v, i, x);
  reduce_ambient(*sys_, v);
  return MonElem{poset().down(i), std::move(v)};
}

MonElem Monoid::add(const MonElem& x, const MonElem& y) const {
  MonElem out{x.support | y.support, x.vec + y.vec};
  reduce_ambient(*sys_, out.vec);
  return out;
}

MonElem Monoid::multiple(const MonElem& x, unsigned k) const {
  if (k == 0) return zero();
  MonElem out{x.support, scaled(x.vec, BigInt(k))};
  reduce_ambient(*sys_, out.vec);
  return out;
}

std::shared_ptr<const SupportData> Monoid::support_data(const ElemSet& a) const {
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(a);
    if (it != cache_.end()) return it->second;
  }
  const ISystem& s = *sys_;
  auto sd = std::make_shared<SupportData>();
  sd->support = a;
  sd->members = a.members();
  sd->maxima = s.poset().max_of(a);
  sd->local_offset.assign(s.size(), kNone);
  for (std::size_t i : sd->members) {
    sd->local_offset[i] = sd->dim;
    sd->spans.emplace_back(s.offset(i), s.block_dim(i));
    sd->dim += s.block_dim(i);
  }
  std::vector<IntVector> rel;
  for (std::size_t i : sd->members) {
    const std::size_t shift = s.is_free(i) ? 1 : 0;
    for (std::size_t t = 0; t < s.group(i).dim(); ++t) {
      const BigInt m = s.group(i).modulus(t);
      if (sgn(m) == 0) continue;
      IntVector col(sd->dim);
      col[sd->local_offset[i] + shift + t] = m;
      rel.push_back(std::move(col));
    }
  }
  for (std::size_t j : sd->maxima) {
    const std::size_t shift = s.is_free(j) ? 1 : 0;
    for (std::size_t i : sd->members) {
      if (!s.poset().lt(i, j)) continue;
      const IntMatrix& h = s.hat(i, j);
      for (std::size_t e = 0; e < s.block_dim(i); ++e) {
        IntVector col(sd->dim);
        col[sd->local_offset[i] + e] = 1;
        for (std::size_t r = 0; r < h.rows(); ++r) col[sd->local_offset[j] + shift + r] -= h(r, e);
        rel.push_back(std::move(col));
      }
    }
  }
  sd->quotient = quotient_presentation(IntMatrix::from_columns(rel, sd->dim), sd->dim);
  std::unique_lock lock(mutex_);
  auto [it, inserted] = cache_.emplace(a, std::move(sd));
  return it->second;
}

std::vector<LowerSet> Monoid::lower_subsets(const ElemSet& s) const {
  std::vector<LowerSet> out;
  for (const auto& l : lower_sets_)
    if (l.subset_of(s)) out.push_back(l);
  return out;
}

IntVector Monoid::class_coords(const MonElem& x) const {
  auto sd = support_data(x.support);
  return sd->quotient.project(sd->localize(x.vec));
}

bool Monoid::eq(const MonElem& x, const MonElem& y) const {
  if (!(x.support == y.support)) return false;
  if (x.support.empty()) return true;
  auto sd = support_data(x.support);
  return is_zero(sd->quotient.project(sd->localize(x.vec - y.vec)));
}

MonElem Monoid::normalize(const MonElem& x) const {
  const ISystem& s = *sys_;
  MonElem out = x;
  const auto maxima = poset().max_of(x.support);
  for (std::size_t i : x.support.members()) {
    if (std::find(maxima.begin(), maxima.end(), i) != maxima.end()) continue;
    const IntVector b = block(x, i);
    if (is_zero(b)) continue;
    std::size_t j = kNone;
    for (std::size_t m : maxima)
      if (poset().lt(i, m)) {
        j = m;
        break;
      }
    const IntVector img = s.hat(i, j) * b;
    put_block(s, out.vec, i, IntVector(b.size()));
    add_block(s, out.vec, j, s.embed_group(j, img));
  }
  reduce_ambient(s, out.vec);
  return out;
}

std::optional<MonElem> Monoid::leq(const MonElem& x, const MonElem& y) const {
  if (!x.support.subset_of(y.support)) return std::nullopt;
  const ISystem& s = *sys_;
  const ElemSet& b = y.support;
  // Multiplicities at free maxima of b are invariants and decide which maxima z must reach.
  ElemSet must(s.size()), must_not(s.size());
  for (std::size_t j : poset().max_of(b)) {
    if (!s.is_free(j)) continue;
    const BigInt d = y.vec[s.offset(j)] - (x.support.test(j) ? x.vec[s.offset(j)] : BigInt(0));
    if (d < 0) return std::nullopt;
    if (d == 0)
      must_not.set(j);
    else
      must.set(j);
  }
  for (const LowerSet& c : lower_subsets(b)) {
    if (!((x.support | c) == b)) continue;
    if (!must.subset_of(c) || c.intersects(must_not)) continue;
    if (auto z = leq_with(x, y, c)) return z;
  }
  return std::nullopt;
}

std::optional<MonElem> Monoid::leq_with(const MonElem& x, const MonElem& y, const LowerSet& c) const {
  const ISystem& s = *sys_;
  if (c.empty()) {
    if (eq(x, y)) return zero();
    return std::nullopt;
  }
  auto sd = support_data(y.support);
  const IntMatrix& p = sd->quotient.projection;
  const IntVector rhs = sd->quotient.project(sd->localize(y.vec - x.vec));
  const auto maxc = poset().max_of(c);
  std::size_t nvars = 0;
  for (std::size_t k : maxc) nvars += s.block_dim(k);
  IntMatrix a(p.rows(), nvars);
  std::vector<CoordConstraint> cons(nvars);
  std::size_t col = 0;
  for (std::size_t k : maxc) {
    const std::size_t lo = sd->local_offset[k];
    for (std::size_t t = 0; t < s.block_dim(k); ++t)
      for (std::size_t r = 0; r < p.rows(); ++r) a(r, col + t) = p(r, lo + t);
    if (s.is_free(k)) cons[col].tag = CoordTag::Ge1;
    col += s.block_dim(k);
  }
  auto sol = feasible_constrained(a, rhs, sd->quotient.moduli, cons);
  if (!sol) return std::nullopt;
  IntVector v(s.total_dim());
  col = 0;
  for (std::size_t k : maxc) {
    put_block(s, v, k, IntVector(sol->begin() + static_cast<std::ptrdiff_t>(col),
                                 sol->begin() + static_cast<std::ptrdiff_t>(col + s.block_dim(k))));
    col += s.block_dim(k);
  }
  MonElem z = make(c, std::move(v));
  if (!eq(add(x, z), y)) throw InternalInvariantViolation("leq: witness fails re-verification");
  return z;
}

bool Monoid::valid_square(const RefinementSquare& q, const MonElem& x1, const MonElem& x2, const MonElem& y1,
                          const MonElem& y2) const {
  return eq(add(q.z11, q.z12), x1) && eq(add(q.z21, q.z22), x2) && eq(add(q.z11, q.z21), y1) &&
         eq(add(q.z12, q.z22), y2);
}

namespace {

/// Does the n-vector at one free element admit a refinement with the given cell pattern?
/// cell[q] true means alpha_q >= 1, false means alpha_q = 0; sums are -1 when unconstrained.
bool pierce_cell_ok(const std::array<bool, 4>& cell, const std::array<long, 2>& row, const std::array<long, 2>& col) {
  auto bound = [&](int q) -> long {
    if (!cell[q]) return 0;
    long b = -1;
    const long rs = row[q / 2], cs = col[q % 2];
    if (rs >= 0) b = rs;
    if (cs >= 0) b = b < 0 ? cs : std::min(b, cs);
    return b < 0 ? 1 : b;
  };
  std::array<long, 4> hi{bound(0), bound(1), bound(2), bound(3)};
  std::array<long, 4> lo{};
  for (int q = 0; q < 4; ++q) lo[q] = cell[q] ? 1 : 0;
  for (int q = 0; q < 4; ++q)
    if (lo[q] > hi[q]) return false;
  for (long a0 = lo[0]; a0 <= hi[0]; ++a0)
    for (long a1 = lo[1]; a1 <= hi[1]; ++a1) {
      if (row[0] >= 0 && a0 + a1 != row[0]) continue;
      for (long a2 = lo[2]; a2 <= hi[2]; ++a2) {
        if (col[0] >= 0 && a0 + a2 != col[0]) continue;
        for (long a3 = lo[3]; a3 <= hi[3]; ++a3) {
          if (row[1] >= 0 && a2 + a3 != row[1]) continue;
          if (col[1] >= 0 && a1 + a3 != col[1]) continue;
          return true;
        }
      }
    }
  return false;
}

}  // namespace

RefinementSquare Monoid::refine(const MonElem& x1, const MonElem& x2, const MonElem& y1,
                                const MonElem& y2) const {
  if (!eq(add(x1, x2), add(y1, y2))) throw PreconditionViolated("refine: x1 + x2 differs from y1 + y2");
  const ISystem& s = *sys_;
  const ElemSet& a1 = x1.support;
  const ElemSet& a2 = x2.support;
  const ElemSet& b1 = y1.support;
  const ElemSet& b2 = y2.support;

  using Tuple = std::array<LowerSet, 4>;
  std::vector<Tuple> tuples;
  const auto l11 = lower_subsets(a1 & b1);
  const auto l12 = lower_subsets(a1 & b2);
  const auto l21 = lower_subsets(a2 & b1);
  const auto l22 = lower_subsets(a2 & b2);
  for (const auto& c11 : l11)
    for (const auto& c12 : l12) {
      if (!((c11 | c12) == a1)) continue;
      for (const auto& c21 : l21) {
        if (!((c11 | c21) == b1)) continue;
        for (const auto& c22 : l22) {
          if (!((c21 | c22) == a2) || !((c12 | c22) == b2)) continue;
          tuples.push_back({c11, c12, c21, c22});
        }
      }
    }
  std::sort(tuples.begin(), tuples.end(), [](const Tuple& u, const Tuple& v) {
    std::size_t su = 0, sv = 0;
    for (int q = 0; q < 4; ++q) {
      su += u[q].count();
      sv += v[q].count();
    }
    if (su != sv) return su < sv;
    for (int q = 0; q < 4; ++q) {
      if (u[q] < v[q]) return true;
      if (v[q] < u[q]) return false;
    }
    return false;
  });

  // Multiplicities at maximal free elements of each side.
  const MonElem* xs[2] = {&x1, &x2};
  const MonElem* ys[2] = {&y1, &y2};
  std::vector<std::size_t> frees;
  std::vector<std::array<long, 2>> rows, cols;
  for (std::size_t i : (a1 | a2).members()) {
    if (!s.is_free(i)) continue;
    std::array<long, 2> r{-1, -1}, c{-1, -1};
    for (int t = 0; t < 2; ++t) {
      const auto mx = poset().max_of(xs[t]->support);
      if (std::find(mx.begin(), mx.end(), i) != mx.end()) r[t] = xs[t]->vec[s.offset(i)].get_si();
      const auto my = poset().max_of(ys[t]->support);
      if (std::find(my.begin(), my.end(), i) != my.end()) c[t] = ys[t]->vec[s.offset(i)].get_si();
    }
    frees.push_back(i);
    rows.push_back(r);
    cols.push_back(c);
  }

  for (const Tuple& t : tuples) {
    bool ok = true;
    for (std::size_t f = 0; f < frees.size() && ok; ++f) {
      std::array<bool, 4> cell{};
      for (int q = 0; q < 4; ++q) {
        const auto mx = poset().max_of(t[q]);
        cell[q] = std::find(mx.begin(), mx.end(), frees[f]) != mx.end();
      }
      ok = pierce_cell_ok(cell, rows[f], cols[f]);
    }
    if (!ok) continue;
    if (auto sq = refine_tuple(x1, x2, y1, y2, t)) {
      if (!valid_square(*sq, x1, x2, y1, y2)) throw InternalInvariantViolation("refine: square fails re-verification");
      return *sq;
    }
  }
  throw InternalInvariantViolation("refine: no support tuple admits a refinement");
}

std::optional<RefinementSquare> Monoid::refine_tuple(const MonElem& x1, const MonElem& x2, const MonElem& y1,
                                                     const MonElem& y2, const std::array<LowerSet, 4>& c) const {
  const ISystem& s = *sys_;
  std::array<std::vector<std::size_t>, 4> maxc;
  std::array<std::size_t, 5> cell_off{};
  for (int q = 0; q < 4; ++q) {
    maxc[q] = poset().max_of(c[q]);
    std::size_t d = 0;
    for (std::size_t k : maxc[q]) d += s.block_dim(k);
    cell_off[q + 1] = cell_off[q] + d;
  }
  const std::size_t nvars = cell_off[4];

  // Equations: rows (cells 0,1 -> x1; 2,3 -> x2), then columns (0,2 -> y1; 1,3 -> y2).
  const MonElem* targets[4] = {&x1, &x2, &y1, &y2};
  const int cells[4][2] = {{0, 1}, {2, 3}, {0, 2}, {1, 3}};
  std::vector<IntVector> arows;
  IntVector rhs, moduli;
  for (int e = 0; e < 4; ++e) {
    const MonElem& tgt = *targets[e];
    if (tgt.support.empty()) continue;
    auto sd = support_data(tgt.support);
    const IntMatrix& p = sd->quotient.projection;
    const IntVector r = sd->quotient.project(sd->localize(tgt.vec));
    for (std::size_t row = 0; row < p.rows(); ++row) {
      IntVector line(nvars);
      for (int q : cells[e]) {
        std::size_t col = cell_off[q];
        for (std::size_t k : maxc[q]) {
          const std::size_t lo = sd->local_offset[k];
          for (std::size_t t = 0; t < s.block_dim(k); ++t) line[col + t] = p(row, lo + t);
          col += s.block_dim(k);
        }
      }
      arows.push_back(std::move(line));
      rhs.push_back(r[row]);
      moduli.push_back(sd->quotient.moduli[row]);
    }
  }
  IntMatrix a(arows.size(), nvars);
  for (std::size_t r = 0; r < arows.size(); ++r)
    for (std::size_t v = 0; v < nvars; ++v) a(r, v) = arows[r][v];
  std::vector<CoordConstraint> cons(nvars);
  for (int q = 0; q < 4; ++q) {
    std::size_t col = cell_off[q];
    for (std::size_t k : maxc[q]) {
      if (s.is_free(k)) cons[col].tag = CoordTag::Ge1;
      col += s.block_dim(k);
    }
  }
  auto sol = feasible_constrained(a, rhs, moduli, cons);
  if (!sol) return std::nullopt;
  std::array<MonElem, 4> z;
  for (int q = 0; q < 4; ++q) {
    IntVector v(s.total_dim());
    std::size_t col = cell_off[q];
    for (std::size_t k : maxc[q]) {
      put_block(s, v, k, IntVector(sol->begin() + static_cast<std::ptrdiff_t>(col),
                                   sol->begin() + static_cast<std::ptrdiff_t>(col + s.block_dim(k))));
      col += s.block_dim(k);
    }
    z[q] = make(c[q], std::move(v));
  }
  return RefinementSquare{z[0], z[1], z[2], z[3]};
}

MonElem Monoid::restrict_to(const MonElem& x, const ElemSet& d) const {
  MonElem out{x.support & d, IntVector(sys_->total_dim())};
  for (std::size_t i : out.support.members()) put_block(*sys_, out.vec, i, block(x, i));
  return out;
}

IntVector Monoid::phi_sum(std::size_t k, const MonElem& x) const {
  IntVector out = sys_->group(k).zero();
  for (std::size_t d : x.support.members()) {
    if (d == k) continue;
    const IntVector b = block(x, d);
    if (is_zero(b)) continue;
    out = out + sys_->hat(d, k) * b;
  }
  return sys_->group(k).reduce(out);
}

RefinementSquare Monoid::refine_chain_up(const MonElem& x1, const MonElem& x2, const MonElem& y1,
                                         const MonElem& y2) const {
  if (!poset().chain_up_property()) throw NotChainUp("refine_chain_up: the poset lacks the chain-up property");
  const MonElem total = add(x1, x2);
  if (!eq(total, add(y1, y2))) throw PreconditionViolated("refine_chain_up: x1 + x2 differs from y1 + y2");
  RefinementSquare out{zero(), zero(), zero(), zero()};
  for (std::size_t k : poset().max_of(total.support)) {
    const ElemSet d = poset().down(k);
    RefinementSquare part =
        refine_component(k, restrict_to(x1, d), restrict_to(x2, d), restrict_to(y1, d), restrict_to(y2, d));
    out.z11 = add(out.z11, part.z11);
    out.z12 = add(out.z12, part.z12);
    out.z21 = add(out.z21, part.z21);
    out.z22 = add(out.z22, part.z22);
  }
  if (!valid_square(out, x1, x2, y1, y2))
    throw InternalInvariantViolation("refine_chain_up: square fails re-verification");
  return out;
}

RefinementSquare Monoid::refine_component(std::size_t k, const MonElem& in_x1, const MonElem& in_x2,
                                          const MonElem& in_y1, const MonElem& in_y2) const {
  const ISystem& s = *sys_;
  const bool swap_rows = !in_x1.support.test(k);
  const bool swap_cols = !in_y1.support.test(k);
  const MonElem x1 = normalize(swap_rows ? in_x2 : in_x1);
  const MonElem x2 = normalize(swap_rows ? in_x1 : in_x2);
  const MonElem y1 = normalize(swap_cols ? in_y2 : in_y1);
  const MonElem y2 = normalize(swap_cols ? in_y1 : in_y2);

  RefinementSquare q;
  const bool k_in_a2 = x2.support.test(k);
  const bool k_in_b2 = y2.support.test(k);
  auto at_k = [&](const IntVector& g) { return chi(k, g); };
  auto minus_phi = [&](const MonElem& top, const MonElem& lower) {
    IntVector b = block(top, k);
    return b - s.embed_group(k, phi_sum(k, lower));
  };

  if (x2.support.empty()) {
    q = {y1, y2, zero(), zero()};
  } else if (y2.support.empty()) {
    q = {x1, zero(), x2, zero()};
  } else if (k_in_a2 && k_in_b2) {
    const IntVector g1 = block(x1, k), g2 = block(x2, k), h1 = block(y1, k), h2 = block(y2, k);
    if (!s.is_free(k)) {
      q = {at_k(g1 - h2), at_k(h2), at_k(g2), at_k(s.group(k).zero())};
    } else {
      const BigInt m1 = g1[0], n1 = h1[0], n2 = h2[0];
      const BigInt m2 = g2[0];
      BigInt a11 = m1 - n2 + 1;
      if (a11 < 1) a11 = 1;
      const BigInt a12 = m1 - a11, a21 = n1 - a11, a22 = m2 - a21;
      auto tail = [](const IntVector& v) { return IntVector(v.begin() + 1, v.end()); };
      const IntVector b11 = tail(g1) - tail(h2), b12 = tail(h2), b21 = tail(g2);
      const IntVector b22 = s.group(k).zero();
      auto cell = [&](const BigInt& alpha, const IntVector& beta) {
        if (alpha > 0) {
          IntVector v{alpha};
          v.insert(v.end(), beta.begin(), beta.end());
          return chi(k, v);
        }
        if (alpha < 0) throw InternalInvariantViolation("refine_chain_up: negative multiplicity");
        return from_decomposition(decompose_via_c2(k, beta));
      };
      q = {cell(a11, b11), cell(a12, b12), cell(a21, b21), cell(a22, b22)};
    }
  } else if (k_in_a2) {
    q = {x1, zero(), at_k(minus_phi(x2, y2)), y2};
  } else if (k_in_b2) {
    q = {y1, at_k(minus_phi(y2, x2)), zero(), x2};
  } else {
    q = {at_k(minus_phi(x1, y2)), y2, x2, zero()};
  }
  if (swap_cols) {
    std::swap(q.z11, q.z12);
    std::swap(q.z21, q.z22);
  }
  if (swap_rows) {
    std::swap(q.z11, q.z21);
    std::swap(q.z12, q.z22);
  }
  return q;
}

std::vector<std::pair<std::size_t, IntVector>> Monoid::decompose_via_c2(std::size_t i, const IntVector& beta) const {
  if (!sys_->is_free(i)) throw PreconditionViolated("decompose_via_c2: element is not free");
  auto r = decompose_below(*sys_, i, beta);
  if (!r) throw InternalInvariantViolation("decompose_via_c2: no decomposition, contradicting (c2)");
  return *r;
}

MonElem Monoid::from_decomposition(const std::vector<std::pair<std::size_t, IntVector>>& parts) const {
  MonElem out = zero();
  for (const auto& [k, d] : parts) out = add(out, chi(k, d));
  return out;
}

std::vector<MonElem> Monoid::prime_representatives() const {
  std::vector<MonElem> out;
  for (std::size_t i = 0; i < sys_->size(); ++i) {
    IntVector v(sys_->block_dim(i));
    if (sys_->is_free(i)) v[0] = 1;
    out.push_back(chi(i, v));
  }
  return out;
}

std::vector<MonElem> Monoid::primes() const {
  std::vector<MonElem> out;
  for (std::size_t i = 0; i < sys_->size(); ++i) {
    if (!sys_->group(i).is_finite())
      throw PreconditionViolated("primes: the group at " + poset().id(i) + " is infinite");
    for (const IntVector& g : sys_->group(i).elements()) {
      IntVector v = sys_->embed_group(i, g);
      if (sys_->is_free(i)) v[0] = 1;
      out.push_back(chi(i, v));
    }
  }
  return out;
}

bool Monoid::is_prime(const MonElem& x) const {
  const auto mx = poset().max_of(x.support);
  if (mx.size() != 1) return false;
  const std::size_t m = mx[0];
  return !sys_->is_free(m) || x.vec[sys_->offset(m)] == 1;
}

std::vector<MonElem> Monoid::generators() const {
  std::vector<MonElem> out;
  for (std::size_t i = 0; i < sys_->size(); ++i) {
    if (sys_->is_free(i)) {
      IntVector v(sys_->block_dim(i));
      v[0] = 1;
      out.push_back(chi(i, v));
    } else {
      for (const IntVector& g : sys_->group(i).semigroup_generators()) out.push_back(chi(i, g));
    }
  }
  return out;
}

void Monoid::decompose_block(std::size_t k, const IntVector& v, std::vector<std::size_t>& counts) const {
  const ISystem& s = *sys_;
  std::size_t first = 0;
  for (std::size_t i = 0; i < k; ++i) first += s.is_free(i) ? 1 : s.group(i).semigroup_generators().size();
  const FgGroup& g = s.group(k);
  if (s.is_free(k)) {
    // chi_k(n, g) = n chi_k(1, 0) + (elements below k whose images sum to g).
    counts[first] += v[0].get_ui();
    const IntVector gp = g.reduce(IntVector(v.begin() + 1, v.end()));
    if (is_zero(gp)) return;
    for (const auto& [d, delta] : decompose_via_c2(k, gp)) decompose_block(d, delta, counts);
    return;
  }
  if (g.dim() == 0) {
    counts[first] += 1;
    return;
  }
  // Generators are e_1..e_r, -(e_1 + ... + e_r) when r > 0, then the torsion e_t.
  const IntVector red = g.reduce(v);
  BigInt shift = is_zero(red) && g.rank() > 0 ? 1 : 0;
  for (std::size_t t = 0; t < g.rank(); ++t)
    if (-red[t] > shift) shift = -red[t];
  std::size_t pos = first;
  for (std::size_t t = 0; t < g.rank(); ++t) counts[pos++] += BigInt(red[t] + shift).get_ui();
  if (g.rank() > 0) counts[pos++] += shift.get_ui();
  const std::size_t torsion_first = pos;
  for (std::size_t t = g.rank(); t < g.dim(); ++t) counts[pos++] += red[t].get_ui();
  if (is_zero(red) && g.rank() == 0) counts[torsion_first] += g.modulus(0).get_ui();
}

std::vector<std::size_t> Monoid::generator_decomposition(const MonElem& x) const {
  std::vector<std::size_t> counts(generators().size(), 0);
  const MonElem xn = normalize(x);
  for (std::size_t k : poset().max_of(x.support)) decompose_block(k, block(xn, k), counts);
  return counts;
}

ElemClass Monoid::classify(const MonElem& x) const {
  if (x.support.empty()) return ElemClass::Zero;
  for (std::size_t m : poset().max_of(x.support))
    if (sys_->is_free(m)) return ElemClass::FreeElt;
  return ElemClass::RegElt;
}

bool Monoid::is_idempotent(const MonElem& x) const { return eq(add(x, x), x); }

}  // namespace refmon
