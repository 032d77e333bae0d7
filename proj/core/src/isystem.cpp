#include "refmon/isystem.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "refmon/errors.hpp"

namespace refmon {

std::string to_string(Kind k) { return k == Kind::Free ? "free" : "reg"; }

std::string Violation::to_string() const { return condition + " at " + where + ": " + message; }

namespace {

IntMatrix reduce_rows(IntMatrix m, const FgGroup& target) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const BigInt md = target.modulus(r);
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = reduce_mod(m(r, c), md);
  }
  return m;
}

std::string pair_name(const Poset& p, std::size_t i, std::size_t j) { return p.id(i) + " < " + p.id(j); }

}  // namespace

/// Builds systems; shared by create and the validators.
struct SystemBuilder {
  static std::variant<ISystem, std::vector<Violation>> build(const SystemSpec& spec) {
    std::vector<Violation> out;
    const Poset& p = spec.poset;
    const std::size_t n = p.size();
    if (spec.kinds.size() != n || spec.groups.size() != n) {
      out.push_back({"structure", "system", "kinds/groups do not match the number of elements"});
      return out;
    }

    std::vector<const MapSpec*> given(n * n, nullptr);
    for (const MapSpec& m : spec.maps) {
      if (m.from >= n || m.to >= n) {
        out.push_back({"structure", "map", "map refers to an unknown element"});
        continue;
      }
      const std::string where = pair_name(p, m.from, m.to);
      if (!p.lt(m.from, m.to)) {
        out.push_back({"structure", where, "map between elements that are not strictly comparable"});
        continue;
      }
      if (given[m.from * n + m.to]) {
        out.push_back({"structure", where, "duplicate map"});
        continue;
      }
      const FgGroup& src = spec.groups[m.from];
      const FgGroup& dst = spec.groups[m.to];
      if (m.h.rows() != dst.dim() || (dst.dim() > 0 && m.h.cols() != src.dim()) ||
          (dst.dim() == 0 && !m.h.empty() && m.h.cols() != src.dim())) {
        out.push_back({"structure", where, "matrix h has the wrong shape"});
        continue;
      }
      if (spec.kinds[m.from] == Kind::Reg && m.c) {
        out.push_back({"structure", where, "translation c given for a regular source"});
        continue;
      }
      if (m.c && m.c->size() != dst.dim()) {
        out.push_back({"structure", where, "translation c has the wrong length"});
        continue;
      }
      GroupHom hom{src, dst, IntMatrix(dst.dim(), src.dim()), std::nullopt};
      for (std::size_t r = 0; r < m.h.rows(); ++r)
        for (std::size_t c = 0; c < m.h.cols(); ++c) hom.h(r, c) = m.h(r, c);
      if (!hom.well_defined()) {
        out.push_back({"hom", where, "h is not compatible with the torsion of source and target"});
        continue;
      }
      given[m.from * n + m.to] = &m;
    }
    for (auto [i, j] : p.covers()) {
      if (!given[i * n + j] && !spec.groups[j].is_trivial())
        out.push_back({"structure", pair_name(p, i, j), "missing map on a cover with nontrivial target"});
    }
    if (!out.empty()) return out;

    auto hat_of_spec = [&](std::size_t i, std::size_t j) {
      const FgGroup& src = spec.groups[i];
      const FgGroup& dst = spec.groups[j];
      const bool free = spec.kinds[i] == Kind::Free;
      IntMatrix m(dst.dim(), src.dim() + (free ? 1 : 0));
      const MapSpec* g = given[i * n + j];
      if (g) {
        for (std::size_t r = 0; r < dst.dim(); ++r) {
          if (free && g->c) m(r, 0) = (*g->c)[r];
          for (std::size_t c = 0; c < src.dim(); ++c) m(r, c + (free ? 1 : 0)) = g->h(r, c);
        }
      }
      return reduce_rows(std::move(m), dst);
    };

    ISystem sys;
    sys.poset_ = p;
    sys.kinds_ = spec.kinds;
    sys.groups_ = spec.groups;
    sys.hats_.assign(n * n, IntMatrix());
    sys.maps_.assign(n * n, std::nullopt);
    std::vector<bool> known(n * n, false);
    const std::vector<std::size_t> ext = p.linear_extension();
    for (std::size_t j : ext) {
      // Larger i first, so hat(m, j) exists for every cover m above i.
      for (auto it = ext.rbegin(); it != ext.rend(); ++it) {
        const std::size_t i = *it;
        if (!p.lt(i, j)) continue;
        std::optional<IntMatrix> chosen;
        std::size_t via = kNone;
        for (std::size_t m : p.lower_covers(j)) {
          if (!p.leq(i, m)) continue;
          IntMatrix cand;
          if (m == i) {
            cand = hat_of_spec(i, j);
          } else {
            const IntMatrix& hjm = sys.hats_[m * n + j];
            // Drop the n-column of a free intermediate: only h_jm composes.
            const std::size_t skip = spec.kinds[m] == Kind::Free ? 1 : 0;
            IntMatrix hgroup = hjm.block(0, hjm.rows(), skip, hjm.cols());
            cand = reduce_rows(hgroup * sys.hats_[i * n + m], spec.groups[j]);
          }
          if (!chosen) {
            chosen = std::move(cand);
            via = m;
          } else if (*chosen != cand) {
            out.push_back({"c1", pair_name(p, i, j),
                           "composites through " + p.id(via) + " and " + p.id(m) + " differ"});
          }
        }
        if (!chosen) throw InternalInvariantViolation("comparable pair without a lower cover path");
        if (given[i * n + j] && !std::count(p.lower_covers(j).begin(), p.lower_covers(j).end(), i)) {
          if (hat_of_spec(i, j) != *chosen)
            out.push_back({"c1", pair_name(p, i, j), "explicit map differs from the composite along covers"});
        }
        sys.hats_[i * n + j] = *chosen;
        known[i * n + j] = true;
      }
    }
    if (!out.empty()) return out;

    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!known[i * n + j]) continue;
        const IntMatrix& hm = sys.hats_[i * n + j];
        GroupHom g;
        g.source = spec.groups[i];
        g.target = spec.groups[j];
        if (spec.kinds[i] == Kind::Free) {
          g.c = hm.col(0);
          g.h = hm.block(0, hm.rows(), 1, hm.cols());
        } else {
          g.h = hm;
        }
        sys.maps_[i * n + j] = std::move(g);
      }
    }
    sys.offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i)
      sys.offsets_[i + 1] = sys.offsets_[i] + spec.groups[i].dim() + (spec.kinds[i] == Kind::Free ? 1 : 0);
    sys.ambient_moduli_.assign(sys.offsets_.back(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t base = sys.offsets_[i] + (spec.kinds[i] == Kind::Free ? 1 : 0);
      for (std::size_t k = 0; k < spec.groups[i].dim(); ++k) sys.ambient_moduli_[base + k] = spec.groups[i].modulus(k);
    }

    for (std::size_t i = 0; i < n; ++i) {
      if (!sys.is_free(i) || sys.group(i).is_trivial()) continue;
      bool ok = true;
      for (std::size_t t = 0; t < sys.group(i).dim() && ok; ++t) {
        for (int sign : {1, -1}) {
          IntVector beta = sys.group(i).zero();
          beta[t] = sign;
          if (!decompose_below(sys, i, beta)) {
            out.push_back({"c2", p.id(i),
                           std::string("the semigroup generated from below misses ") + (sign > 0 ? "+" : "-") +
                               "e" + std::to_string(t) + " of " + sys.group(i).to_string()});
            ok = false;
            break;
          }
        }
      }
    }
    if (!out.empty()) return out;
    return sys;
  }
};

ISystem ISystem::create(const SystemSpec& spec) {
  auto r = SystemBuilder::build(spec);
  if (auto* v = std::get_if<std::vector<Violation>>(&r)) {
    std::string msg = "invalid system:";
    for (const auto& x : *v) msg += "\n  " + x.to_string();
    throw InvalidSystem(msg);
  }
  return std::get<ISystem>(std::move(r));
}

std::variant<ISystem, std::vector<Violation>> ISystem::try_create(const SystemSpec& spec) {
  return SystemBuilder::build(spec);
}

FgGroup ISystem::hat_group(std::size_t i) const {
  return is_free(i) ? groups_[i].with_free_factor() : groups_[i];
}

const GroupHom& ISystem::map(std::size_t i, std::size_t j) const {
  const auto& m = maps_[i * size() + j];
  if (!m) throw PreconditionViolated("map requested for a pair that is not strictly comparable");
  return *m;
}

const IntMatrix& ISystem::hat(std::size_t i, std::size_t j) const {
  if (!poset_.lt(i, j)) throw PreconditionViolated("hat requested for a pair that is not strictly comparable");
  return hats_[i * size() + j];
}

IntVector ISystem::embed_group(std::size_t j, const IntVector& g) const {
  if (!is_free(j)) return g;
  IntVector out(g.size() + 1);
  for (std::size_t k = 0; k < g.size(); ++k) out[k + 1] = g[k];
  return out;
}

SystemSpec ISystem::spec() const {
  SystemSpec s{poset_, kinds_, groups_, {}};
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j)
      if (poset_.lt(i, j)) {
        const GroupHom& g = map(i, j);
        s.maps.push_back({i, j, g.c, g.h});
      }
  return s;
}

std::vector<MapSpec> ISystem::cover_maps() const {
  std::vector<MapSpec> out;
  for (auto [i, j] : poset_.covers()) {
    const GroupHom& g = map(i, j);
    out.push_back({i, j, g.c, g.h});
  }
  return out;
}

bool ISystem::trivial_groups() const {
  for (const auto& g : groups_)
    if (!g.is_trivial()) return false;
  return true;
}

bool ISystem::has_free() const {
  for (Kind k : kinds_)
    if (k == Kind::Free) return true;
  return false;
}

std::vector<Violation> validate(const SystemSpec& spec) {
  auto r = SystemBuilder::build(spec);
  if (auto* v = std::get_if<std::vector<Violation>>(&r)) return *v;
  return {};
}

std::vector<Violation> validate(const ISystem& sys) { return validate(sys.spec()); }

std::optional<std::vector<std::pair<std::size_t, IntVector>>> decompose_below(const ISystem& sys, std::size_t i,
                                                                            const IntVector& beta) {
  const FgGroup& gi = sys.group(i);
  if (beta.size() != gi.dim()) throw PreconditionViolated("decompose_below: element has the wrong length");
  std::vector<std::pair<std::size_t, IntVector>> out;
  if (is_zero(gi.reduce(beta))) return out;
  std::vector<std::size_t> below;
  for (std::size_t k : sys.poset().down(i).members())
    if (k != i) below.push_back(k);
  if (below.empty()) return std::nullopt;

  std::vector<std::size_t> off(below.size() + 1, 0);
  for (std::size_t q = 0; q < below.size(); ++q) off[q + 1] = off[q] + sys.hat_group(below[q]).dim();
  IntMatrix a(gi.dim(), off.back());
  std::vector<CoordConstraint> cons(off.back());
  for (std::size_t q = 0; q < below.size(); ++q) {
    const IntMatrix& h = sys.hat(below[q], i);
    for (std::size_t r = 0; r < gi.dim(); ++r)
      for (std::size_t c = 0; c < h.cols(); ++c) a(r, off[q] + c) = h(r, c);
    if (sys.is_free(below[q])) cons[off[q]] = {CoordTag::ZeroOrGe1, off[q] + 1, off[q + 1]};
  }
  auto x = feasible_constrained(a, beta, gi.moduli(), cons);
  if (!x) return std::nullopt;
  for (std::size_t q = 0; q < below.size(); ++q) {
    const std::size_t k = below[q];
    IntVector d(x->begin() + static_cast<std::ptrdiff_t>(off[q]), x->begin() + static_cast<std::ptrdiff_t>(off[q + 1]));
    d = sys.hat_group(k).reduce(d);
    if (sys.is_free(k) ? sgn(d[0]) == 0 : is_zero(d)) continue;
    out.emplace_back(k, std::move(d));
  }
  return out;
}

// ---------------------------------------------------------------- homs

std::vector<std::string> hom_violations(const SystemHom& f) {
  std::vector<std::string> out;
  if (!f.source || !f.target) return {"missing source or target"};
  const ISystem& s = *f.source;
  const ISystem& t = *f.target;
  if (f.vertex_map.size() != s.size() || f.group_maps.size() != s.size()) return {"map sizes do not match the source"};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::size_t pi = f.vertex_map[i];
    if (pi >= t.size()) return {"vertex map leaves the target"};
    if (s.kind(i) != t.kind(pi)) out.push_back("kind not preserved at " + s.poset().id(i));
    const IntMatrix& g = f.group_maps[i];
    if (g.rows() != t.group(pi).dim() || g.cols() != s.group(i).dim()) {
      out.push_back("group map has the wrong shape at " + s.poset().id(i));
      continue;
    }
    if (!GroupHom{s.group(i), t.group(pi), g, std::nullopt}.well_defined())
      out.push_back("group map not well defined at " + s.poset().id(i));
  }
  if (!out.empty()) return out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!s.poset().lt(i, j)) continue;
      const std::size_t pi = f.vertex_map[i], pj = f.vertex_map[j];
      if (!t.poset().lt(pi, pj)) {
        out.push_back("not strictly order-preserving on " + pair_name(s.poset(), i, j));
        continue;
      }
      // f_j . hat_ji versus hat'_{pj pi} . fbar_i, both as maps Ghat_i -> G_pj.
      IntMatrix lhs = reduce_rows(f.group_maps[j] * s.hat(i, j), t.group(pj));
      const IntMatrix& fi = f.group_maps[i];
      const std::size_t shift = s.is_free(i) ? 1 : 0;
      IntMatrix fbar(fi.rows() + shift, fi.cols() + shift);
      if (shift) fbar(0, 0) = 1;
      for (std::size_t r = 0; r < fi.rows(); ++r)
        for (std::size_t c = 0; c < fi.cols(); ++c) fbar(r + shift, c + shift) = fi(r, c);
      IntMatrix rhs = reduce_rows(t.hat(pi, pj) * fbar, t.group(pj));
      if (lhs != rhs) out.push_back("square does not commute on " + pair_name(s.poset(), i, j));
    }
  }
  return out;
}

SystemHom identity_hom(const SystemPtr& sys) {
  SystemHom f{sys, sys, {}, {}};
  for (std::size_t i = 0; i < sys->size(); ++i) {
    f.vertex_map.push_back(i);
    f.group_maps.push_back(IntMatrix::identity(sys->group(i).dim()));
  }
  return f;
}

// ---------------------------------------------------------------- constructions

ISystem restrict_system(const ISystem& sys, const LowerSet& l, std::vector<std::size_t>* map) {
  if (!sys.poset().is_lower(l)) throw NotLowerSet("restrict: the given set is not a lower set");
  std::vector<std::size_t> keep;
  SystemSpec spec;
  spec.poset = sys.poset().induced(l, &keep);
  std::vector<std::size_t> inv(sys.size(), kNone);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    inv[keep[k]] = k;
    spec.kinds.push_back(sys.kind(keep[k]));
    spec.groups.push_back(sys.group(keep[k]));
  }
  for (std::size_t a : keep)
    for (std::size_t b : keep)
      if (sys.poset().lt(a, b)) {
        const GroupHom& g = sys.map(a, b);
        spec.maps.push_back({inv[a], inv[b], g.c, g.h});
      }
  if (map) *map = keep;
  return ISystem::create(spec);
}

std::vector<std::string> projection_violations(const Poset& p1, const Poset& p2, const std::vector<std::size_t>& psi) {
  std::vector<std::string> out;
  if (psi.size() != p1.size()) return {"projection has the wrong length"};
  std::vector<bool> hit(p2.size(), false);
  for (std::size_t x : psi) {
    if (x >= p2.size()) return {"projection leaves the target"};
    hit[x] = true;
  }
  if (std::count(hit.begin(), hit.end(), false) > 0) out.push_back("projection is not surjective");
  for (std::size_t i = 0; i < p1.size(); ++i)
    for (std::size_t j = 0; j < p1.size(); ++j)
      if (p1.lt(i, j) && !p2.lt(psi[i], psi[j]))
        out.push_back("not strictly order-preserving on " + pair_name(p1, i, j));
  for (std::size_t q = 0; q < p1.size(); ++q) {
    std::vector<std::size_t> img;
    for (std::size_t c : p1.lower_covers(q)) img.push_back(psi[c]);
    std::sort(img.begin(), img.end());
    std::vector<std::size_t> want = p2.lower_covers(psi[q]);
    std::sort(want.begin(), want.end());
    if (img != want) out.push_back("lower covers of " + p1.id(q) + " do not biject");
  }
  return out;
}

std::pair<SystemPtr, SystemHom> pullback(const SystemPtr& target, const Poset& source_poset,
                                         const std::vector<std::size_t>& psi) {
  auto v = projection_violations(source_poset, target->poset(), psi);
  if (!v.empty()) {
    std::string msg = "pullback: bad projection";
    for (const auto& x : v) msg += "; " + x;
    throw BadProjection(msg);
  }
  SystemSpec spec;
  spec.poset = source_poset;
  for (std::size_t i = 0; i < source_poset.size(); ++i) {
    spec.kinds.push_back(target->kind(psi[i]));
    spec.groups.push_back(target->group(psi[i]));
  }
  for (std::size_t i = 0; i < source_poset.size(); ++i)
    for (std::size_t j = 0; j < source_poset.size(); ++j)
      if (source_poset.lt(i, j)) {
        const GroupHom& g = target->map(psi[i], psi[j]);
        spec.maps.push_back({i, j, g.c, g.h});
      }
  auto sys = std::make_shared<const ISystem>(ISystem::create(spec));
  SystemHom f{sys, target, psi, {}};
  for (std::size_t i = 0; i < sys->size(); ++i) f.group_maps.push_back(IntMatrix::identity(sys->group(i).dim()));
  return {sys, f};
}

std::vector<std::string> pair_violations(const CompatiblePair& cp) {
  std::vector<std::string> out;
  if (!cp.system) return {"pair has no system"};
  const ISystem& s = *cp.system;
  const Poset& p = s.poset();
  if (!p.is_lower(cp.i1) || !p.is_lower(cp.i2)) return {"I1 and I2 must be lower sets"};
  if (cp.i1.intersects(cp.i2)) return {"I1 and I2 must be disjoint"};
  if (cp.iso.size() != p.size()) return {"iso has the wrong length"};
  ElemSet image(p.size());
  for (std::size_t i : cp.i1.members()) {
    const std::size_t t = cp.iso[i];
    if (t >= p.size() || !cp.i2.test(t)) return {"iso does not map I1 into I2"};
    if (image.test(t)) return {"iso is not injective"};
    image.set(t);
  }
  if (image != cp.i2) return {"iso is not onto I2"};
  const auto m1 = cp.i1.members();
  for (std::size_t a : m1)
    for (std::size_t b : m1)
      if (p.leq(a, b) != p.leq(cp.iso[a], cp.iso[b])) out.push_back("iso is not an order isomorphism");
  if (!out.empty()) return out;
  for (std::size_t i : m1) {
    const std::size_t t = cp.iso[i];
    if (s.kind(i) != s.kind(t)) out.push_back("kind differs at " + p.id(i));
    if (!(s.group(i) == s.group(t))) out.push_back("group differs at " + p.id(i));
  }
  if (!out.empty()) return out;
  for (std::size_t i : m1)
    for (std::size_t j : m1)
      if (p.lt(i, j) && s.hat(i, j) != s.hat(cp.iso[i], cp.iso[j]))
        out.push_back("maps differ on " + pair_name(p, i, j) + " and its image");
  const ElemSet both = cp.i1 | cp.i2;
  for (std::size_t i : m1)
    for (std::size_t j = 0; j < p.size(); ++j)
      if (!both.test(j) && p.lt(i, j) && p.lt(cp.iso[i], j) && s.hat(i, j) != s.hat(cp.iso[i], j))
        out.push_back("maps into " + p.id(j) + " differ from " + p.id(i) + " and " + p.id(cp.iso[i]));
  return out;
}

CrownResult crown_system(const CompatiblePair& cp) {
  auto v = pair_violations(cp);
  if (!v.empty()) {
    std::string msg = "crown_system: invalid pair";
    for (const auto& x : v) msg += "; " + x;
    throw InvalidPair(msg);
  }
  const ISystem& s = *cp.system;
  const Poset& p = s.poset();
  const ElemSet both = cp.i1 | cp.i2;
  CrownResult res;
  std::vector<std::size_t> new_index(p.size(), kNone);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (cp.i2.test(i)) continue;
    new_index[i] = res.kept.size();
    res.kept.push_back(i);
    ids.push_back(p.id(i));
  }
  auto lt_crowned = [&](std::size_t a, std::size_t b) {
    return p.lt(a, b) || (cp.i1.test(a) && !both.test(b) && p.lt(cp.iso[a], b));
  };
  std::vector<std::pair<std::size_t, std::size_t>> rel;
  for (std::size_t a : res.kept)
    for (std::size_t b : res.kept)
      if (a != b && lt_crowned(a, b)) rel.emplace_back(new_index[a], new_index[b]);

  SystemSpec spec;
  spec.poset = Poset::from_relations(ids, rel);
  for (std::size_t a : res.kept) {
    spec.kinds.push_back(s.kind(a));
    spec.groups.push_back(s.group(a));
  }
  for (std::size_t x = 0; x < res.kept.size(); ++x) {
    for (std::size_t y = 0; y < res.kept.size(); ++y) {
      if (!spec.poset.lt(x, y)) continue;
      const std::size_t a = res.kept[x], b = res.kept[y];
      const GroupHom* g = nullptr;
      if (p.lt(a, b))
        g = &s.map(a, b);
      else if (cp.i1.test(a) && !both.test(b) && p.lt(cp.iso[a], b))
        g = &s.map(cp.iso[a], b);
      else
        throw InternalInvariantViolation("crowned order is not closed");
      spec.maps.push_back({x, y, g->c, g->h});
    }
  }
  res.system = std::make_shared<const ISystem>(ISystem::create(spec));
  res.collapse.assign(p.size(), kNone);
  for (std::size_t i = 0; i < p.size(); ++i) res.collapse[i] = new_index[i];
  for (std::size_t i : cp.i1.members()) res.collapse[cp.iso[i]] = new_index[i];
  res.projection = SystemHom{cp.system, res.system, res.collapse, {}};
  for (std::size_t i = 0; i < p.size(); ++i) res.projection.group_maps.push_back(IntMatrix::identity(s.group(i).dim()));
  return res;
}

std::pair<SystemPtr, SystemHom> antisymmetrize(const SystemPtr& sys) {
  SystemSpec spec;
  spec.poset = sys->poset();
  spec.kinds.assign(sys->size(), Kind::Reg);
  for (std::size_t i = 0; i < sys->size(); ++i) spec.kinds[i] = sys->kind(i);
  spec.groups.assign(sys->size(), FgGroup::trivial());
  auto out = std::make_shared<const ISystem>(ISystem::create(spec));
  SystemHom f{sys, out, {}, {}};
  for (std::size_t i = 0; i < sys->size(); ++i) {
    f.vertex_map.push_back(i);
    f.group_maps.push_back(IntMatrix(0, sys->group(i).dim()));
  }
  return {out, f};
}

}  // namespace refmon
