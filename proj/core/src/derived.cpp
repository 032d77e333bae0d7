#include <algorithm>

#include "refmon/errors.hpp"
#include "refmon/monoid.hpp"

namespace refmon {

namespace {

IntVector slice(const IntVector& v, std::size_t off, std::size_t len) {
  return IntVector(v.begin() + static_cast<std::ptrdiff_t>(off), v.begin() + static_cast<std::ptrdiff_t>(off + len));
}

IntMatrix reduce_rows(IntMatrix m, const FgGroup& g) {
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = reduce_mod(m(r, c), g.modulus(r));
  return m;
}

/// Presentation of M_down(i) with the n-coordinate at i added as a relation (free i).
struct Component {
  std::shared_ptr<const SupportData> data;
  QuotientPresentation group;
};

Component component(const Monoid& m, std::size_t i) {
  const ISystem& s = m.system();
  Component c;
  c.data = m.support_data(s.poset().down(i));
  const SupportData& sd = *c.data;
  std::vector<IntVector> rel;
  for (std::size_t k : sd.members) {
    const std::size_t shift = s.is_free(k) ? 1 : 0;
    for (std::size_t t = 0; t < s.group(k).dim(); ++t) {
      const BigInt mod = s.group(k).modulus(t);
      if (sgn(mod) == 0) continue;
      IntVector col(sd.dim);
      col[sd.local_offset[k] + shift + t] = mod;
      rel.push_back(std::move(col));
    }
  }
  const std::size_t shift_i = s.is_free(i) ? 1 : 0;
  for (std::size_t k : sd.members) {
    if (k == i) continue;
    const IntMatrix& h = s.hat(k, i);
    for (std::size_t e = 0; e < s.block_dim(k); ++e) {
      IntVector col(sd.dim);
      col[sd.local_offset[k] + e] = 1;
      for (std::size_t r = 0; r < h.rows(); ++r) col[sd.local_offset[i] + shift_i + r] -= h(r, e);
      rel.push_back(std::move(col));
    }
  }
  if (s.is_free(i)) {
    IntVector col(sd.dim);
    col[sd.local_offset[i]] = 1;
    rel.push_back(std::move(col));
  }
  c.group = quotient_presentation(IntMatrix::from_columns(rel, sd.dim), sd.dim);
  return c;
}

}  // namespace

MonElem map_elem(const SystemHom& f, const Monoid& source, const Monoid& target, const MonElem& x) {
  const ISystem& s = source.system();
  if (f.vertex_map.size() != s.size()) throw PreconditionViolated("map_elem: hom does not match the source");
  MonElem out = target.zero();
  if (x.support.empty()) return out;
  const MonElem xn = source.normalize(x);
  for (std::size_t k : s.poset().max_of(x.support)) {
    const IntVector b = slice(xn.vec, s.offset(k), s.block_dim(k));
    IntVector img;
    if (s.is_free(k)) {
      img.push_back(b[0]);
      const IntVector g = f.group_maps[k] * IntVector(b.begin() + 1, b.end());
      img.insert(img.end(), g.begin(), g.end());
    } else {
      img = f.group_maps[k] * b;
    }
    out = target.add(out, target.chi(f.vertex_map[k], img));
  }
  return out;
}

DerivedSystem derive_system(const Monoid& m) {
  const ISystem& s = m.system();
  const Poset& p = s.poset();
  const std::size_t n = s.size();
  const auto reps = m.prime_representatives();

  std::vector<std::pair<std::size_t, std::size_t>> rel;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && m.leq(reps[i], reps[j])) rel.emplace_back(i, j);

  SystemSpec spec;
  try {
    spec.poset = Poset::from_relations(p.ids(), rel);
  } catch (const Error&) {
    throw InternalInvariantViolation("derive_system: primes are not antisymmetric under <=*");
  }
  std::vector<Component> comps;
  for (std::size_t i = 0; i < n; ++i) {
    spec.kinds.push_back(m.leq(m.add(reps[i], reps[i]), reps[i]) ? Kind::Reg : Kind::Free);
    comps.push_back(component(m, i));
    spec.groups.push_back(comps.back().group.group());
  }

  DerivedSystem out;
  for (std::size_t i = 0; i < n; ++i) {
    const SupportData& sd = *comps[i].data;
    const std::size_t shift = s.is_free(i) ? 1 : 0;
    IntMatrix sig(spec.groups[i].dim(), s.group(i).dim());
    for (std::size_t t = 0; t < s.group(i).dim(); ++t) {
      IntVector e(sd.dim);
      e[sd.local_offset[i] + shift + t] = 1;
      const IntVector c = comps[i].group.project(e);
      for (std::size_t r = 0; r < c.size(); ++r) sig(r, t) = c[r];
    }
    out.sigma.push_back(sig);
  }

  // Maps (p_j + x) - p_j: push a representative of x from down(i) into down(j).
  auto push = [&](std::size_t i, std::size_t j, IntVector local_i) {
    const SupportData& si = *comps[i].data;
    const SupportData& sj = *comps[j].data;
    IntVector local_j(sj.dim);
    for (std::size_t k : si.members)
      for (std::size_t t = 0; t < s.block_dim(k); ++t)
        local_j[sj.local_offset[k] + t] = local_i[si.local_offset[k] + t];
    return comps[j].group.project(local_j);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!spec.poset.lt(i, j)) continue;
      const SupportData& si = *comps[i].data;
      MapSpec ms;
      ms.from = i;
      ms.to = j;
      ms.h = IntMatrix(spec.groups[j].dim(), spec.groups[i].dim());
      for (std::size_t t = 0; t < spec.groups[i].dim(); ++t) {
        IntVector u = comps[i].group.section.col(t);
        if (spec.kinds[i] == Kind::Free) u[si.local_offset[i]] = 0;
        const IntVector c = push(i, j, u);
        for (std::size_t r = 0; r < c.size(); ++r) ms.h(r, t) = c[r];
      }
      if (spec.kinds[i] == Kind::Free) {
        IntVector e(si.dim);
        e[si.local_offset[i]] = 1;
        ms.c = push(i, j, e);
      }
      spec.maps.push_back(std::move(ms));
    }
  }
  out.system = std::make_shared<const ISystem>(ISystem::create(spec));
  return out;
}

bool roundtrip_check(const Monoid& m, std::vector<std::string>* problems) {
  std::vector<std::string> local;
  std::vector<std::string>& out = problems ? *problems : local;
  const ISystem& s = m.system();
  DerivedSystem d;
  try {
    d = derive_system(m);
  } catch (const Error& e) {
    out.push_back(std::string("derived system invalid: ") + e.what());
    return false;
  }
  const ISystem& t = *d.system;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (s.poset().leq(i, j) != t.poset().leq(i, j))
        out.push_back("order differs on " + s.poset().id(i) + ", " + s.poset().id(j));
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.kind(i) != t.kind(i)) out.push_back("kind differs at " + s.poset().id(i));
    if (!is_isomorphism(s.group(i), t.group(i), d.sigma[i]))
      out.push_back("group at " + s.poset().id(i) + " is not naturally isomorphic");
  }
  if (!out.empty()) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!s.poset().lt(i, j)) continue;
      const IntMatrix& sg = d.sigma[i];
      const std::size_t shift = s.is_free(i) ? 1 : 0;
      IntMatrix sbar(sg.rows() + shift, sg.cols() + shift);
      if (shift) sbar(0, 0) = 1;
      for (std::size_t r = 0; r < sg.rows(); ++r)
        for (std::size_t c = 0; c < sg.cols(); ++c) sbar(r + shift, c + shift) = sg(r, c);
      const IntMatrix lhs = reduce_rows(t.hat(i, j) * sbar, t.group(j));
      const IntMatrix rhs = reduce_rows(d.sigma[j] * s.hat(i, j), t.group(j));
      if (lhs != rhs) out.push_back("maps do not commute on " + s.poset().id(i) + " < " + s.poset().id(j));
    }
  }
  return out.empty();
}

}  // namespace refmon
