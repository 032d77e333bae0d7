#include "refmon/properties.hpp"

#include <functional>

#include "refmon/errors.hpp"

namespace refmon {

namespace {

class Recorder {
 public:
  Recorder(const Monoid& m, std::string name) : m_(m) { r_.name = std::move(name); }

  void check(bool ok, const std::function<std::string()>& describe) {
    ++r_.checked;
    if (ok) return;
    if (r_.failed++ == 0) r_.first_failure = describe();
  }
  void skip(std::string why) { r_.skipped = std::move(why); }
  std::string show(const MonElem& x) const { return m_.to_string(x); }
  PropertyResult take() { return std::move(r_); }

 private:
  const Monoid& m_;
  PropertyResult r_;
};

PropertyResult conical(const Monoid& m, Rng& rng, std::size_t n) {
  Recorder r(m, "conical");
  for (std::size_t s = 0; s < n; ++s) {
    const MonElem x = random_element(m, rng), y = random_element(m, rng);
    const bool ok = !m.eq(m.add(x, y), m.zero()) || (m.eq(x, m.zero()) && m.eq(y, m.zero()));
    r.check(ok, [&] { return r.show(x) + " + " + r.show(y) + " = 0"; });
  }
  return r.take();
}

PropertyResult defining_relations(const Monoid& m, Rng& rng, std::size_t n) {
  Recorder r(m, "defining_relations");
  const ISystem& s = m.system();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (s.poset().lt(i, j)) pairs.emplace_back(i, j);
  if (pairs.empty()) {
    r.skip("no comparable pairs");
    return r.take();
  }
  for (std::size_t t = 0; t < n; ++t) {
    const auto [i, j] = pairs[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(pairs.size()) - 1))];
    const IntVector x = random_coordinate(s, rng, j, true), y = random_coordinate(s, rng, i, true);
    IntVector shifted(x);
    const IntVector img = s.hat(i, j) * y;
    const std::size_t off = s.is_free(j) ? 1 : 0;
    for (std::size_t q = 0; q < img.size(); ++q) shifted[off + q] += img[q];
    const MonElem lhs = m.add(m.chi(j, x), m.chi(i, y));
    const MonElem rhs = m.chi(j, shifted);
    r.check(m.eq(lhs, rhs), [&] { return r.show(lhs) + " != " + r.show(rhs); });
  }
  return r.take();
}

PropertyResult congruence(const Monoid& m, Rng& rng, std::size_t n) {
  Recorder r(m, "congruence");
  for (std::size_t t = 0; t < n; ++t) {
    const MonElem x = random_element(m, rng), z = random_element(m, rng);
    const MonElem y = m.normalize(x);
    r.check(m.eq(x, y) && m.eq(y, x) && m.eq(m.add(x, z), m.add(y, z)) && m.eq(m.add(z, x), m.add(x, z)),
            [&] { return r.show(x) + " + " + r.show(z); });
  }
  return r.take();
}

PropertyResult refinement(const Monoid& m, Rng& rng, std::size_t n) {
  Recorder r(m, "refinement");
  for (std::size_t t = 0; t < n; ++t) {
    const Equation e = planted_equation(m, rng);
    bool ok = false;
    try {
      ok = m.valid_square(m.refine(e.x1, e.x2, e.y1, e.y2), e.x1, e.x2, e.y1, e.y2);
    } catch (const ResourceLimit&) {
      throw;
    } catch (const Error&) {
    }
    r.check(ok, [&] { return r.show(e.x1) + " + " + r.show(e.x2) + " = " + r.show(e.y1) + " + " + r.show(e.y2); });
  }
  return r.take();
}

PropertyResult refinement_chain_up(const Monoid& m, Rng& rng, std::size_t n) {
  Recorder r(m, "refinement_chain_up");
  if (!m.poset().chain_up_property()) {
    r.skip("poset is not chain-up");
    return r.take();
  }
  for (std::size_t t = 0; t < n; ++t) {
    const Equation e = planted_equation(m, rng);
    bool ok = false;
    try {
      ok = m.valid_square(m.refine_chain_up(e.x1, e.x2, e.y1, e.y2), e.x1, e.x2, e.y1, e.y2);
    } catch (const ResourceLimit&) {
      throw;
    } catch (const Error&) {
    }
    r.check(ok, [&] { return r.show(e.x1) + " + " + r.show(e.x2) + " = " + r.show(e.y1) + " + " + r.show(e.y2); });
  }
  return r.take();
}

PropertyResult separativity(const Monoid& m, Rng& rng, std::size_t n) {
  Recorder r(m, "separativity");
  for (std::size_t t = 0; t < n; ++t) {
    const MonElem x = random_element(m, rng);
    MonElem y;
    switch (uniform(rng, 0, 2)) {
      case 0:
        y = m.normalize(x);
        break;
      case 1:
        y = random_element(m, rng, x.support);
        break;
      default:
        y = m.add(x, random_element(m, rng, x.support));
    }
    const MonElem xx = m.add(x, x), yy = m.add(y, y), xy = m.add(x, y);
    const bool premise = m.eq(xx, yy) && m.eq(xx, xy);
    r.check(!premise || m.eq(x, y), [&] { return r.show(x) + " vs " + r.show(y); });
  }
  return r.take();
}

PropertyResult unperforation(const Monoid& m, Rng& rng, std::size_t n) {
  Recorder r(m, "unperforation");
  for (std::size_t t = 0; t < n; ++t) {
    const MonElem x = random_element(m, rng);
    const MonElem y = uniform(rng, 0, 1) == 0 ? random_element(m, rng) : m.add(x, random_element(m, rng));
    const unsigned k = static_cast<unsigned>(uniform(rng, 2, 4));
    const bool premise = m.leq(m.multiple(x, k), m.multiple(y, k)).has_value();
    r.check(!premise || m.leq(x, y).has_value(),
            [&] { return std::to_string(k) + "*" + r.show(x) + " <= " + std::to_string(k) + "*" + r.show(y); });
  }
  return r.take();
}

PropertyResult n_invariance(const Monoid& m, Rng& rng, std::size_t n) {
  Recorder r(m, "n_invariance");
  const ISystem& s = m.system();
  for (std::size_t t = 0; t < n; ++t) {
    const MonElem x = random_element(m, rng);
    const MonElem y = m.normalize(x);
    bool ok = true;
    bool free_max = false;
    for (std::size_t k : m.poset().max_of(x.support)) {
      if (!s.is_free(k)) continue;
      free_max = true;
      ok = ok && x.vec[s.offset(k)] == y.vec[s.offset(k)];
    }
    const ElemClass c = m.classify(x);
    const bool regular = m.leq(m.add(x, x), x).has_value();
    if (x.support.empty())
      ok = ok && c == ElemClass::Zero;
    else
      ok = ok && (c == ElemClass::RegElt) == !free_max && (c == ElemClass::RegElt) == regular;
    r.check(ok, [&] { return r.show(x) + " classified " + to_string(c); });
  }
  return r.take();
}

PropertyResult regularity(const Monoid& m, Rng& rng, std::size_t n) {
  Recorder r(m, "regularity");
  if (m.system().has_free()) {
    r.skip("free elements present");
    return r.take();
  }
  for (std::size_t t = 0; t < n; ++t) {
    const MonElem x = random_element(m, rng);
    const MonElem xx = m.add(x, x);
    r.check(m.leq(xx, x).has_value() && m.leq(x, xx).has_value(), [&] { return r.show(x); });
  }
  return r.take();
}

PropertyResult primes(const Monoid& m, Rng& rng, std::size_t n) {
  Recorder r(m, "primes");
  const ISystem& s = m.system();
  if (s.size() == 0) {
    r.skip("empty system");
    return r.take();
  }
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t i = static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(s.size()) - 1));
    IntVector v = random_coordinate(s, rng, i, true);
    if (s.is_free(i)) v[0] = 1;
    const MonElem p = m.chi(i, v);
    const MonElem a = random_element(m, rng), b = random_element(m, rng);
    const bool premise = m.leq(p, m.add(a, b)).has_value();
    const bool ok = m.is_prime(p) && (!premise || m.leq(p, a).has_value() || m.leq(p, b).has_value());
    r.check(ok, [&] { return r.show(p) + " <= " + r.show(a) + " + " + r.show(b); });
  }
  return r.take();
}

PropertyResult generators(const Monoid& m, Rng& rng, std::size_t n) {
  Recorder r(m, "generators");
  const auto gens = m.generators();
  for (std::size_t t = 0; t < n; ++t) {
    const MonElem x = random_element(m, rng);
    const auto counts = m.generator_decomposition(x);
    MonElem sum = m.zero();
    for (std::size_t g = 0; g < gens.size(); ++g) sum = m.add(sum, m.multiple(gens[g], static_cast<unsigned>(counts[g])));
    r.check(m.eq(sum, x), [&] { return r.show(x) + " decomposes to " + r.show(sum); });
  }
  return r.take();
}

PropertyResult ideal_lattice(const Monoid& m, Rng& rng, std::size_t limit) {
  Recorder r(m, "ideal_lattice");
  if (m.system().size() > limit) {
    r.skip("more than " + std::to_string(limit) + " elements");
    return r.take();
  }
  const auto ls = m.poset().lower_sets();
  // One sampled element per lower set with exactly that support.
  std::vector<MonElem> witness;
  for (const LowerSet& l : ls) {
    MonElem x;
    do {
      x = random_element(m, rng, l);
    } while (!(x.support == l));
    witness.push_back(x);
  }
  // Membership in the order-ideal generated by the witness of l, decided through leq.
  auto member = [&](std::size_t w, std::size_t l) { return m.leq(witness[w], m.multiple(witness[l], 4)).has_value(); };
  auto index_of = [&](const LowerSet& l) {
    for (std::size_t q = 0; q < ls.size(); ++q)
      if (ls[q] == l) return q;
    throw InternalInvariantViolation("lower sets not closed");
  };
  std::vector<std::vector<char>> in(ls.size(), std::vector<char>(ls.size()));
  for (std::size_t w = 0; w < ls.size(); ++w)
    for (std::size_t l = 0; l < ls.size(); ++l) {
      in[w][l] = member(w, l);
      r.check(static_cast<bool>(in[w][l]) == m.in_ideal(witness[w], ls[l]),
              [&] { return r.show(witness[w]) + " in ideal of " + r.show(witness[l]); });
    }
  for (std::size_t a = 0; a < ls.size(); ++a) {
    for (std::size_t b = 0; b < ls.size(); ++b) {
      const std::size_t join = index_of(ls[a] | ls[b]), meet = index_of(ls[a] & ls[b]);
      bool ok = a == b || in[a][b] != in[a][a] || in[b][a] != in[b][b];
      for (std::size_t w = 0; w < ls.size(); ++w) ok = ok && (in[w][meet] == (in[w][a] && in[w][b]));
      ok = ok && m.ideal_generated_by(m.add(witness[a], witness[b])) == ls[join];
      r.check(ok, [&] { return "lower sets " + r.show(witness[a]) + ", " + r.show(witness[b]); });
    }
  }
  return r.take();
}

PropertyResult map_additivity(const Monoid& m, Rng& rng, std::size_t n) {
  Recorder r(m, "map_additivity");
  const auto [anti, proj] = antisymmetrize(m.system_ptr());
  const Monoid target(anti);
  const SystemHom id = identity_hom(m.system_ptr());
  for (std::size_t t = 0; t < n; ++t) {
    const MonElem x = random_element(m, rng), y = random_element(m, rng);
    const MonElem fx = map_elem(proj, m, target, x), fy = map_elem(proj, m, target, y);
    const bool ok = target.eq(map_elem(proj, m, target, m.add(x, y)), target.add(fx, fy)) &&
                    m.eq(map_elem(id, m, m, x), x);
    r.check(ok, [&] { return r.show(x) + ", " + r.show(y); });
  }
  return r.take();
}

PropertyResult roundtrip(const Monoid& m) {
  Recorder r(m, "roundtrip");
  std::vector<std::string> problems;
  const bool ok = roundtrip_check(m, &problems);
  r.check(ok, [&] { return problems.empty() ? std::string("failed") : problems.front(); });
  return r.take();
}

}  // namespace

std::vector<PropertyResult> run_properties(const Monoid& m, Rng& rng, const PropertyOptions& o) {
  const std::size_t n = o.samples;
  std::vector<PropertyResult> out;
  out.push_back(conical(m, rng, n));
  out.push_back(defining_relations(m, rng, n));
  out.push_back(congruence(m, rng, n));
  out.push_back(refinement(m, rng, n));
  out.push_back(refinement_chain_up(m, rng, n));
  out.push_back(separativity(m, rng, n));
  out.push_back(unperforation(m, rng, n));
  out.push_back(n_invariance(m, rng, n));
  out.push_back(regularity(m, rng, n));
  out.push_back(primes(m, rng, n));
  out.push_back(generators(m, rng, n));
  out.push_back(ideal_lattice(m, rng, o.ideal_lattice_max));
  out.push_back(map_additivity(m, rng, n));
  out.push_back(roundtrip(m));
  return out;
}

}  // namespace refmon
