#include "refmon/random.hpp"

#include <algorithm>
#include <string>

#include "refmon/errors.hpp"

namespace refmon {

long uniform(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

namespace {

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

FgGroup random_group(Rng& rng, bool finite) {
  switch (uniform(rng, 0, finite ? 3 : 4)) {
    case 0:
      return FgGroup::trivial();
    case 1:
      return FgGroup::cyclic(2);
    case 2:
      return FgGroup::cyclic(3);
    case 3:
      return FgGroup::cyclic(4);
    default:
      return FgGroup::free(1);
  }
}

BigInt random_mod(Rng& rng, const BigInt& modulus, long spread) {
  if (sgn(modulus) == 0) return BigInt(uniform(rng, -spread, spread));
  return BigInt(uniform(rng, 0, modulus.get_si() - 1));
}

MapSpec random_map(Rng& rng, std::size_t from, std::size_t to, Kind kind, const FgGroup& src, const FgGroup& dst) {
  MapSpec m;
  m.from = from;
  m.to = to;
  m.h = IntMatrix(dst.dim(), src.dim());
  for (std::size_t r = 0; r < dst.dim(); ++r) {
    for (std::size_t c = 0; c < src.dim(); ++c) {
      const BigInt d = src.modulus(c), mr = dst.modulus(r);
      std::vector<long> allowed;
      for (long e = -2; e <= 2; ++e) {
        if (sgn(d) == 0) {
          allowed.push_back(e);
        } else if (sgn(mr) == 0) {
          if (e == 0) allowed.push_back(e);
        } else {
          const BigInt prod = d * e;
          if (reduce_mod(prod, mr) == 0) allowed.push_back(e);
        }
      }
      m.h(r, c) = allowed[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(allowed.size()) - 1))];
    }
  }
  if (kind == Kind::Free) {
    IntVector c(dst.dim());
    for (std::size_t r = 0; r < dst.dim(); ++r) c[r] = random_mod(rng, dst.modulus(r), 2);
    m.c = c;
  }
  return m;
}

}  // namespace

Poset random_poset(Rng& rng, std::size_t n, bool chain_up) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("e" + std::to_string(i));
  std::vector<std::pair<std::size_t, std::size_t>> rel;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (chain_up) {
      if (coin(rng, 0.75)) rel.emplace_back(i, static_cast<std::size_t>(uniform(rng, static_cast<long>(i) + 1, static_cast<long>(n) - 1)));
    } else {
      for (std::size_t j = i + 1; j < n; ++j)
        if (coin(rng, 0.35)) rel.emplace_back(i, j);
    }
  }
  return Poset::from_relations(ids, rel);
}

SystemPtr random_system(Rng& rng, const RandomSystemOptions& opt) {
  const std::size_t n = static_cast<std::size_t>(uniform(rng, static_cast<long>(opt.min_size), static_cast<long>(opt.max_size)));
  const Poset p = random_poset(rng, n, opt.chain_up);
  SystemSpec spec;
  spec.poset = p;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::size_t> prefix_members;
    for (std::size_t k = 0; k <= j; ++k) prefix_members.push_back(k);
    const ElemSet prefix = ElemSet::of(n, prefix_members);
    const Kind kind = coin(rng, opt.free_probability) ? Kind::Free : Kind::Reg;
    bool placed = false;
    for (std::size_t attempt = 0; attempt <= opt.retries && !placed; ++attempt) {
      const bool last = attempt == opt.retries;
      FgGroup g = FgGroup::trivial();
      if (!opt.trivial_groups && !last && !(kind == Kind::Free && p.lower_covers(j).empty()))
        g = random_group(rng, opt.finite_groups);
      SystemSpec trial = spec;
      trial.kinds.push_back(kind);
      trial.groups.push_back(g);
      for (std::size_t i : p.lower_covers(j)) trial.maps.push_back(random_map(rng, i, j, trial.kinds[i], trial.groups[i], g));
      SystemSpec restricted;
      restricted.poset = p.induced(prefix);
      restricted.kinds = trial.kinds;
      restricted.groups = trial.groups;
      restricted.maps = trial.maps;
      if (last || validate(restricted).empty()) {
        spec = std::move(trial);
        placed = true;
      }
    }
  }
  return std::make_shared<const ISystem>(ISystem::create(spec));
}

IntVector random_coordinate(const ISystem& sys, Rng& rng, std::size_t i, bool positive_n) {
  IntVector v;
  const FgGroup& g = sys.group(i);
  if (sys.is_free(i)) {
    const long n = uniform(rng, positive_n ? 1 : 0, 3);
    v.push_back(n);
    for (std::size_t t = 0; t < g.dim(); ++t) v.push_back(n == 0 ? BigInt(0) : random_mod(rng, g.modulus(t), 3));
  } else {
    for (std::size_t t = 0; t < g.dim(); ++t) v.push_back(random_mod(rng, g.modulus(t), 3));
  }
  return v;
}

MonElem random_element(const Monoid& m, Rng& rng, const LowerSet& within) {
  const auto subsets = m.lower_subsets(within);
  const LowerSet& a = subsets[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(subsets.size()) - 1))];
  const ISystem& s = m.system();
  IntVector vec(s.total_dim());
  const auto maxima = m.poset().max_of(a);
  for (std::size_t i : a.members()) {
    const bool is_max = std::find(maxima.begin(), maxima.end(), i) != maxima.end();
    const IntVector c = random_coordinate(s, rng, i, is_max);
    for (std::size_t t = 0; t < c.size(); ++t) vec[s.offset(i) + t] = c[t];
  }
  return m.make(a, std::move(vec));
}

MonElem random_element(const Monoid& m, Rng& rng) { return random_element(m, rng, m.poset().full_set()); }

Equation planted_equation(const Monoid& m, Rng& rng) {
  const MonElem z11 = random_element(m, rng), z12 = random_element(m, rng);
  const MonElem z21 = random_element(m, rng), z22 = random_element(m, rng);
  return Equation{m.add(z11, z12), m.add(z21, z22), m.add(z11, z21), m.add(z12, z22)};
}

std::optional<Equation> sampled_equation(const Monoid& m, Rng& rng) {
  const MonElem x1 = random_element(m, rng), x2 = random_element(m, rng);
  const MonElem s = m.add(x1, x2);
  const MonElem y1 = random_element(m, rng, s.support);
  auto z = m.leq(y1, s);
  if (!z) return std::nullopt;
  return Equation{x1, x2, y1, *z};
}

}  // namespace refmon
