// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "refmon/errors.hpp"
#include "refmon/monoid.hpp"
#include "refmon/random.hpp"
#include "refmon/surgery.hpp"
#include "support.hpp"

using namespace refmon;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string ratio(std::size_t ok, std::size_t total) { return std::to_string(ok) + "/" + std::to_string(total); }

bool valid_or_false(const std::function<bool()>& f) {
  try {
    return f();
  } catch (const ResourceLimit&) {
    throw;
  } catch (const Error&) {
    return false;
  }
}

// 1. Refinement totality on planted and rejection-sampled equations.
Outcome refinement_totality() {
  Rng rng(101);
  std::size_t planted_ok = 0, planted = 0, sampled_ok = 0, sampled = 0;
  std::vector<SystemPtr> corpus;
  for (int s = 0; s < 100; ++s) corpus.push_back(random_system(rng));
  for (const SystemPtr& sys : corpus) {
    const Monoid m(sys);
    for (int t = 0; t < 20; ++t) {
      const Equation e = planted_equation(m, rng);
      ++planted;
      planted_ok += valid_or_false([&] {
        const RefinementSquare sq = m.refine(e.x1, e.x2, e.y1, e.y2);
        return m.valid_square(sq, e.x1, e.x2, e.y1, e.y2);
      });
    }
  }
  std::size_t s = 0;
  while (sampled < 200) {
    const Monoid m(corpus[s++ % corpus.size()]);
    const auto e = sampled_equation(m, rng);
    if (!e) continue;
    ++sampled;
    sampled_ok += valid_or_false([&] {
      const RefinementSquare sq = m.refine(e->x1, e->x2, e->y1, e->y2);
      return m.valid_square(sq, e->x1, e->x2, e->y1, e->y2);
    });
  }
  return {planted_ok == planted && sampled_ok == sampled && planted == 2000,
          ratio(planted_ok, planted) + " planted, " + ratio(sampled_ok, sampled) + " sampled"};
}

// 2. Constructive chain-up refinement.
Outcome chain_up_refinement() {
  Rng rng(202);
  RandomSystemOptions opt;
  opt.chain_up = true;
  std::size_t ok = 0, total = 0, agree = 0;
  for (int s = 0; s < 50; ++s) {
    const Monoid m(random_system(rng, opt));
    if (!m.poset().chain_up_property()) return {false, "generator produced a poset without the chain-up property"};
    for (int t = 0; t < 10; ++t) {
      const Equation e = planted_equation(m, rng);
      ++total;
      const bool a = valid_or_false([&] {
        return m.valid_square(m.refine_chain_up(e.x1, e.x2, e.y1, e.y2), e.x1, e.x2, e.y1, e.y2);
      });
      const bool b = valid_or_false(
          [&] { return m.valid_square(m.refine(e.x1, e.x2, e.y1, e.y2), e.x1, e.x2, e.y1, e.y2); });
      ok += a;
      agree += a == b;
    }
  }
  return {ok == total && agree == total && total == 500,
          ratio(ok, total) + " constructive, " + ratio(agree, total) + " agree with the search"};
}

// 3. eq against the brute-force closure of the generating pairs.
Outcome congruence_closure() {
  Rng rng(303);
  RandomSystemOptions opt;
  opt.max_size = 3;
  opt.finite_groups = true;
  std::size_t systems = 0, nontrivial = 0, supports = 0, vertices = 0, disagreements = 0, pairs = 0;
  while (systems < 100) {
    const SystemPtr sys = random_system(rng, opt);
    BigInt order = 1;
    for (std::size_t i = 0; i < sys->size(); ++i) order *= sys->group(i).order();
    if (order > 8) continue;
    ++systems;
    nontrivial += order > 1;
    const Monoid m(sys);
    for (const LowerSet& a : sys->poset().lower_sets()) {
      if (a.empty()) continue;
      ++supports;
      const auto verts = oracle::congruence_closure(*sys, a, 4, 6);
      std::map<IntVector, std::size_t> rep_of_key;
      std::set<std::size_t> rep_labels;
      std::vector<std::size_t> reps;
      std::vector<MonElem> elems;
      for (const auto& v : verts) elems.push_back(m.make(a, v.ambient));
      for (std::size_t k = 0; k < verts.size(); ++k) {
        ++vertices;
        const IntVector key = m.class_coords(elems[k]);
        auto [it, fresh] = rep_of_key.emplace(key, k);
        if (fresh) {
          reps.push_back(k);
          if (!rep_labels.insert(verts[k].label).second) ++disagreements;  // closure merges two eq-classes
          continue;
        }
        const std::size_t r = it->second;
        if (!m.eq(elems[k], elems[r]) || verts[k].label != verts[r].label) ++disagreements;
      }
      const std::size_t limit = reps.size() <= 150 ? reps.size() * reps.size() : 20000;
      for (std::size_t q = 0; q < limit; ++q) {
        std::size_t x, y;
        if (reps.size() <= 150) {
          x = q / reps.size();
          y = q % reps.size();
        } else {
          x = static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(reps.size()) - 1));
          y = static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(reps.size()) - 1));
        }
        if (x == y) continue;
        ++pairs;
        if (m.eq(elems[reps[x]], elems[reps[y]])) ++disagreements;
      }
    }
  }
  return {disagreements == 0, std::to_string(systems) + " systems (" + std::to_string(nontrivial) +
                                  " with nontrivial groups), " + std::to_string(supports) + " supports, " +
                                  std::to_string(vertices) + " vectors, " + std::to_string(pairs) +
                                  " distinct-class pairs, " + std::to_string(disagreements) + " disagreements"};
}

// 4. Exhaustive agreement with the primitive-monoid normal form.
Outcome pierce_oracle() {
  std::size_t systems = 0, checks = 0, discrepancies = 0;
  for (std::size_t n = 1; n <= 5; ++n) {
    for (const auto& lp : oracle::posets_with_kinds(n)) {
      SystemSpec spec;
      spec.poset = lp.poset;
      spec.kinds = lp.kinds;
      spec.groups.assign(n, FgGroup::trivial());
      for (const auto& [i, j] : lp.poset.covers()) {
        MapSpec ms;
        ms.from = i;
        ms.to = j;
        ms.h = IntMatrix(0, 0);
        if (lp.kinds[i] == Kind::Free) ms.c = IntVector{};
        spec.maps.push_back(ms);
      }
      const Monoid m(std::make_shared<const ISystem>(ISystem::create(spec)));
      const oracle::Pierce pierce(lp.poset, lp.kinds);
      ++systems;
      const auto elems = pierce.elements(3);
      auto to_mon = [&](const oracle::Pierce::Elem& e) {
        MonElem x = m.zero();
        for (std::size_t j : pierce.maxima(e.support))
          x = m.add(x, pierce.is_free(j) ? m.multiple(m.chi(j, IntVector{1}), static_cast<unsigned>(e.mult.at(j)))
                                         : m.chi(j, IntVector{}));
        return x;
      };
      std::vector<MonElem> mons;
      for (const auto& e : elems) mons.push_back(to_mon(e));
      for (std::size_t a = 0; a < elems.size(); ++a) {
        for (std::size_t b = 0; b < elems.size(); ++b) {
          const auto& x = elems[a];
          const auto& y = elems[b];
          checks += 3;
          if (m.eq(mons[a], mons[b]) != (x == y)) ++discrepancies;
          if (!m.eq(m.add(mons[a], mons[b]), to_mon(pierce.add(x, y)))) ++discrepancies;
          const auto z = m.leq(mons[a], mons[b]);
          if (z.has_value() != pierce.leq(x, y)) ++discrepancies;
          if (z && !m.eq(m.add(mons[a], *z), mons[b])) ++discrepancies;
        }
      }
    }
  }
  return {discrepancies == 0, std::to_string(systems) + " systems, " + std::to_string(checks) + " checks, " +
                                  std::to_string(discrepancies) + " discrepancies"};
}

// 5. Systems without free elements are regular.
Outcome dobbertin_regularity() {
  Rng rng(505);
  RandomSystemOptions opt;
  opt.free_probability = 0.0;
  std::size_t ok = 0, total = 0;
  for (int s = 0; s < 20; ++s) {
    const Monoid m(random_system(rng, opt));
    for (int t = 0; t < 50;) {
      const MonElem x = random_element(m, rng);
      if (x.support.empty()) continue;
      ++t;
      ++total;
      const MonElem xx = m.add(x, x);
      const auto down = m.leq(xx, x), up = m.leq(x, xx);
      ok += down && up && down->support.subset_of(x.support) && up->support.subset_of(x.support);
    }
  }
  return {ok == total, ratio(ok, total) + " elements with 2x <= x <= 2x"};
}

// 6. Separative cancellation and unperforation.
Outcome brookfield() {
  Rng rng(606);
  std::size_t instances = 0, violations = 0, sep_premises = 0, unp_premises = 0;
  for (int s = 0; s < 100; ++s) {
    const Monoid m(random_system(rng));
    for (int t = 0; t < 20; ++t) {
      ++instances;
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
      const MonElem xx = m.add(x, x);
      if (m.eq(xx, m.add(y, y)) && m.eq(xx, m.add(x, y))) {
        ++sep_premises;
        if (!m.eq(x, y)) ++violations;
      }
      const MonElem w = uniform(rng, 0, 1) == 0 ? random_element(m, rng) : m.add(x, random_element(m, rng));
      for (unsigned k = 2; k <= 4; ++k) {
        if (!m.leq(m.multiple(x, k), m.multiple(w, k))) continue;
        ++unp_premises;
        if (!m.leq(x, w)) ++violations;
      }
    }
  }
  return {violations == 0 && instances == 2000,
          std::to_string(instances) + " instances (" + std::to_string(sep_premises) + " separativity and " +
              std::to_string(unp_premises) + " unperforation premises met), " + std::to_string(violations) +
              " violations"};
}

// 7. Lower sets correspond to order-ideals.
Outcome ideal_lattice() {
  Rng rng(707);
  std::vector<SystemPtr> corpus;
  for (const auto& name : support::fixture_names()) {
    auto sys = support::load_fixture(name);
    if (sys->size() <= 4) corpus.push_back(sys);
  }
  RandomSystemOptions opt;
  opt.max_size = 4;
  for (int s = 0; s < 40; ++s) corpus.push_back(random_system(rng, opt));
  std::size_t checks = 0, failures = 0;
  for (const SystemPtr& sys : corpus) {
    const Monoid m(sys);
    const auto ls = sys->poset().lower_sets();
    std::vector<MonElem> witness;
    for (const LowerSet& l : ls) {
      MonElem x;
      do {
        x = random_element(m, rng, l);
      } while (!(x.support == l));
      witness.push_back(x);
    }
    std::vector<MonElem> probes = witness;
    for (int t = 0; t < 10; ++t) probes.push_back(random_element(m, rng));
    // Membership in the order-ideal generated by g.
    auto in_generated = [&](const MonElem& y, const MonElem& g) { return m.leq(y, m.multiple(g, 4)).has_value(); };
    auto index_of = [&](const LowerSet& l) {
      for (std::size_t q = 0; q < ls.size(); ++q)
        if (ls[q] == l) return q;
      return ls.size();
    };
    for (std::size_t a = 0; a < ls.size(); ++a) {
      for (const MonElem& y : probes) {
        ++checks;
        if (in_generated(y, witness[a]) != y.support.subset_of(ls[a])) ++failures;
      }
      for (std::size_t b = 0; b < ls.size(); ++b) {
        ++checks;
        const std::size_t join = index_of(ls[a] | ls[b]), meet = index_of(ls[a] & ls[b]);
        bool ok = join < ls.size() && meet < ls.size();
        if (ok && a != b)
          ok = !in_generated(witness[a], witness[b]) || !in_generated(witness[b], witness[a]);
        const MonElem sum = m.add(witness[a], witness[b]);
        for (const MonElem& y : probes) {
          if (!ok) break;
          ok = in_generated(y, sum) == in_generated(y, witness[join]) &&
               in_generated(y, witness[meet]) == (in_generated(y, witness[a]) && in_generated(y, witness[b]));
        }
        if (!ok) ++failures;
      }
    }
  }
  return {failures == 0, std::to_string(corpus.size()) + " systems, " + ratio(checks - failures, checks) + " checks"};
}

// 8. The system read back from M(J) is J.
Outcome roundtrip() {
  std::size_t ok = 0;
  std::string failed;
  for (const auto& name : support::fixture_names()) {
    const Monoid m(support::load_fixture(name));
    if (roundtrip_check(m)) ++ok;
    else failed += " " + name;
  }
  return {ok == support::fixture_names().size(),
          ratio(ok, support::fixture_names().size()) + " fixtures" + (failed.empty() ? "" : ", failed:" + failed)};
}

// 9. Surgery on the eleven-element example.
Outcome surgery_example() {
  const SystemPtr sys = support::load_fixture("sys_d.json");
  const std::size_t star = sys->poset().index_of("*");
  const ChainTree tree = chain_tree(sys->poset(), star);
  const SurgeryTrace trace = collapse_sequence(*sys, star);
  const bool iso = is_order_isomorphism(trace.final_system()->poset(), sys->poset(), trace.final_psi());
  Rng rng(909);
  std::size_t failures = 0;
  for (const SurgeryStep& s : trace.steps) {
    const PushoutReport r = verify_pushout(s, 100, rng);
    failures += r.equalization_failures + r.section_failures + r.move_failures;
  }
  const auto violations = trace_violations(trace, 100, rng);
  std::string sizes = std::to_string(trace.initial->size());
  for (const SurgeryStep& s : trace.steps) sizes += " -> " + std::to_string(s.after()->size());
  return {tree.tree.size() == 15 && trace.initial->size() == 15 && iso && failures == 0 && violations.empty(),
          "chain tree " + std::to_string(tree.tree.size()) + " nodes, trace " + sizes + ", final isomorphic: " +
              (iso ? "yes" : "no") + ", " + std::to_string(failures + violations.size()) + " pushout failures"};
}

// 10. Smith decompositions and membership.
Outcome fgab_soundness() {
  Rng rng(1010);
  std::size_t smith_ok = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t r = static_cast<std::size_t>(uniform(rng, 1, 5)), c = static_cast<std::size_t>(uniform(rng, 1, 5));
    IntMatrix a(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) a(i, j) = uniform(rng, -9, 9);
    const SmithDecomposition s = smith(a);
    bool ok = s.U * a * s.V == s.D && abs(oracle::laplace_det(s.U)) == 1 && abs(oracle::laplace_det(s.V)) == 1;
    for (std::size_t i = 0; i < r && ok; ++i)
      for (std::size_t j = 0; j < c && ok; ++j)
        if (i != j && s.D(i, j) != 0) ok = false;
    const std::size_t d = std::min(r, c);
    for (std::size_t k = 0; k < d && ok; ++k) {
      if (s.D(k, k) < 0) ok = false;
      if (k + 1 < d && s.D(k, k) == 0 && s.D(k + 1, k + 1) != 0) ok = false;
      if (k + 1 < d && s.D(k, k) != 0 && s.D(k + 1, k + 1) % s.D(k, k) != 0) ok = false;
    }
    smith_ok += ok;
  }
  // Membership on every group of order <= 24, and bounded search on Z^2.
  std::size_t member_checks = 0, member_bad = 0;
  std::vector<FgGroup> groups{FgGroup::trivial()};
  for (long d2 = 2; d2 <= 24; ++d2) {
    groups.push_back(FgGroup::cyclic(d2));
    for (long d1 = 2; d1 * d2 <= 24; ++d1)
      if (d2 % d1 == 0) groups.emplace_back(0, std::vector<BigInt>{d1, d2});
  }
  for (const FgGroup& g : groups) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<IntVector> gens;
      const long k = uniform(rng, 1, 3);
      for (long q = 0; q < k; ++q) {
        IntVector v;
        for (std::size_t t = 0; t < g.dim(); ++t) v.emplace_back(uniform(rng, 0, g.modulus(t).get_si() - 1));
        gens.push_back(v);
      }
      const auto closure = oracle::subgroup_closure(g, gens);
      for (const IntVector& v : g.elements()) {
        ++member_checks;
        const auto lambda = subgroup_membership(g, gens, v);
        std::vector<long> key;
        for (const auto& x : v) key.push_back(x.get_si());
        if (lambda.has_value() != (closure.count(key) > 0)) ++member_bad;
        if (lambda) {
          IntVector sum = g.zero();
          for (std::size_t q = 0; q < gens.size(); ++q) sum = sum + scaled(gens[q], (*lambda)[q]);
          if (!g.equal(sum, v)) ++member_bad;
        }
      }
    }
  }
  const FgGroup z2 = FgGroup::free(2);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<IntVector> gens;
    const long k = uniform(rng, 1, 2);
    for (long q = 0; q < k; ++q) gens.push_back(IntVector{uniform(rng, -3, 3), uniform(rng, -3, 3)});
    const IntVector v{uniform(rng, -6, 6), uniform(rng, -6, 6)};
    bool found = false;
    for (long l0 = -5; l0 <= 5 && !found; ++l0)
      for (long l1 = (k > 1 ? -5 : 0); l1 <= (k > 1 ? 5 : 0) && !found; ++l1) {
        IntVector s = scaled(gens[0], l0);
        if (k > 1) s = s + scaled(gens[1], l1);
        found = s == v;
      }
    const auto lambda = subgroup_membership(z2, gens, v);
    ++member_checks;
    if (found && !lambda) ++member_bad;
    if (lambda) {
      IntVector s = z2.zero();
      for (std::size_t q = 0; q < gens.size(); ++q) s = s + scaled(gens[q], (*lambda)[q]);
      if (s != v) ++member_bad;
    }
  }
  for (long mod = 1; mod <= 12; ++mod)
    for (long a = 0; a < mod; ++a)
      for (long b = 0; b < mod; ++b) {
        bool exists = false;
        for (long x = 0; x < mod; ++x) exists = exists || (a * x - b) % mod == 0;
        const auto sol = solve_linear(IntMatrix{{a}}, IntVector{b}, IntVector{mod});
        ++member_checks;
        if (sol.has_value() != exists) ++member_bad;
        if (sol && reduce_mod(BigInt(a) * (*sol)[0] - b, mod) != 0) ++member_bad;
      }
  return {smith_ok == 1000 && member_bad == 0,
          ratio(smith_ok, 1000) + " Smith decompositions, " + std::to_string(member_checks) + " membership checks, " +
              std::to_string(member_bad) + " discrepancies"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"refinement totality", refinement_totality},
      {"chain-up constructive refinement", chain_up_refinement},
      {"congruence closure", congruence_closure},
      {"Pierce normal form", pierce_oracle},
      {"Dobbertin regularity", dobbertin_regularity},
      {"separativity and unperforation", brookfield},
      {"ideal lattice", ideal_lattice},
      {"round-trip", roundtrip},
      {"surgery on the eleven-element poset", surgery_example},
      {"fgab soundness", fgab_soundness},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
