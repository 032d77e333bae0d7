#include <catch_amalgamated.hpp>

#include "refmon/errors.hpp"
#include "refmon/surgery.hpp"
#include "support.hpp"

using namespace refmon;

namespace {

bool isomorphic_to_target(const SurgeryTrace& t) {
  return find_isomorphism(t.final_system()->poset(), t.target->poset()).has_value();
}

}  // namespace

TEST_CASE("a chain needs no surgery", "[surgery][collapse]") {
  const auto a = support::load_fixture("sys_a.json");
  const SurgeryTrace t = collapse_sequence(*a, a->poset().index_of("p"));
  CHECK(t.steps.empty());
  CHECK(t.initial->size() == 2);
}

TEST_CASE("the diamond collapses in one step", "[surgery][collapse]") {
  const auto d = support::load_fixture("diamond.json");
  const SurgeryTrace t = collapse_sequence(*d, d->poset().maximal_elements().front());
  CHECK(t.initial->size() == 5);
  REQUIRE(t.steps.size() == 1);
  CHECK(t.steps[0].pair.i1.count() == 1);
  CHECK(t.final_system()->size() == 4);
  CHECK(isomorphic_to_target(t));
}

TEST_CASE("the eleven-element poset is rebuilt from its chain tree", "[surgery][collapse]") {
  const auto d = support::load_fixture("sys_d.json");
  const SurgeryTrace t = collapse_sequence(*d, d->poset().index_of("*"));
  CHECK(t.initial->size() == 15);
  CHECK(t.initial->poset().chain_up_property());
  CHECK(t.final_system()->size() == 11);
  CHECK(isomorphic_to_target(t));
  for (const SurgeryStep& s : t.steps) CHECK(validate(*s.after()).empty());
  Rng rng(61);
  CHECK(trace_violations(t, 30, rng).empty());
}

TEST_CASE("collapse requires a maximal element", "[surgery][collapse]") {
  const auto d = support::load_fixture("sys_d.json");
  CHECK_THROWS_AS(collapse_sequence(*d, d->poset().index_of("11")), NotMaximal);
}

TEST_CASE("maximal decomposition", "[surgery][decomposition]") {
  const auto a = support::load_fixture("sys_a.json");
  CHECK(maximal_decomposition(*a).steps.empty());

  const auto v = support::load_fixture("v_poset.json");
  const SurgeryTrace tv = maximal_decomposition(*v);
  CHECK(tv.initial->size() == 4);
  REQUIRE(tv.steps.size() == 1);
  CHECK(tv.final_system()->size() == 3);
  CHECK(isomorphic_to_target(tv));

  const auto d = support::load_fixture("sys_d.json");
  const SurgeryTrace td = maximal_decomposition(*d);
  CHECK(isomorphic_to_target(td));
  Rng rng(62);
  CHECK(trace_violations(td, 30, rng).empty());
}

TEST_CASE("an empty pair gives a vacuous pushout", "[surgery][pushout]") {
  const auto b = support::load_fixture("sys_b.json");
  SurgeryStep s{CompatiblePair{b, b->poset().empty_set(), b->poset().empty_set(), {0, 0}}, {}, {0, 1}, {0, 1}};
  s.crown = crown_system(s.pair);
  Rng rng(63);
  const PushoutReport r = verify_pushout(s, 50, rng);
  CHECK(r.ok());
}

TEST_CASE("collapsing two copies of a chain equalizes them", "[surgery][pushout]") {
  const auto target = support::load_fixture("sys_a.json");
  const Poset two = Poset::from_relations({"q", "p", "q2", "p2"}, {{0, 1}, {2, 3}});
  const SurgeryTrace t = collapse_pullback(target, two, {0, 1, 0, 1});
  REQUIRE(t.steps.size() == 1);
  const SurgeryStep& s = t.steps[0];
  const Monoid before(s.before()), after(s.after());
  const auto& iso = s.pair.iso;
  const auto i1 = s.pair.i1.members();

  // Every element of the first copy with multiplicities up to 3, against its image in the second copy.
  std::size_t checked = 0;
  for (unsigned nq = 0; nq <= 3; ++nq) {
    for (unsigned np = 0; np <= 3; ++np) {
      MonElem x = before.zero(), y = before.zero();
      for (std::size_t i : i1) {
        const unsigned k = before.poset().down(i).count() == 1 ? nq : np;
        if (k == 0) continue;
        x = before.add(x, before.multiple(before.chi(i, {1}), k));
        y = before.add(y, before.multiple(before.chi(iso[i], {1}), k));
      }
      REQUIRE(after.eq(step_project(s, before, after, x), step_project(s, before, after, y)));
      ++checked;
    }
  }
  CHECK(checked == 16);
  Rng rng(64);
  CHECK(verify_pushout(s, 100, rng).ok());
}

TEST_CASE("the section splits the projection on the diamond", "[surgery][pushout]") {
  const auto d = support::load_fixture("diamond.json");
  const SurgeryTrace t = collapse_sequence(*d, d->poset().maximal_elements().front());
  REQUIRE(t.steps.size() == 1);
  const SurgeryStep& s = t.steps[0];
  const Monoid before(s.before()), after(s.after());
  Rng rng(65);
  for (int k = 0; k < 100; ++k) {
    const MonElem y = random_element(after, rng);
    REQUIRE(after.eq(step_project(s, before, after, step_section(s, before, after, y)), y));
  }
  const PushoutReport r = verify_pushout(s, 100, rng);
  CHECK(r.ok());
  CHECK(r.samples > 0);
}

TEST_CASE("stage rendering", "[surgery][dot]") {
  const auto d = support::load_fixture("diamond.json");
  const SurgeryTrace t = collapse_sequence(*d, d->poset().maximal_elements().front());
  const std::string s0 = stage_dot(t, 0, "stage_0");
  const std::string s1 = stage_dot(t, 1, "stage_1");
  CHECK(s0.find("digraph") != std::string::npos);
  CHECK(s1.find("digraph") != std::string::npos);
  CHECK(s0 != s1);
}

TEST_CASE("random traces are sound", "[surgery][property]") {
  Rng rng(66);
  RandomSystemOptions opt;
  opt.max_size = 5;
  std::size_t steps = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const SystemPtr sys = random_system(rng, opt);
    const SurgeryTrace td = maximal_decomposition(*sys);
    REQUIRE(isomorphic_to_target(td));
    REQUIRE(trace_violations(td, 10, rng).empty());
    steps += td.steps.size();
    for (std::size_t k : sys->poset().maximal_elements()) {
      const SurgeryTrace tc = collapse_sequence(*sys, k);
      REQUIRE(tc.initial->poset().chain_up_property());
      REQUIRE(isomorphic_to_target(tc));
      REQUIRE(trace_violations(tc, 10, rng).empty());
      steps += tc.steps.size();
    }
  }
  CHECK(steps > 0);
}
