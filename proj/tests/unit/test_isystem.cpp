#include <catch_amalgamated.hpp>

#include <algorithm>

#include "refmon/errors.hpp"
#include "refmon/isystem.hpp"
#include "refmon/random.hpp"
#include "refmon/surgery.hpp"
#include "support.hpp"

using namespace refmon;

namespace {

const char* kSysBZeroMap = R"({
  "elements": [
    {"id": "i", "kind": "reg", "group": {"rank": 0, "torsion": [2]}},
    {"id": "j", "kind": "free", "group": {"rank": 0, "torsion": [2]}}
  ],
  "order": [["i", "j"]],
  "maps": [{"from": "i", "to": "j", "h": [[0]]}]
})";

const char* kMinimalFree = R"({
  "elements": [{"id": "m", "kind": "free", "group": {"rank": 0, "torsion": [2]}}],
  "order": [],
  "maps": []
})";

// a < b < c with an explicit a -> c map that disagrees with the composite.
const char* kBrokenC1 = R"({
  "elements": [
    {"id": "a", "kind": "reg", "group": {"rank": 0, "torsion": [4]}},
    {"id": "b", "kind": "reg", "group": {"rank": 0, "torsion": [4]}},
    {"id": "c", "kind": "reg", "group": {"rank": 0, "torsion": [4]}}
  ],
  "order": [["a", "b"], ["b", "c"]],
  "maps": [
    {"from": "a", "to": "b", "h": [[1]]},
    {"from": "b", "to": "c", "h": [[1]]},
    {"from": "a", "to": "c", "h": [[3]]}
  ]
})";

bool has_violation(const std::vector<Violation>& v, const std::string& cond, const std::string& where) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) {
    return x.condition == cond && x.where.find(where) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("the two-point torsion system validates", "[isystem][validate]") {
  const SystemSpec spec = parse_system_spec(support::read_text(support::fixture_path("sys_b.json")));
  CHECK(validate(spec).empty());
}

TEST_CASE("a zero map violates (c2) at the free element", "[isystem][validate]") {
  const auto v = validate(parse_system_spec(kSysBZeroMap));
  REQUIRE_FALSE(v.empty());
  CHECK(has_violation(v, "c2", "j"));
  CHECK_THROWS_AS(ISystem::create(parse_system_spec(kSysBZeroMap)), InvalidSystem);
}

TEST_CASE("a minimal free element needs the trivial group", "[isystem][validate]") {
  CHECK(has_violation(validate(parse_system_spec(kMinimalFree)), "c2", "m"));
}

TEST_CASE("explicit maps are checked against composites", "[isystem][validate]") {
  CHECK(has_violation(validate(parse_system_spec(kBrokenC1)), "c1", "a"));
}

TEST_CASE("every fixture validates", "[isystem][validate]") {
  for (const auto& name : support::fixture_names()) {
    INFO(name);
    CHECK(validate(parse_system_spec(support::read_text(support::fixture_path(name)))).empty());
  }
}

TEST_CASE("malformed JSON reports a position", "[isystem][json]") {
  try {
    parse_system_spec("{\n  \"elements\": [\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("schema errors name the element", "[isystem][json]") {
  const char* bad_torsion = R"({"elements": [{"id": "x", "kind": "reg", "group": {"rank": 0, "torsion": ["two"]}}],
                               "order": [], "maps": []})";
  try {
    parse_system_spec(bad_torsion);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("'x'") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_system_spec(R"({"elements": [{"id": "x", "kind": "odd", "group": {"rank": 0, "torsion": []}}],
                                        "order": [], "maps": []})"),
                  ParseError);
  CHECK_THROWS_AS(parse_system_spec(R"({"elements": [], "order": [["a", "b"]], "maps": []})"), Error);
}

TEST_CASE("serialization is canonical", "[isystem][json]") {
  for (const auto& name : support::fixture_names()) {
    INFO(name);
    const auto sys = support::load_fixture(name);
    const std::string once = serialize_system(*sys);
    const std::string twice = serialize_system(parse_system(once));
    CHECK(once == twice);
  }
}

TEST_CASE("restriction", "[isystem][restrict]") {
  const auto b = support::load_fixture("sys_b.json");
  CHECK(restrict_system(*b, b->poset().empty_set()).size() == 0);
  const ISystem ri = restrict_system(*b, ElemSet::of(2, {b->poset().index_of("i")}));
  REQUIRE(ri.size() == 1);
  CHECK(ri.kind(0) == Kind::Reg);
  CHECK(ri.group(0) == FgGroup::cyclic(2));
  CHECK_THROWS_AS(restrict_system(*b, ElemSet::of(2, {b->poset().index_of("j")})), NotLowerSet);

  // down(11) = {11, 111, 112}.
  const auto d = support::load_fixture("sys_d.json");
  const ISystem r11 = restrict_system(*d, d->poset().down(d->poset().index_of("11")));
  CHECK(r11.size() == 3);
  CHECK(validate(r11).empty());
}

TEST_CASE("restrictions of valid systems are valid", "[isystem][restrict][property]") {
  Rng rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const SystemPtr sys = random_system(rng);
    for (const LowerSet& l : sys->poset().lower_sets()) REQUIRE(validate(restrict_system(*sys, l)).empty());
  }
}

TEST_CASE("pullback along the identity", "[isystem][pullback]") {
  const auto b = support::load_fixture("sys_b.json");
  const auto [pb, hom] = pullback(b, b->poset(), {0, 1});
  CHECK(serialize_system(*pb) == serialize_system(*b));
  CHECK(hom_violations(hom).empty());
}

TEST_CASE("pullback over the chain tree of the eleven-element poset", "[isystem][pullback]") {
  const auto d = support::load_fixture("sys_d.json");
  const ChainTree t = chain_tree(d->poset(), d->poset().index_of("*"));
  const auto [pb, hom] = pullback(d, t.tree, t.projection);
  CHECK(pb->size() == 15);
  CHECK(validate(*pb).empty());
  CHECK(hom_violations(hom).empty());
}

TEST_CASE("pullback data agrees with the target on principal down-sets", "[isystem][pullback][property]") {
  Rng rng(32);
  for (int trial = 0; trial < 40; ++trial) {
    const SystemPtr sys = random_system(rng);
    for (std::size_t k : sys->poset().maximal_elements()) {
      const SystemPtr down = std::make_shared<const ISystem>(restrict_system(*sys, sys->poset().down(k)));
      const ChainTree t = chain_tree(down->poset(), down->poset().index_of(sys->poset().id(k)));
      const auto [pb, hom] = pullback(down, t.tree, t.projection);
      REQUIRE(validate(*pb).empty());
      for (std::size_t a = 0; a < pb->size(); ++a) {
        REQUIRE(pb->group(a) == down->group(t.projection[a]));
        REQUIRE(pb->kind(a) == down->kind(t.projection[a]));
        for (std::size_t b : pb->poset().down(a).members())
          if (b != a) REQUIRE(pb->hat(b, a) == down->hat(t.projection[b], t.projection[a]));
      }
    }
  }
}

TEST_CASE("a projection that is not cover-bijective is rejected", "[isystem][pullback]") {
  const auto a = support::load_fixture("sys_a.json");
  // Two incomparable points onto the chain q < p: order-preserving on nothing, covers not matched.
  const Poset two = Poset::from_relations({"u", "v"}, {});
  CHECK_THROWS_AS(pullback(a, two, {0, 1}), BadProjection);
  CHECK_FALSE(projection_violations(two, a->poset(), {0, 1}).empty());
}

TEST_CASE("crowning with empty lower sets changes nothing", "[isystem][crown]") {
  const auto b = support::load_fixture("sys_b.json");
  const CompatiblePair cp{b, b->poset().empty_set(), b->poset().empty_set(), std::vector<std::size_t>(2, 0)};
  CHECK(pair_violations(cp).empty());
  const CrownResult r = crown_system(cp);
  CHECK(serialize_system(*r.system) == serialize_system(*b));
}

TEST_CASE("crowning two copies of a chain gives one chain", "[isystem][crown]") {
  const auto d = support::load_fixture("sys_a_doubled.json");
  const Poset& p = d->poset();
  std::vector<std::size_t> iso(4, 0);
  iso[p.index_of("q")] = p.index_of("q2");
  iso[p.index_of("p")] = p.index_of("p2");
  const CompatiblePair cp{d, ElemSet::of(4, {p.index_of("q"), p.index_of("p")}),
                          ElemSet::of(4, {p.index_of("q2"), p.index_of("p2")}), iso};
  REQUIRE(pair_violations(cp).empty());
  const CrownResult r = crown_system(cp);
  CHECK(r.system->size() == 2);
  CHECK(find_isomorphism(r.system->poset(), support::load_fixture("sys_a.json")->poset()).has_value());
  CHECK(validate(*r.system).empty());
}

TEST_CASE("identifying two leaves of the fifteen-node tree leaves fourteen elements", "[isystem][crown]") {
  const auto d = support::load_fixture("sys_d.json");
  const ChainTree t = chain_tree(d->poset(), d->poset().index_of("*"));
  const auto [pb, hom] = pullback(d, t.tree, t.projection);
  // Two minimal nodes over the same element of the base.
  std::size_t u = pb->size(), v = pb->size();
  for (std::size_t a : pb->poset().minimal_elements())
    for (std::size_t b : pb->poset().minimal_elements())
      if (a < b && t.projection[a] == t.projection[b] && u == pb->size()) {
        u = a;
        v = b;
      }
  REQUIRE(u < pb->size());
  std::vector<std::size_t> iso(pb->size(), 0);
  iso[u] = v;
  const CompatiblePair cp{pb, ElemSet::of(pb->size(), {u}), ElemSet::of(pb->size(), {v}), iso};
  REQUIRE(pair_violations(cp).empty());
  const CrownResult r = crown_system(cp);
  CHECK(r.system->size() == 14);
  CHECK(validate(*r.system).empty());
}

TEST_CASE("invalid pairs are rejected", "[isystem][crown]") {
  const auto b = support::load_fixture("sys_b.json");
  // i and j are not disjoint isomorphic lower sets.
  std::vector<std::size_t> iso(2, 0);
  iso[0] = 1;
  const CompatiblePair cp{b, ElemSet::of(2, {0}), ElemSet::of(2, {0, 1}), iso};
  CHECK_FALSE(pair_violations(cp).empty());
  CHECK_THROWS_AS(crown_system(cp), InvalidPair);
}

TEST_CASE("crowned systems from random surgery steps are valid", "[isystem][crown][property]") {
  Rng rng(33);
  RandomSystemOptions opt;
  opt.max_size = 6;
  std::size_t steps = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const SystemPtr sys = random_system(rng, opt);
    const SurgeryTrace trace = maximal_decomposition(*sys);
    for (const SurgeryStep& s : trace.steps) {
      ++steps;
      REQUIRE(pair_violations(s.pair).empty());
      REQUIRE(validate(*s.after()).empty());
    }
  }
  CHECK(steps > 0);
}

TEST_CASE("antisymmetrization collapses the groups", "[isystem][antisymmetrize]") {
  const auto a = support::load_fixture("sys_a.json");
  CHECK(serialize_system(*antisymmetrize(a).first) == serialize_system(*a));
  const auto [bs, hom] = antisymmetrize(support::load_fixture("sys_b.json"));
  CHECK(bs->trivial_groups());
  CHECK(bs->kind(bs->poset().index_of("i")) == Kind::Reg);
  CHECK(bs->kind(bs->poset().index_of("j")) == Kind::Free);
  CHECK(hom_violations(hom).empty());
  const auto cs = antisymmetrize(support::load_fixture("sys_c.json")).first;
  CHECK(cs->size() == 1);
  CHECK(cs->group(0).is_trivial());
  CHECK(cs->kind(0) == Kind::Reg);
}

TEST_CASE("composite maps in the three-element free system", "[isystem]") {
  const auto s = support::load_fixture("three_free.json");
  const Poset& p = s->poset();
  const std::size_t k = p.index_of("k"), i = p.index_of("i"), j = p.index_of("j");
  CHECK(s->hat(i, j) == IntMatrix{{1}});
  CHECK(s->hat(k, j) == IntMatrix{{-1}});
  CHECK(s->has_free());
  CHECK(s->total_dim() == 4);
  CHECK(identity_hom(s).vertex_map == std::vector<std::size_t>{0, 1, 2});
}
