#include <catch_amalgamated.hpp>

#include "refmon/properties.hpp"
#include "support.hpp"

using namespace refmon;

TEST_CASE("every property holds on every fixture", "[properties]") {
  for (const auto& name : support::fixture_names()) {
    const Monoid m(support::load_fixture(name));
    Rng rng(51);
    PropertyOptions opt;
    opt.samples = 40;
    for (const PropertyResult& r : run_properties(m, rng, opt)) {
      INFO(name << ": " << r.name << ": " << r.first_failure);
      CHECK(r.ok());
      if (r.skipped.empty()) CHECK(r.checked > 0);
    }
  }
}

TEST_CASE("property runs are reproducible from the seed", "[properties]") {
  const Monoid m(support::load_fixture("sys_b.json"));
  auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    PropertyOptions opt;
    opt.samples = 20;
    std::vector<std::pair<std::string, std::size_t>> out;
    for (const auto& r : run_properties(m, rng, opt)) out.emplace_back(r.name + "/" + r.skipped, r.checked);
    return out;
  };
  CHECK(run(7) == run(7));
}

TEST_CASE("inapplicable properties are skipped", "[properties]") {
  Rng rng(52);
  const Monoid a(support::load_fixture("sys_a.json"));
  const Monoid d(support::load_fixture("diamond.json"));
  auto find = [](const std::vector<PropertyResult>& rs, const std::string& name) {
    for (const auto& r : rs)
      if (r.name == name) return r;
    FAIL("missing property " << name);
    return PropertyResult{};
  };
  const auto ra = run_properties(a, rng, {10, 4});
  CHECK_FALSE(find(ra, "regularity").skipped.empty());
  CHECK(find(ra, "refinement_chain_up").skipped.empty());
  const auto rd = run_properties(d, rng, {10, 4});
  CHECK_FALSE(find(rd, "refinement_chain_up").skipped.empty());
  const Monoid c(support::load_fixture("sys_c.json"));
  CHECK(find(run_properties(c, rng, {10, 4}), "regularity").skipped.empty());
}
