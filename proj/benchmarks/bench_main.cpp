#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "refmon/fgab.hpp"
#include "refmon/monoid.hpp"
#include "refmon/random.hpp"

using namespace refmon;

namespace {

SystemPtr load(const std::string& name) {
  std::ifstream in(std::string(REFMON_FIXTURE_DIR) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::make_shared<const ISystem>(parse_system(ss.str()));
}

IntMatrix random_matrix(Rng& rng, std::size_t n) {
  IntMatrix a(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) a(r, c) = uniform(rng, -9, 9);
  return a;
}

void BM_Smith(benchmark::State& state) {
  Rng rng(1);
  const IntMatrix a = random_matrix(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(smith(a));
}
BENCHMARK(BM_Smith)->Arg(4)->Arg(8)->Arg(16);

void BM_Eq(benchmark::State& state) {
  // Same-support pairs, so every comparison reaches the quotient.
  const Monoid m(load("v_poset.json"));
  Rng rng(2);
  std::vector<std::pair<MonElem, MonElem>> pairs;
  for (int k = 0; k < 64; ++k) {
    const MonElem x = random_element(m, rng);
    pairs.emplace_back(x, k % 2 ? m.normalize(x) : m.add(x, x));
  }
  std::size_t k = 0;
  for (auto _ : state) {
    const auto& [x, y] = pairs[k++ % pairs.size()];
    benchmark::DoNotOptimize(m.eq(x, y));
  }
}
BENCHMARK(BM_Eq);

void BM_Refine(benchmark::State& state, const char* fixture) {
  const Monoid m(load(fixture));
  Rng rng(3);
  std::vector<Equation> eqs;
  for (int k = 0; k < 16; ++k) eqs.push_back(planted_equation(m, rng));
  std::size_t k = 0;
  for (auto _ : state) {
    const Equation& e = eqs[k++ % eqs.size()];
    benchmark::DoNotOptimize(m.refine(e.x1, e.x2, e.y1, e.y2));
  }
}
BENCHMARK_CAPTURE(BM_Refine, sys_b, "sys_b.json");
BENCHMARK_CAPTURE(BM_Refine, v_poset, "v_poset.json");
BENCHMARK_CAPTURE(BM_Refine, mixed_chain, "mixed_chain.json");

}  // namespace
BENCHMARK_MAIN();
