#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "refmon/errors.hpp"
#include "refmon_cli/cli.hpp"
#include "support.hpp"

using namespace refmon;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "refmon");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return support::fixture_path(name); }

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("refmon_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p.string();
}

bool contains(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("validate", "[cli][validate]") {
  const Result ok = invoke({"validate", fixture("sys_b.json")});
  CHECK(ok.code == cli::kSuccess);
  CHECK(contains(ok.out, "valid: 2 elements"));

  const fs::path dir = scratch_dir("validate");
  std::string zero_map = support::read_text(fixture("sys_b.json"));
  const auto at = zero_map.find("[[1]]");
  REQUIRE(at != std::string::npos);
  zero_map.replace(at, 5, "[[0]]");
  const Result bad = invoke({"validate", write_file(dir, "zero_map.json", zero_map)});
  CHECK(bad.code == cli::kPropertyFailure);
  CHECK(contains(bad.out, "c2 at j"));

  const Result broken = invoke({"validate", write_file(dir, "broken.json", "{\n  \"elements\": [\n")});
  CHECK(broken.code == cli::kInputError);
  CHECK(contains(broken.err, "line"));

  CHECK(invoke({"validate", (dir / "missing.json").string()}).code == cli::kInputError);
}

TEST_CASE("eval", "[cli][eval]") {
  const std::string a = fixture("sys_a.json");
  const Result sq = invoke({"eval", a, "refine", "p,p", ";", "p,(p+q)"});
  CHECK(sq.code == cli::kSuccess);
  CHECK(contains(sq.out, "y1 ="));
  CHECK(contains(sq.out, "x2 ="));

  const Result e = invoke({"eval", a, "eq", "0", "0"});
  CHECK(e.code == cli::kSuccess);
  CHECK(e.out == "true\n");
  CHECK(invoke({"eval", a, "eq", "p+q", "p"}).out == "true\n");
  CHECK(invoke({"eval", a, "leq", "p", "q"}).out == "NONE\n");
  CHECK(invoke({"eval", a, "classify", "p"}).out == "FREE_ELT\n");
  CHECK(invoke({"eval", a, "classify", "0"}).out == "ZERO idempotent\n");

  const std::string b = fixture("sys_b.json");
  CHECK(invoke({"eval", b, "primes"}).out.size() > 0);
  std::istringstream primes(invoke({"eval", b, "primes"}).out);
  std::size_t lines = 0;
  for (std::string line; std::getline(primes, line);) ++lines;
  CHECK(lines == 4);
  CHECK(invoke({"eval", b, "eq", "j[1,0]+i[1]", "j[1,1]"}).out == "true\n");
  CHECK(invoke({"eval", fixture("sys_d.json"), "eq", "2*(111+112)", "2*111+2*112"}).out == "true\n");
  CHECK(invoke({"eval", fixture("sys_d.json"), "classify", "2**"}).code == cli::kSuccess);
}

TEST_CASE("expression grammar", "[cli][expr]") {
  const Monoid m(support::load_fixture("sys_b.json"));
  const std::size_t i = m.poset().index_of("i"), j = m.poset().index_of("j");
  CHECK(m.eq(cli::parse_expression(m, "j"), m.chi(j, {1, 0})));
  CHECK(m.eq(cli::parse_expression(m, "3*j[1,1]"), m.chi(j, {3, 1})));
  CHECK(m.eq(cli::parse_expression(m, "(i[1] + j)"), m.chi(j, {1, 1})));
  CHECK(m.eq(cli::parse_expression(m, m.to_json(m.chi(j, {2, 1}))), m.chi(j, {2, 1})));
  CHECK(cli::parse_expression_list(m, "i, j; 0 i[1]").size() == 4);
  CHECK(m.eq(cli::parse_expression(m, "i"), m.chi(i, {0})));
  CHECK_THROWS_AS(cli::parse_expression(m, "k"), Error);
  CHECK_THROWS_AS(cli::parse_expression(m, "(i + j"), ParseError);
  CHECK_THROWS_AS(cli::parse_expression(m, "j[0,0]"), BadCoordinate);
  CHECK(invoke({"eval", fixture("sys_b.json"), "eq", "i", "nope"}).code == cli::kInputError);
}

TEST_CASE("props and roundtrip", "[cli][props]") {
  const Result c = invoke({"--samples", "20", "props", fixture("sys_c.json")});
  CHECK(c.code == cli::kSuccess);
  CHECK(contains(c.out, "seed: 1"));
  CHECK(contains(c.out, "all properties hold"));

  const Result r = invoke({"roundtrip", fixture("sys_b.json")});
  CHECK(r.code == cli::kSuccess);
  CHECK(r.out == "true\n");
}

TEST_CASE("reports are reproducible from the seed", "[cli][determinism]") {
  const std::vector<std::string> args{"--seed", "17", "--samples", "15", "props", fixture("v_poset.json")};
  const Result first = invoke(args), second = invoke(args);
  CHECK(first.code == cli::kSuccess);
  CHECK(first.out == second.out);
  const Result json1 = invoke({"--format", "json", "--seed", "17", "--samples", "15", "props", fixture("sys_b.json")});
  const Result json2 = invoke({"--format", "json", "--seed", "17", "--samples", "15", "props", fixture("sys_b.json")});
  CHECK(json1.out == json2.out);
  CHECK(json1.out.front() == '{');
}

TEST_CASE("surgery writes one DOT file per stage", "[cli][surgery]") {
  const fs::path dir = scratch_dir("surgery");
  const Result s = invoke({"--dot-dir", dir.string(), "surgery", fixture("sys_d.json"), "*"});
  CHECK(s.code == cli::kSuccess);
  CHECK(contains(s.out, "isomorphic to target: yes"));
  std::size_t dots = 0;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".dot") ++dots;
  CHECK(dots >= 2);
  CHECK(fs::exists(dir / "stage_0.dot"));

  CHECK(invoke({"surgery", fixture("sys_d.json"), "11"}).code == cli::kInputError);
  CHECK(invoke({"surgery", fixture("v_poset.json")}).code == cli::kSuccess);
}

TEST_CASE("JSON output", "[cli][json]") {
  const Result v = invoke({"--format", "json", "validate", fixture("sys_b.json")});
  CHECK(v.code == cli::kSuccess);
  CHECK(contains(v.out, "\"valid\": true"));
}

TEST_CASE("exhausting the node budget is reported distinctly", "[cli][budget]") {
  const Result r = invoke({"--budget", "0", "props", fixture("mixed_chain.json")});
  CHECK(r.code == cli::kResourceLimit);
}

TEST_CASE("usage errors", "[cli][usage]") {
  CHECK(invoke({}).code == cli::kInputError);
  CHECK(invoke({"frobnicate"}).code == cli::kInputError);
  CHECK(invoke({"--format", "xml", "validate", fixture("sys_a.json")}).code == cli::kInputError);
}

TEST_CASE("the installed executable runs", "[cli][binary]") {
  const std::string cmd = std::string("\"") + REFMON_CLI_PATH + "\" validate \"" + fixture("sys_a.json") + "\" > " +
                          (fs::temp_directory_path() / "refmon_test_cli_binary.txt").string();
  CHECK(std::system(cmd.c_str()) == 0);
}
