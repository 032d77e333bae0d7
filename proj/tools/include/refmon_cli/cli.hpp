#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "refmon/monoid.hpp"

namespace refmon::cli {

enum ExitCode : int { kSuccess = 0, kPropertyFailure = 1, kInputError = 2, kResourceLimit = 3 };

enum class Format { Text, Json };

struct RunConfig {
  std::uint64_t seed = 1;
  std::size_t samples = 100;
  /// Feasibility node budget.
  std::size_t budget = 200000;
  Format format = Format::Text;
  /// Where surgery writes one DOT file per stage; empty disables.
  std::string dot_dir;
};

/// Element expressions: `0`, `id`, `id[n,g..]`, `k*expr`, `(a+b)`, `a+b`, or a JSON element literal.
/// A bare id is the prime chi_i(0) or chi_i(1, 0). Throws ParseError.
MonElem parse_expression(const Monoid& m, std::string_view text);
/// Expressions separated by whitespace, `,` or `;`.
std::vector<MonElem> parse_expression_list(const Monoid& m, std::string_view text);

/// The 2x2 table of a refinement, rows x1, x2 and columns y1, y2.
std::string render_square(const Monoid& m, const RefinementSquare& s, const MonElem& x1, const MonElem& x2,
                          const MonElem& y1, const MonElem& y2);

int cmd_validate(const std::string& path, const RunConfig& cfg, std::ostream& out, std::ostream& err);
/// `op args`: eq A B | add A B | leq A B | refine X1,X2 ; Y1,Y2 | primes | gens | classify A.
int cmd_eval(const std::string& path, const std::string& expr, const RunConfig& cfg, std::ostream& out,
             std::ostream& err);
int cmd_props(const std::string& path, const RunConfig& cfg, std::ostream& out, std::ostream& err);
/// Collapse sequence at k, or the maximal decomposition when k is empty.
int cmd_surgery(const std::string& path, const std::optional<std::string>& k, const RunConfig& cfg,
                std::ostream& out, std::ostream& err);
int cmd_roundtrip(const std::string& path, const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command line, argv[0] included.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace refmon::cli
