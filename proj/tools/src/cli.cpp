#include "refmon_cli/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "refmon/errors.hpp"
#include "refmon/properties.hpp"
#include "refmon/random.hpp"
#include "refmon/surgery.hpp"

namespace refmon::cli {

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SystemPtr load(const std::string& path) { return std::make_shared<const ISystem>(parse_system(read_file(path))); }

/// Maps library errors to exit codes.
int guarded(std::ostream& err, const RunConfig& cfg, const std::function<int()>& body) {
  set_default_node_budget(cfg.budget);
  try {
    return body();
  } catch (const ResourceLimit& e) {
    err << "resource limit: " << e.what() << '\n';
    return kResourceLimit;
  } catch (const InternalInvariantViolation& e) {
    err << "internal invariant violated: " << e.what() << '\n';
    return kPropertyFailure;
  } catch (const NoValidStep& e) {
    err << "no valid step: " << e.what() << '\n';
    return kPropertyFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

ordered_json elem_json(const Monoid& m, const MonElem& x) { return ordered_json::parse(m.to_json(x)); }

/// Canonical form of a result after the eq re-check.
MonElem checked(const Monoid& m, const MonElem& x) {
  m.check(x);
  const MonElem n = m.normalize(x);
  if (!m.eq(n, x)) throw InternalInvariantViolation("result does not re-validate: " + m.to_string(x));
  return n;
}

std::string pad(const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); }

void write_text_lines(std::ostream& out, const std::vector<MonElem>& xs, const Monoid& m) {
  for (const MonElem& x : xs) out << m.to_string(checked(m, x)) << '\n';
}

}  // namespace

std::string render_square(const Monoid& m, const RefinementSquare& s, const MonElem& x1, const MonElem& x2,
                          const MonElem& y1, const MonElem& y2) {
  const std::string rows[2] = {"x1 = " + m.to_string(x1), "x2 = " + m.to_string(x2)};
  const std::string head[2] = {"y1 = " + m.to_string(y1), "y2 = " + m.to_string(y2)};
  const std::string cells[2][2] = {{m.to_string(s.z11), m.to_string(s.z12)}, {m.to_string(s.z21), m.to_string(s.z22)}};
  const std::size_t w0 = std::max(rows[0].size(), rows[1].size());
  const std::size_t w1 = std::max({head[0].size(), cells[0][0].size(), cells[1][0].size()});
  std::ostringstream o;
  o << pad("", w0) << " | " << pad(head[0], w1) << " | " << head[1] << '\n';
  o << std::string(w0, '-') << "-+-" << std::string(w1, '-') << "-+-"
    << std::string(std::max({head[1].size(), cells[0][1].size(), cells[1][1].size()}), '-') << '\n';
  for (int r = 0; r < 2; ++r) o << pad(rows[r], w0) << " | " << pad(cells[r][0], w1) << " | " << cells[r][1] << '\n';
  return o.str();
}

int cmd_validate(const std::string& path, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, cfg, [&] {
    const SystemSpec spec = parse_system_spec(read_file(path));
    const auto violations = validate(spec);
    if (cfg.format == Format::Json) {
      ordered_json j;
      j["valid"] = violations.empty();
      j["elements"] = spec.poset.size();
      j["violations"] = ordered_json::array();
      for (const Violation& v : violations)
        j["violations"].push_back({{"condition", v.condition}, {"where", v.where}, {"message", v.message}});
      out << j.dump(2) << '\n';
    } else if (violations.empty()) {
      out << "valid: " << spec.poset.size() << " elements\n";
    } else {
      for (const Violation& v : violations) out << v.to_string() << '\n';
      out << "invalid: " << violations.size() << " violation(s)\n";
    }
    return violations.empty() ? kSuccess : kPropertyFailure;
  });
}

int cmd_eval(const std::string& path, const std::string& expr, const RunConfig& cfg, std::ostream& out,
             std::ostream& err) {
  return guarded(err, cfg, [&] {
    const Monoid m(load(path));
    std::string text = expr;
    const std::size_t b = text.find_first_not_of(" \t");
    if (b == std::string::npos) throw ParseError("expression: empty");
    const std::size_t e = text.find_first_of(" \t", b);
    const std::string op = text.substr(b, e == std::string::npos ? std::string::npos : e - b);
    const std::string rest = e == std::string::npos ? "" : text.substr(e);
    const bool json = cfg.format == Format::Json;
    auto args = [&](std::size_t n) {
      auto xs = parse_expression_list(m, rest);
      if (xs.size() != n)
        throw ParseError("expression: '" + op + "' takes " + std::to_string(n) + " argument(s), got " +
                         std::to_string(xs.size()));
      return xs;
    };
    ordered_json j;
    j["op"] = op;
    if (op == "eq") {
      const auto xs = args(2);
      const bool r = m.eq(xs[0], xs[1]);
      if (r != m.eq(xs[1], xs[0])) throw InternalInvariantViolation("eq is not symmetric");
      if (json) j["result"] = r;
      else out << (r ? "true" : "false") << '\n';
    } else if (op == "add") {
      const auto xs = args(2);
      const MonElem s = checked(m, m.add(xs[0], xs[1]));
      if (json) j["result"] = elem_json(m, s);
      else out << m.to_string(s) << '\n';
    } else if (op == "leq") {
      const auto xs = args(2);
      const auto z = m.leq(xs[0], xs[1]);
      if (z && !m.eq(m.add(xs[0], *z), xs[1])) throw InternalInvariantViolation("leq witness does not re-validate");
      if (json) {
        j["result"] = z.has_value();
        j["witness"] = z ? elem_json(m, checked(m, *z)) : ordered_json(nullptr);
      } else {
        out << (z ? m.to_string(checked(m, *z)) : "NONE") << '\n';
      }
    } else if (op == "refine") {
      const auto xs = args(4);
      const RefinementSquare sq = m.refine(xs[0], xs[1], xs[2], xs[3]);
      if (!m.valid_square(sq, xs[0], xs[1], xs[2], xs[3]))
        throw InternalInvariantViolation("refinement does not re-validate");
      const RefinementSquare c{checked(m, sq.z11), checked(m, sq.z12), checked(m, sq.z21), checked(m, sq.z22)};
      if (json) {
        j["result"] = {{"z11", elem_json(m, c.z11)},
                       {"z12", elem_json(m, c.z12)},
                       {"z21", elem_json(m, c.z21)},
                       {"z22", elem_json(m, c.z22)}};
      } else {
        out << render_square(m, c, m.normalize(xs[0]), m.normalize(xs[1]), m.normalize(xs[2]), m.normalize(xs[3]));
      }
    } else if (op == "primes" || op == "gens") {
      args(0);
      const auto xs = op == "primes" ? m.primes() : m.generators();
      if (json) {
        j["result"] = ordered_json::array();
        for (const MonElem& x : xs) j["result"].push_back(elem_json(m, checked(m, x)));
      } else {
        write_text_lines(out, xs, m);
      }
    } else if (op == "classify") {
      const auto xs = args(1);
      const ElemClass c = m.classify(xs[0]);
      if (json) {
        j["result"] = to_string(c);
        j["idempotent"] = m.is_idempotent(xs[0]);
      } else {
        out << to_string(c) << (m.is_idempotent(xs[0]) ? " idempotent" : "") << '\n';
      }
    } else {
      throw ParseError("expression: unknown operation '" + op + "' (eq, add, leq, refine, primes, gens, classify)");
    }
    if (json) out << j.dump(2) << '\n';
    return kSuccess;
  });
}

int cmd_props(const std::string& path, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, cfg, [&] {
    const Monoid m(load(path));
    Rng rng(cfg.seed);
    PropertyOptions opt;
    opt.samples = cfg.samples;
    const auto results = run_properties(m, rng, opt);
    bool ok = true;
    for (const auto& r : results) ok = ok && r.ok();
    if (cfg.format == Format::Json) {
      ordered_json j;
      j["system"] = path;
      j["seed"] = cfg.seed;
      j["samples"] = cfg.samples;
      j["properties"] = ordered_json::array();
      for (const auto& r : results) {
        ordered_json p{{"name", r.name}, {"checked", r.checked}, {"failed", r.failed}};
        if (!r.skipped.empty()) p["skipped"] = r.skipped;
        if (!r.ok()) p["first_failure"] = r.first_failure;
        j["properties"].push_back(p);
      }
      j["ok"] = ok;
      out << j.dump(2) << '\n';
    } else {
      out << "system: " << path << "\nseed: " << cfg.seed << "\nsamples: " << cfg.samples << '\n';
      for (const auto& r : results) {
        out << pad(r.name, 20) << ' ';
        if (!r.skipped.empty()) {
          out << "SKIP (" << r.skipped << ")\n";
          continue;
        }
        out << (r.ok() ? "PASS " : "FAIL ") << r.checked - r.failed << '/' << r.checked << '\n';
        if (!r.ok()) out << "    first failure: " << r.first_failure << '\n';
      }
      out << (ok ? "all properties hold" : "property failures") << '\n';
    }
    return ok ? kSuccess : kPropertyFailure;
  });
}

int cmd_surgery(const std::string& path, const std::optional<std::string>& k, const RunConfig& cfg,
                std::ostream& out, std::ostream& err) {
  return guarded(err, cfg, [&] {
    const SystemPtr sys = load(path);
    const SurgeryTrace trace =
        k ? collapse_sequence(*sys, sys->poset().index_of(*k)) : maximal_decomposition(*sys);
    Rng rng(cfg.seed);
    std::vector<PushoutReport> reports;
    for (const SurgeryStep& s : trace.steps) reports.push_back(verify_pushout(s, cfg.samples, rng));
    const auto violations = trace_violations(trace, cfg.samples, rng);
    const Poset& target = trace.target->poset();
    const Poset& final_poset = trace.final_system()->poset();
    const bool iso = is_order_isomorphism(final_poset, target, trace.final_psi());
    bool ok = iso && violations.empty();
    for (const auto& r : reports) ok = ok && r.ok();

    std::vector<std::string> dot_files;
    if (!cfg.dot_dir.empty()) {
      std::filesystem::create_directories(cfg.dot_dir);
      for (std::size_t t = 0; t <= trace.steps.size(); ++t) {
        const std::string name = "stage_" + std::to_string(t);
        const std::filesystem::path file = std::filesystem::path(cfg.dot_dir) / (name + ".dot");
        std::ofstream f(file);
        if (!f) throw ParseError("cannot write '" + file.string() + "'");
        f << stage_dot(trace, t, name);
        dot_files.push_back(file.string());
      }
    }

    const std::string mode = k ? "collapse at " + *k : "maximal decomposition";
    if (cfg.format == Format::Json) {
      ordered_json j;
      j["mode"] = mode;
      j["target_elements"] = target.size();
      j["initial_elements"] = trace.initial->size();
      j["steps"] = ordered_json::array();
      for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        const SurgeryStep& s = trace.steps[t];
        j["steps"].push_back({{"collapsed", s.pair.i2.count()},
                              {"elements_after", s.after()->size()},
                              {"samples", reports[t].samples},
                              {"equalization_failures", reports[t].equalization_failures},
                              {"section_failures", reports[t].section_failures},
                              {"move_failures", reports[t].move_failures}});
      }
      j["final_elements"] = final_poset.size();
      j["isomorphic_to_target"] = iso;
      j["violations"] = violations;
      j["dot_files"] = dot_files;
      j["ok"] = ok;
      out << j.dump(2) << '\n';
    } else {
      out << mode << "\ntarget: " << target.size() << " elements\ninitial: " << trace.initial->size()
          << " elements\n";
      for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        const SurgeryStep& s = trace.steps[t];
        const Poset& before = s.before()->poset();
        std::string i1, i2;
        for (std::size_t i : s.pair.i1.members()) i1 += (i1.empty() ? "" : ",") + before.id(i);
        for (std::size_t i : s.pair.i2.members()) i2 += (i2.empty() ? "" : ",") + before.id(i);
        out << "step " << t + 1 << ": {" << i2 << "} onto {" << i1 << "} -> " << s.after()->size()
            << " elements; pushout " << (reports[t].ok() ? "ok" : "FAILED") << " (" << reports[t].samples
            << " samples)\n";
        for (const auto& msg : reports[t].messages) out << "    " << msg << '\n';
      }
      for (const auto& v : violations) out << "violation: " << v << '\n';
      out << "final: " << final_poset.size() << " elements, isomorphic to target: " << (iso ? "yes" : "no") << '\n';
      for (const auto& f : dot_files) out << "wrote " << f << '\n';
    }
    return ok ? kSuccess : kPropertyFailure;
  });
}

int cmd_roundtrip(const std::string& path, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, cfg, [&] {
    const Monoid m(load(path));
    std::vector<std::string> problems;
    const bool ok = roundtrip_check(m, &problems);
    if (cfg.format == Format::Json) {
      out << ordered_json{{"roundtrip", ok}, {"problems", problems}}.dump(2) << '\n';
    } else {
      out << (ok ? "true" : "false") << '\n';
      for (const auto& p : problems) out << "  " << p << '\n';
    }
    return ok ? kSuccess : kPropertyFailure;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Primely generated refinement monoids M(J) of I-systems"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string format = "text";
  app.add_option("--seed", cfg.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--samples", cfg.samples, "Samples per property or pushout check")->capture_default_str();
  app.add_option("--budget", cfg.budget, "Node budget of the integer feasibility search")->capture_default_str();
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  app.add_option("--dot-dir", cfg.dot_dir, "Directory for DOT files of surgery stages");

  std::string file;
  std::vector<std::string> words;
  std::string k;
  auto* validate_cmd = app.add_subcommand("validate", "Check a system file");
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate eq, add, leq, refine, primes, gens or classify");
  auto* props_cmd = app.add_subcommand("props", "Run the property suite on sampled elements");
  auto* surgery_cmd = app.add_subcommand("surgery", "Collapse a pullback by crowned pushouts");
  auto* roundtrip_cmd = app.add_subcommand("roundtrip", "Rebuild the system from its monoid and compare");
  for (auto* c : {validate_cmd, eval_cmd, props_cmd, surgery_cmd, roundtrip_cmd}) {
    c->fallthrough();
    c->add_option("file", file, "System JSON")->required();
  }
  eval_cmd->add_option("expr", words, "Operation and arguments, e.g. \"leq p q\"")->required();
  surgery_cmd->add_option("k", k, "Maximal element; omitted for the maximal decomposition");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }
  cfg.format = format == "json" ? Format::Json : Format::Text;

  if (*validate_cmd) return cmd_validate(file, cfg, out, err);
  if (*props_cmd) return cmd_props(file, cfg, out, err);
  if (*roundtrip_cmd) return cmd_roundtrip(file, cfg, out, err);
  if (*surgery_cmd) return cmd_surgery(file, k.empty() ? std::nullopt : std::optional<std::string>(k), cfg, out, err);
  std::string expr;
  for (const auto& w : words) expr += (expr.empty() ? "" : " ") + w;
  return cmd_eval(file, expr, cfg, out, err);
}

}  // namespace refmon::cli
