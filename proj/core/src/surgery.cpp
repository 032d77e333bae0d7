#include "refmon/surgery.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "refmon/errors.hpp"

namespace refmon {

namespace {

IntVector block_of(const ISystem& s, const MonElem& x, std::size_t i) {
  const auto b = x.vec.begin() + static_cast<std::ptrdiff_t>(s.offset(i));
  return IntVector(b, b + static_cast<std::ptrdiff_t>(s.block_dim(i)));
}

SystemHom identity_group_hom(const SystemPtr& source, const SystemPtr& target, const std::vector<std::size_t>& psi) {
  SystemHom f{source, target, psi, {}};
  for (std::size_t i = 0; i < source->size(); ++i) f.group_maps.push_back(IntMatrix::identity(source->group(i).dim()));
  return f;
}

bool matches_pullback(const ISystem& s, const ISystem& target, const std::vector<std::size_t>& psi) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.kind(i) != target.kind(psi[i]) || !(s.group(i) == target.group(psi[i]))) return false;
    for (std::size_t j = 0; j < s.size(); ++j)
      if (s.poset().lt(i, j) && s.hat(i, j) != target.hat(psi[i], psi[j])) return false;
  }
  return true;
}

bool is_bijection(const std::vector<std::size_t>& psi, std::size_t n) {
  if (psi.size() != n) return false;
  std::vector<bool> hit(n, false);
  for (std::size_t x : psi) {
    if (x >= n || hit[x]) return false;
    hit[x] = true;
  }
  return true;
}

struct Candidate {
  std::size_t shared = 0;
  std::size_t u = 0, v = 0;
  LowerSet l1, l2;
  std::vector<std::size_t> iso;
};

std::vector<Candidate> candidates(const ISystem& s, const std::vector<std::size_t>& psi, std::size_t target_size) {
  const Poset& p = s.poset();
  const std::size_t n = p.size();
  std::vector<bool> injective(n, true);
  std::vector<ElemSet> image(n, ElemSet(target_size));
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t x : p.down(u).members()) {
      if (image[u].test(psi[x])) injective[u] = false;
      image[u].set(psi[x]);
    }
  std::vector<Candidate> out;
  std::set<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> seen;
  for (std::size_t u = 0; u < n; ++u) {
    if (!injective[u]) continue;
    for (std::size_t v = u + 1; v < n; ++v) {
      if (!injective[v]) continue;
      const ElemSet shared = image[u] & image[v];
      if (shared.empty()) continue;
      Candidate c;
      c.shared = shared.count();
      c.u = u;
      c.v = v;
      c.l1 = p.empty_set();
      c.l2 = p.empty_set();
      std::vector<std::size_t> by_target(target_size, kNone);
      for (std::size_t x : p.down(v).members())
        if (shared.test(psi[x])) {
          c.l2.set(x);
          by_target[psi[x]] = x;
        }
      c.iso.assign(n, kNone);
      for (std::size_t x : p.down(u).members())
        if (shared.test(psi[x])) {
          c.l1.set(x);
          c.iso[x] = by_target[psi[x]];
        }
      if (c.l1.intersects(c.l2)) continue;
      auto key = std::minmax(c.l1.members(), c.l2.members());
      if (!seen.insert({key.first, key.second}).second) continue;
      out.push_back(std::move(c));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return a.shared > b.shared; });
  return out;
}

class Collapser {
 public:
  Collapser(SystemPtr target, const SurgeryOptions& opt) : target_(std::move(target)), opt_(opt) {}

  bool search(const SystemPtr& sys, const std::vector<std::size_t>& psi, std::vector<SurgeryStep>& steps) {
    if (is_bijection(psi, target_->size())) return is_order_isomorphism(sys->poset(), target_->poset(), psi);
    for (Candidate& c : candidates(*sys, psi, target_->size())) {
      if (++nodes_ > opt_.max_nodes) throw NoValidStep("surgery: search budget exhausted");
      CompatiblePair cp{sys, c.l1, c.l2, c.iso};
      if (!pair_violations(cp).empty()) continue;
      CrownResult cr;
      try {
        cr = crown_system(cp);
      } catch (const Error&) {
        continue;
      }
      std::vector<std::size_t> next(cr.kept.size());
      for (std::size_t x = 0; x < cr.kept.size(); ++x) next[x] = psi[cr.kept[x]];
      if (!projection_violations(cr.system->poset(), target_->poset(), next).empty()) continue;
      if (!matches_pullback(*cr.system, *target_, next)) continue;
      steps.push_back(SurgeryStep{cp, cr, psi, next});
      if (search(cr.system, next, steps)) return true;
      steps.pop_back();
    }
    return false;
  }

 private:
  SystemPtr target_;
  SurgeryOptions opt_;
  std::size_t nodes_ = 0;
};

}  // namespace

SurgeryTrace collapse_pullback(const SystemPtr& target, const Poset& source, const std::vector<std::size_t>& psi,
                               const SurgeryOptions& options) {
  SurgeryTrace t;
  t.target = target;
  t.initial = pullback(target, source, psi).first;
  t.initial_psi = psi;
  Collapser c(target, options);
  if (!c.search(t.initial, psi, t.steps)) throw NoValidStep("surgery: no sequence of compatible pairs reaches the target");
  return t;
}

SurgeryTrace collapse_sequence(const ISystem& j, std::size_t k, const SurgeryOptions& options) {
  if (k >= j.size()) throw UnknownElement("collapse_sequence: unknown element");
  if (j.poset().up(k).count() != 1) throw NotMaximal("collapse_sequence: '" + j.poset().id(k) + "' is not maximal");
  std::vector<std::size_t> keep;
  auto target = std::make_shared<const ISystem>(restrict_system(j, j.poset().down(k), &keep));
  const std::size_t root = static_cast<std::size_t>(std::find(keep.begin(), keep.end(), k) - keep.begin());
  const ChainTree tree = chain_tree(target->poset(), root);
  SurgeryTrace t = collapse_pullback(target, tree.tree, tree.projection, options);
  if (!t.initial->poset().chain_up_property())
    throw InternalInvariantViolation("collapse_sequence: chain-tree pullback lacks the chain-up property");
  return t;
}

SurgeryTrace maximal_decomposition(const ISystem& j, const SurgeryOptions& options) {
  const Poset& p = j.poset();
  std::vector<std::string> ids;
  std::vector<std::size_t> psi;
  std::vector<std::pair<std::size_t, std::size_t>> rel;
  for (std::size_t k : p.maximal_elements()) {
    const auto members = p.down(k).members();
    const std::size_t base = ids.size();
    for (std::size_t i : members) {
      ids.push_back(p.id(i) + "@" + p.id(k));
      psi.push_back(i);
    }
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = 0; b < members.size(); ++b)
        if (p.lt(members[a], members[b])) rel.emplace_back(base + a, base + b);
  }
  auto target = std::make_shared<const ISystem>(j);
  return collapse_pullback(target, Poset::from_relations(ids, rel), psi, options);
}

MonElem step_project(const SurgeryStep& step, const Monoid& before, const Monoid& after, const MonElem& x) {
  return map_elem(step.crown.projection, before, after, x);
}

MonElem step_section(const SurgeryStep& step, const Monoid& before, const Monoid& after, const MonElem& y) {
  const ISystem& a = after.system();
  const MonElem yn = after.normalize(y);
  MonElem out = before.zero();
  for (std::size_t k : after.poset().max_of(y.support))
    out = before.add(out, before.chi(step.crown.kept[k], block_of(a, yn, k)));
  return out;
}

PushoutReport verify_pushout(const SurgeryStep& step, std::size_t samples, Rng& rng) {
  PushoutReport r;
  r.samples = samples;
  const Monoid mb(step.before());
  const Monoid ma(step.after());
  const ISystem& b = mb.system();
  const auto l1 = step.pair.i1.members();
  auto swap_to_i2 = [&](const MonElem& x) {
    MonElem out = mb.zero();
    for (std::size_t i : x.support.members()) {
      const std::size_t t = step.pair.iso[i];
      out.support.set(t);
      const IntVector blk = block_of(b, x, i);
      for (std::size_t c = 0; c < blk.size(); ++c) out.vec[b.offset(t) + c] = blk[c];
    }
    return out;
  };
  for (std::size_t n = 0; n < samples; ++n) {
    const MonElem x = random_element(mb, rng, step.pair.i1);
    const MonElem px = step_project(step, mb, ma, x);
    const MonElem py = step_project(step, mb, ma, swap_to_i2(x));
    if (!ma.eq(px, py)) {
      ++r.equalization_failures;
      r.messages.push_back("equalization fails on " + mb.to_string(x));
    }
    const MonElem y = random_element(ma, rng);
    if (!ma.eq(step_project(step, mb, ma, step_section(step, mb, ma, y)), y)) {
      ++r.section_failures;
      r.messages.push_back("section fails on " + ma.to_string(y));
    }
    if (!l1.empty()) {
      const MonElem base = random_element(mb, rng);
      const std::size_t i = l1[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(l1.size()) - 1))];
      const IntVector alpha = random_coordinate(b, rng, i, true);
      const MonElem u = mb.add(base, mb.chi(i, alpha));
      const MonElem v = mb.add(base, mb.chi(step.pair.iso[i], alpha));
      if (!ma.eq(step_project(step, mb, ma, u), step_project(step, mb, ma, v))) {
        ++r.move_failures;
        r.messages.push_back("elementary move fails on " + mb.to_string(u));
      }
    }
  }
  return r;
}

std::vector<std::string> trace_violations(const SurgeryTrace& trace, std::size_t samples, Rng& rng) {
  std::vector<std::string> out;
  const std::size_t n_target = trace.target->size();
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    const SurgeryStep& st = trace.steps[s];
    const std::string tag = "step " + std::to_string(s + 1) + ": ";
    for (const auto& v : pair_violations(st.pair)) out.push_back(tag + v);
    for (const auto& v : validate(*st.after())) out.push_back(tag + v.to_string());
    for (std::size_t x = 0; x < st.psi_before.size(); ++x)
      if (st.psi_after[st.crown.collapse[x]] != st.psi_before[x]) out.push_back(tag + "projection does not factor psi");
  }
  if (!is_bijection(trace.final_psi(), n_target) ||
      !is_order_isomorphism(trace.final_system()->poset(), trace.target->poset(), trace.final_psi()))
    out.push_back("final poset is not isomorphic to the target");
  if (!out.empty()) return out;

  std::vector<std::unique_ptr<Monoid>> stages;
  stages.push_back(std::make_unique<Monoid>(trace.initial));
  for (const auto& st : trace.steps) stages.push_back(std::make_unique<Monoid>(st.after()));
  const Monoid target(trace.target);
  const SystemHom to_target = identity_group_hom(trace.initial, trace.target, trace.initial_psi);
  const SystemHom from_final = identity_group_hom(trace.final_system(), trace.target, trace.final_psi());
  for (std::size_t n = 0; n < samples; ++n) {
    const MonElem x = random_element(*stages[0], rng);
    MonElem cur = x;
    for (std::size_t s = 0; s < trace.steps.size(); ++s)
      cur = step_project(trace.steps[s], *stages[s], *stages[s + 1], cur);
    const MonElem direct = map_elem(to_target, *stages[0], target, x);
    const MonElem composite = map_elem(from_final, *stages.back(), target, cur);
    if (!target.eq(direct, composite))
      out.push_back("composite projection differs from psi on " + stages[0]->to_string(x));
  }
  return out;
}

std::string stage_dot(const SurgeryTrace& trace, std::size_t stage, const std::string& name) {
  if (stage > trace.steps.size()) throw PreconditionViolated("stage_dot: no such stage");
  const SystemPtr& sys = stage == 0 ? trace.initial : trace.steps[stage - 1].after();
  const std::vector<std::size_t>& psi = stage == 0 ? trace.initial_psi : trace.steps[stage - 1].psi_after;
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
      if (ch == '"' || ch == '\\') out += '\\';
      out += ch;
    }
    return out + "\"";
  };
  const Poset& p = sys->poset();
  std::ostringstream os;
  os << "digraph " << quote(name) << " {\n  rankdir=TB;\n  node [shape=box, style=rounded];\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    os << "  " << quote(p.id(i)) << " [label=" << quote(trace.target->poset().id(psi[i]));
    if (stage > 0 && trace.steps[stage - 1].pair.i1.test(trace.steps[stage - 1].crown.kept[i])) os << ", color=blue";
    os << "];\n";
  }
  for (std::size_t j = 0; j < p.size(); ++j)
    for (std::size_t i : p.lower_covers(j)) os << "  " << quote(p.id(j)) << " -> " << quote(p.id(i)) << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace refmon
