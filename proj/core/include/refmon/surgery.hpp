#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "refmon/isystem.hpp"
#include "refmon/monoid.hpp"
#include "refmon/random.hpp"

namespace refmon {

/// One crowned pushout: `pair` lives on the before-system, `crown.system` is the after-system.
struct SurgeryStep {
  CompatiblePair pair;
  CrownResult crown;
  std::vector<std::size_t> psi_before;  // before index -> target index
  std::vector<std::size_t> psi_after;   // after index -> target index

  const SystemPtr& before() const { return pair.system; }
  const SystemPtr& after() const { return crown.system; }
};

/// From a pullback of `target` along `initial_psi` down to a system isomorphic to `target`.
struct SurgeryTrace {
  SystemPtr target;
  SystemPtr initial;
  std::vector<std::size_t> initial_psi;
  std::vector<SurgeryStep> steps;

  const SystemPtr& final_system() const { return steps.empty() ? initial : steps.back().after(); }
  const std::vector<std::size_t>& final_psi() const { return steps.empty() ? initial_psi : steps.back().psi_after; }
};

struct SurgeryOptions {
  /// Search nodes (candidate pairs tried) before NoValidStep.
  std::size_t max_nodes = 20000;
};

/// Collapses the chain-tree pullback over down(k) back to restrict(J, down(k)); throws NotMaximal, NoValidStep.
SurgeryTrace collapse_sequence(const ISystem& j, std::size_t k, const SurgeryOptions& options = {});
/// Collapses the disjoint union of the principal down-systems of the maximal elements back to J.
SurgeryTrace maximal_decomposition(const ISystem& j, const SurgeryOptions& options = {});
/// Collapses a pullback of `target` along `psi` by successive crowned pushouts.
SurgeryTrace collapse_pullback(const SystemPtr& target, const Poset& source, const std::vector<std::size_t>& psi,
                               const SurgeryOptions& options = {});

/// The element map pi of a step and its section s (after -> before).
MonElem step_project(const SurgeryStep& step, const Monoid& before, const Monoid& after, const MonElem& x);
MonElem step_section(const SurgeryStep& step, const Monoid& before, const Monoid& after, const MonElem& y);

struct PushoutReport {
  std::size_t samples = 0;
  std::size_t equalization_failures = 0;
  std::size_t section_failures = 0;
  std::size_t move_failures = 0;
  std::vector<std::string> messages;
  bool ok() const { return equalization_failures + section_failures + move_failures == 0; }
};

PushoutReport verify_pushout(const SurgeryStep& step, std::size_t samples, Rng& rng);

/// Structural and sampled element-level checks of a whole trace; empty when everything holds.
std::vector<std::string> trace_violations(const SurgeryTrace& trace, std::size_t samples, Rng& rng);

/// DOT rendering of stage t (0 = initial), nodes labelled with their target element.
std::string stage_dot(const SurgeryTrace& trace, std::size_t stage, const std::string& name);

}  // namespace refmon
