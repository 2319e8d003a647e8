#ifndef PBCMDP_TRANSITION_HPP
#define PBCMDP_TRANSITION_HPP

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pbcmdp/engine.hpp"

namespace pbcmdp {

/// Value assignment over the fluent constants (declaration order).
struct State {
  std::vector<int> values;
  std::string label;
};

/// Value assignment over the action constants. Under the no-concurrency
/// assumption at most one entry is true; check_assumptions verifies that.
struct ActionProfile {
  std::vector<int> values;
  std::string label;
};

struct TransitionEdge {
  int from = -1;
  int action = -1;
  int to = -1;
  double probability = 0.0;
  double reward = 0.0;
};

struct TransitionSystem {
  std::vector<State> states;
  std::vector<ActionProfile> actions;
  std::vector<TransitionEdge> edges;  // probability > 0 only
};

struct AssumptionViolation {
  int assumption = 0;  // 1, 2, or 3
  std::string witness;
};

struct AssumptionReport {
  std::vector<AssumptionViolation> violations;
  std::vector<std::string> notes;
  bool initial_check_applicable = true;
  bool ok() const { return violations.empty(); }
};

struct AssumptionError : std::runtime_error {
  explicit AssumptionError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Extracts the labeled transition system of a compiled description and
/// answers the per-triple queries. One enumeration of the one-step program is
/// shared by everything: probabilities, rewards, successor lookup, and the
/// assumption checks.
///
/// States come from the step program at horizon 0 and action profiles from
/// horizon 1, both without the initial-state part; probabilities are
/// conditionals of the one-step program, so the initial-state distribution
/// never leaks into transitions.
class TransitionAnalysis {
 public:
  explicit TransitionAnalysis(CompiledDescription desc,
                              EnumerationLimits limits = {});

  const CompiledDescription& description() const { return desc_; }
  const std::vector<int>& fluent_constants() const { return fluents_; }
  const std::vector<int>& action_constants() const { return actions_decl_; }
  const std::vector<int>& pf_constants() const { return pfs_; }

  const std::vector<State>& states();
  const std::vector<ActionProfile>& actions();
  int state_index(const std::vector<int>& fluent_values);
  int action_index(const std::vector<int>& action_values);

  /// P(1:s' | 0:s & 0:e); throws InfeasibleQuery when (s,e) has no stable
  /// model.
  double transition_probability(int s, int a, int s2);

  /// E[U(0:s & 0:e & 1:s')]; a zero-probability triple is an error, never a
  /// silent 0.
  double transition_reward(int s, int a, int s2);

  /// The unique successor state for (s, e, pf); zero or multiple successors
  /// throw AssumptionError naming the violation.
  int successor(int s, int a, const std::vector<int>& pf_values);

  AssumptionReport check_assumptions();

  TransitionSystem system();

  /// True when some stable model of the full horizon-0 program hits s.
  bool initial_consistent(int s);

  /// Cached full translation (with the init part) and its inference.
  const GroundProgram& full_program(int m);
  Inference& full_inference(int m);
  Inference& step_inference(int m);  // dynamic-only programs

  // Timed conjunctions over the signature of full_program(m).
  Formula state_formula(int state, int step, const GroundSignature& sig);
  Formula action_formula(int action, int step, const GroundSignature& sig);
  Formula history_formula(std::span<const int> state_seq,
                          std::span<const int> action_seq,
                          const GroundSignature& sig);
  /// C_pi: conjunction over states and steps of (i:s -> i:pi(s,i)).
  Formula policy_formula(const std::vector<std::vector<int>>& action_by_state,
                         int m, const GroundSignature& sig);

 private:
  void ensure_states();
  void ensure_actions();
  void ensure_transitions();
  std::string state_label(const std::vector<int>& values) const;
  std::string profile_label(const std::vector<int>& values) const;

  CompiledDescription desc_;
  EnumerationLimits limits_;
  std::vector<int> fluents_;
  std::vector<int> actions_decl_;
  std::vector<int> pfs_;
  std::vector<int> initpfs_;

  std::vector<State> states_;
  std::map<std::vector<int>, int> state_index_;
  bool states_done_ = false;

  std::vector<ActionProfile> actions_;
  std::map<std::vector<int>, int> action_index_;
  bool actions_done_ = false;

  struct TripleStats {
    double mass = 0.0;
    double utility_mass = 0.0;  // sum of probability * utility
  };
  std::map<std::tuple<int, int, int>, TripleStats> triples_;
  std::map<std::pair<int, int>, double> pair_mass_;
  std::map<std::vector<int>, int> pf_index_;
  // (s, a, pf) -> successor states seen
  std::map<std::tuple<int, int, int>, std::vector<int>> pf_successors_;
  bool transitions_done_ = false;

  std::map<int, std::unique_ptr<Inference>> full_;
  std::map<int, std::unique_ptr<Inference>> step_;
};

}  // namespace pbcmdp

#endif
