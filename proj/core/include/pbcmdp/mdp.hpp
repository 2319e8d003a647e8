#ifndef PBCMDP_MDP_HPP
#define PBCMDP_MDP_HPP

#include <span>
#include <vector>

#include "pbcmdp/transition.hpp"

namespace pbcmdp {

/// Dense |A| x |S| x |S| transition and reward tensors. Rows T[a][s][.] sum
/// to one when the description meets the assumptions; reward defaults to 0 on
/// zero-probability cells.
struct Mdp {
  std::vector<std::string> state_labels;
  std::vector<std::string> action_labels;
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> T;  // [a][s][s2]
  std::vector<double> R;

  double t(int a, int s, int s2) const {
    return T[index(a, s, s2)];
  }
  double r(int a, int s, int s2) const {
    return R[index(a, s, s2)];
  }
  std::size_t index(int a, int s, int s2) const {
    return (static_cast<std::size_t>(a) * static_cast<std::size_t>(num_states) +
            static_cast<std::size_t>(s)) *
               static_cast<std::size_t>(num_states) +
           static_cast<std::size_t>(s2);
  }
};

/// Builds M(D). Unless `unchecked`, a failing assumption report is an
/// AssumptionError.
Mdp build_mdp(TransitionAnalysis& analysis, bool unchecked = false);

struct NonStationaryPolicy {
  int horizon = 0;
  // action[state][step], step in 0..horizon-1
  std::vector<std::vector<int>> action;
  // value[state][step], step in 0..horizon (value[.][horizon] == 0)
  std::vector<std::vector<double>> value;
};

struct StationaryPolicy {
  std::vector<int> action;
  std::vector<double> value;
  double gamma = 0.0;
  int sweeps = 0;
  std::vector<double> residuals;  // sup-norm residual per sweep
};

double history_reward(const Mdp& mdp, std::span<const int> state_seq,
                      std::span<const int> action_seq);
double history_probability(const Mdp& mdp, std::span<const int> state_seq,
                           std::span<const int> action_seq);

/// Expected total reward of pi from s0 over `horizon` steps, computed by
/// forward dynamic programming over state occupancies.
double expected_total_reward(const Mdp& mdp, const NonStationaryPolicy& pi,
                             int s0);

/// Literal sum over all state sequences; oracle duty only, guarded.
double expected_total_reward_enumerated(const Mdp& mdp,
                                        const NonStationaryPolicy& pi, int s0,
                                        std::size_t max_sequences = 2'000'000);

/// Backward induction; ties break toward the lowest action index.
NonStationaryPolicy solve_finite(const Mdp& mdp, int horizon);

/// Value iteration for the discounted criterion with the first step already
/// discounted once (gamma^(i+1) weighting), i.e. V = gamma * max_a T(R+V').
/// Stops when the sup-norm residual drops below eps*(1-gamma)/(2*gamma).
StationaryPolicy solve_infinite(const Mdp& mdp, double gamma, double eps);

/// Expected utility of (C_pi & 0:s0) computed entirely on the logic side;
/// the equivalence oracle for the MDP path.
double policy_value_via_lpmln(TransitionAnalysis& analysis,
                              const NonStationaryPolicy& pi, int s0, int m);

struct PolicySearchResult {
  double value = 0.0;
  std::vector<NonStationaryPolicy> maximizers;
};

/// Exhaustive argmax of policy_value_via_lpmln over all |A|^(|S|*m)
/// non-stationary policies; refuses searches past `max_policies`.
PolicySearchResult optimal_policy_via_lpmln(TransitionAnalysis& analysis,
                                            int s0, int m,
                                            std::size_t max_policies = 1'000'000);

}  // namespace pbcmdp

#endif
