#include "pbcmdp/mdp.hpp"

#include <cmath>
#include <stdexcept>

namespace pbcmdp {

Mdp build_mdp(TransitionAnalysis& analysis, bool unchecked) {
  if (!unchecked) {
    const AssumptionReport report = analysis.check_assumptions();
    if (!report.ok()) {
      std::string what = "assumption check failed:";
      for (const auto& v : report.violations)
        what += " [" + std::to_string(v.assumption) + "] " + v.witness + ";";
      throw AssumptionError(what);
    }
  }

  const auto& states = analysis.states();
  const auto& actions = analysis.actions();
  Mdp mdp;
  mdp.num_states = static_cast<int>(states.size());
  mdp.num_actions = static_cast<int>(actions.size());
  for (const auto& s : states) mdp.state_labels.push_back(s.label);
  for (const auto& a : actions) mdp.action_labels.push_back(a.label);
  mdp.T.assign(static_cast<std::size_t>(mdp.num_actions) *
                   static_cast<std::size_t>(mdp.num_states) *
                   static_cast<std::size_t>(mdp.num_states),
               0.0);
  mdp.R = mdp.T;

  for (int a = 0; a < mdp.num_actions; ++a) {
    for (int s = 0; s < mdp.num_states; ++s) {
      for (int s2 = 0; s2 < mdp.num_states; ++s2) {
        const double p = analysis.transition_probability(s, a, s2);
        if (p <= 0.0) continue;  // R stays 0 on zero-probability cells
        mdp.T[mdp.index(a, s, s2)] = p;
        mdp.R[mdp.index(a, s, s2)] = analysis.transition_reward(s, a, s2);
      }
    }
  }
  return mdp;
}

double history_reward(const Mdp& mdp, std::span<const int> state_seq,
                      std::span<const int> action_seq) {
  if (!state_seq.empty() && action_seq.size() != state_seq.size() - 1)
    throw std::out_of_range("history needs one action between states");
  double total = 0.0;
  for (std::size_t i = 0; i < action_seq.size(); ++i)
    total += mdp.r(action_seq[i], state_seq[i], state_seq[i + 1]);
  return total;
}

double history_probability(const Mdp& mdp, std::span<const int> state_seq,
                           std::span<const int> action_seq) {
  if (!state_seq.empty() && action_seq.size() != state_seq.size() - 1)
    throw std::out_of_range("history needs one action between states");
  double p = 1.0;
  for (std::size_t i = 0; i < action_seq.size(); ++i)
    p *= mdp.t(action_seq[i], state_seq[i], state_seq[i + 1]);
  return p;
}

double expected_total_reward(const Mdp& mdp, const NonStationaryPolicy& pi,
                             int s0) {
  const int n = mdp.num_states;
  std::vector<double> occupancy(static_cast<std::size_t>(n), 0.0);
  occupancy[static_cast<std::size_t>(s0)] = 1.0;
  double expected = 0.0;
  for (int step = 0; step < pi.horizon; ++step) {
    std::vector<double> next(static_cast<std::size_t>(n), 0.0);
    for (int s = 0; s < n; ++s) {
      const double p_here = occupancy[static_cast<std::size_t>(s)];
      if (p_here == 0.0) continue;
      const int a = pi.action[static_cast<std::size_t>(s)]
                             [static_cast<std::size_t>(step)];
      for (int s2 = 0; s2 < n; ++s2) {
        const double t = mdp.t(a, s, s2);
        if (t == 0.0) continue;
        expected += p_here * t * mdp.r(a, s, s2);
        next[static_cast<std::size_t>(s2)] += p_here * t;
      }
    }
    occupancy.swap(next);
  }
  return expected;
}

namespace {

double enumerate_sequences(const Mdp& mdp, const NonStationaryPolicy& pi,
                           int s, int step, double prob, double reward,
                           std::size_t& budget) {
  if (step == pi.horizon) return prob * reward;
  double total = 0.0;
  const int a =
      pi.action[static_cast<std::size_t>(s)][static_cast<std::size_t>(step)];
  for (int s2 = 0; s2 < mdp.num_states; ++s2) {
    if (budget == 0)
      throw ResourceGuard("sequence enumeration exceeded its budget");
    --budget;
    const double t = mdp.t(a, s, s2);
    total += enumerate_sequences(mdp, pi, s2, step + 1, prob * t,
                                 reward + mdp.r(a, s, s2), budget);
  }
  return total;
}

}  // namespace

double expected_total_reward_enumerated(const Mdp& mdp,
                                        const NonStationaryPolicy& pi, int s0,
                                        std::size_t max_sequences) {
  // Sums reward*probability over every state sequence, including the
  // zero-probability ones.
  return enumerate_sequences(mdp, pi, s0, 0, 1.0, 0.0, max_sequences);
}

NonStationaryPolicy solve_finite(const Mdp& mdp, int horizon) {
  if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  const int n = mdp.num_states;
  NonStationaryPolicy pi;
  pi.horizon = horizon;
  pi.action.assign(static_cast<std::size_t>(n),
                   std::vector<int>(static_cast<std::size_t>(horizon), 0));
  pi.value.assign(static_cast<std::size_t>(n),
                  std::vector<double>(static_cast<std::size_t>(horizon) + 1,
                                      0.0));

  for (int step = horizon - 1; step >= 0; --step) {
    for (int s = 0; s < n; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      int best_action = 0;
      for (int a = 0; a < mdp.num_actions; ++a) {
        double q = 0.0;
        for (int s2 = 0; s2 < n; ++s2) {
          const double t = mdp.t(a, s, s2);
          if (t == 0.0) continue;
          q += t * (mdp.r(a, s, s2) +
                    pi.value[static_cast<std::size_t>(s2)]
                            [static_cast<std::size_t>(step) + 1]);
        }
        if (q > best) {
          best = q;
          best_action = a;
        }
      }
      pi.value[static_cast<std::size_t>(s)][static_cast<std::size_t>(step)] =
          best;
      pi.action[static_cast<std::size_t>(s)][static_cast<std::size_t>(step)] =
          best_action;
    }
  }
  return pi;
}

StationaryPolicy solve_infinite(const Mdp& mdp, double gamma, double eps) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("discount factor must lie in (0,1)");
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");

  const int n = mdp.num_states;
  const double threshold = eps * (1.0 - gamma) / (2.0 * gamma);
  StationaryPolicy pi;
  pi.gamma = gamma;
  pi.value.assign(static_cast<std::size_t>(n), 0.0);
  pi.action.assign(static_cast<std::size_t>(n), 0);

  std::vector<double> next(static_cast<std::size_t>(n), 0.0);
  while (true) {
    double residual = 0.0;
    for (int s = 0; s < n; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < mdp.num_actions; ++a) {
        double q = 0.0;
        for (int s2 = 0; s2 < n; ++s2) {
          const double t = mdp.t(a, s, s2);
          if (t == 0.0) continue;
          q += t * (mdp.r(a, s, s2) + pi.value[static_cast<std::size_t>(s2)]);
        }
        if (q > best) best = q;
      }
      next[static_cast<std::size_t>(s)] = gamma * best;
      residual = std::max(
          residual,
          std::fabs(next[static_cast<std::size_t>(s)] -
                    pi.value[static_cast<std::size_t>(s)]));
    }
    pi.value = next;
    pi.residuals.push_back(residual);
    ++pi.sweeps;
    if (residual < threshold) break;
    if (pi.sweeps > 1'000'000)
      throw ResourceGuard("value iteration failed to converge");
  }

  // Greedy extraction, lowest action index on ties.
  for (int s = 0; s < n; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    int best_action = 0;
    for (int a = 0; a < mdp.num_actions; ++a) {
      double q = 0.0;
      for (int s2 = 0; s2 < n; ++s2) {
        const double t = mdp.t(a, s, s2);
        if (t == 0.0) continue;
        q += t * (mdp.r(a, s, s2) + pi.value[static_cast<std::size_t>(s2)]);
      }
      if (q > best + 1e-12) {
        best = q;
        best_action = a;
      }
    }
    pi.action[static_cast<std::size_t>(s)] = best_action;
  }
  return pi;
}

double policy_value_via_lpmln(TransitionAnalysis& analysis,
                              const NonStationaryPolicy& pi, int s0, int m) {
  if (m == 0) return 0.0;
  if (!analysis.initial_consistent(s0))
    throw InfeasibleQuery("initial state is not consistent with the "
                          "initial-state laws");
  Inference& inf = analysis.full_inference(m);
  const GroundSignature& sig = inf.program().signature;
  const Formula condition =
      Formula::conj2(analysis.policy_formula(pi.action, m, sig),
                     analysis.state_formula(s0, 0, sig));
  return inf.expected_utility(condition);
}

PolicySearchResult optimal_policy_via_lpmln(TransitionAnalysis& analysis,
                                            int s0, int m,
                                            std::size_t max_policies) {
  const std::size_t num_states = analysis.states().size();
  const std::size_t num_actions = analysis.actions().size();
  const std::size_t slots = num_states * static_cast<std::size_t>(m);

  double count = 1.0;
  for (std::size_t i = 0; i < slots; ++i) {
    count *= static_cast<double>(num_actions);
    if (count > static_cast<double>(max_policies))
      throw ResourceGuard("policy space exceeds the exhaustive-search guard");
  }

  PolicySearchResult result;
  result.value = -std::numeric_limits<double>::infinity();

  NonStationaryPolicy pi;
  pi.horizon = m;
  pi.action.assign(num_states,
                   std::vector<int>(static_cast<std::size_t>(m), 0));

  std::vector<std::size_t> digits(slots, 0);
  while (true) {
    for (std::size_t i = 0; i < slots; ++i)
      pi.action[i / static_cast<std::size_t>(m)]
               [i % static_cast<std::size_t>(m)] =
          static_cast<int>(digits[i]);
    const double value =
        m == 0 ? 0.0 : policy_value_via_lpmln(analysis, pi, s0, m);
    if (value > result.value + 1e-12) {
      result.value = value;
      result.maximizers.clear();
      result.maximizers.push_back(pi);
    } else if (std::fabs(value - result.value) <= 1e-12) {
      result.maximizers.push_back(pi);
    }

    std::size_t i = slots;
    bool done = true;
    while (i > 0) {
      --i;
      if (++digits[i] < num_actions) {
        done = false;
        break;
      }
      digits[i] = 0;
    }
    if (done || slots == 0) break;
  }
  return result;
}

}  // namespace pbcmdp
