#include <doctest.h>

#include <cmath>

#include "pbcmdp/mdp.hpp"
#include "support.hpp"

using namespace pbcmdp;
using pbcmdp::test::compile_domain;
using pbcmdp::test::compile_text;

namespace {

struct SimpleWorld {
  TransitionAnalysis t;
  Mdp mdp;
  int s00, s10, s11, none, a, b;

  explicit SimpleWorld(const char* file = "simple.pbcp")
      : t(compile_domain(file)), mdp(build_mdp(t)) {
    s00 = find_state("{~P, ~Q}");
    s10 = find_state("{P, ~Q}");
    s11 = find_state("{P, Q}");
    none = find_action("none");
    a = find_action("A");
    b = find_action("B");
  }
  int find_state(const std::string& label) {
    for (std::size_t i = 0; i < mdp.state_labels.size(); ++i)
      if (mdp.state_labels[i] == label) return static_cast<int>(i);
    FAIL("no state ", label);
    return -1;
  }
  int find_action(const std::string& label) {
    for (std::size_t i = 0; i < mdp.action_labels.size(); ++i)
      if (mdp.action_labels[i] == label) return static_cast<int>(i);
    FAIL("no action ", label);
    return -1;
  }
};

NonStationaryPolicy a_then_b(const SimpleWorld& w) {
  NonStationaryPolicy pi;
  pi.horizon = 2;
  pi.action.assign(3, std::vector<int>(2, w.none));
  pi.action[static_cast<std::size_t>(w.s00)] = {w.a, w.a};
  pi.action[static_cast<std::size_t>(w.s10)] = {w.b, w.b};
  pi.value.assign(3, std::vector<double>(3, 0.0));
  return pi;
}

}  // namespace

TEST_CASE("the simple MDP tensors carry the declared probabilities") {
  SimpleWorld w;
  CHECK(w.mdp.num_states == 3);
  CHECK(w.mdp.num_actions == 3);
  CHECK(w.mdp.t(w.a, w.s00, w.s10) == doctest::Approx(0.8));
  CHECK(w.mdp.t(w.a, w.s00, w.s00) == doctest::Approx(0.2));
  CHECK(w.mdp.t(w.b, w.s10, w.s11) == doctest::Approx(0.7));
  CHECK(w.mdp.r(w.b, w.s10, w.s11) == doctest::Approx(10.0));
  CHECK(w.mdp.r(w.a, w.s00, w.s11) == doctest::Approx(0.0));  // p=0 cell
  for (int s = 0; s < 3; ++s)
    CHECK(w.mdp.t(w.none, s, s) == doctest::Approx(1.0));
}

TEST_CASE("a description without actions yields the lone no-op profile") {
  CompiledDescription cd = compile_text(
      "fluent C\n"
      "inertial C\n");
  TransitionAnalysis t(cd);
  Mdp mdp = build_mdp(t);
  CHECK(mdp.num_actions == 1);
  CHECK(mdp.num_states == 2);
  for (int s = 0; s < 2; ++s)
    for (int s2 = 0; s2 < 2; ++s2)
      CHECK(mdp.t(0, s, s2) == doctest::Approx(s == s2 ? 1.0 : 0.0));
}

TEST_CASE("histories multiply probabilities and add rewards") {
  SimpleWorld w;
  const std::vector<int> states{w.s00, w.s10, w.s11};
  const std::vector<int> actions{w.a, w.b};
  CHECK(history_probability(w.mdp, states, actions) ==
        doctest::Approx(0.8 * 0.7));
  CHECK(history_reward(w.mdp, states, actions) == doctest::Approx(10.0));

  // Horizon-0 history: empty product and sum.
  CHECK(history_probability(w.mdp, std::vector<int>{w.s00}, {}) ==
        doctest::Approx(1.0));
  CHECK(history_reward(w.mdp, std::vector<int>{w.s00}, {}) ==
        doctest::Approx(0.0));

  // Any zero-probability step kills the product.
  CHECK(history_probability(w.mdp, std::vector<int>{w.s00, w.s11},
                            std::vector<int>{w.a}) == doctest::Approx(0.0));
}

TEST_CASE("expected total reward by forward DP") {
  SimpleWorld w;

  NonStationaryPolicy noop;
  noop.horizon = 3;
  noop.action.assign(3, std::vector<int>(3, w.none));
  CHECK(expected_total_reward(w.mdp, noop, w.s00) == doctest::Approx(0.0));

  NonStationaryPolicy pi = a_then_b(w);
  CHECK(expected_total_reward(w.mdp, pi, w.s00) ==
        doctest::Approx(0.8 * 0.7 * 10.0));

  NonStationaryPolicy empty;
  empty.horizon = 0;
  empty.action.assign(3, {});
  CHECK(expected_total_reward(w.mdp, empty, w.s00) == doctest::Approx(0.0));

  // The guarded sequence enumeration agrees.
  CHECK(expected_total_reward_enumerated(w.mdp, pi, w.s00) ==
        doctest::Approx(expected_total_reward(w.mdp, pi, w.s00)));
}

TEST_CASE("backward induction finds A-then-B worth 5.6") {
  SimpleWorld w;
  NonStationaryPolicy pi = solve_finite(w.mdp, 2);
  CHECK(pi.value[static_cast<std::size_t>(w.s00)][0] ==
        doctest::Approx(5.6).epsilon(1e-9));
  CHECK(pi.action[static_cast<std::size_t>(w.s00)][0] == w.a);
  CHECK(pi.action[static_cast<std::size_t>(w.s10)][0] == w.b);
  CHECK(pi.value[static_cast<std::size_t>(w.s00)][0] ==
        doctest::Approx(expected_total_reward(w.mdp, pi, w.s00)));

  NonStationaryPolicy one = solve_finite(w.mdp, 1);
  CHECK(one.value[static_cast<std::size_t>(w.s10)][0] == doctest::Approx(7.0));
  CHECK(one.action[static_cast<std::size_t>(w.s10)][0] == w.b);
}

TEST_CASE("all-zero rewards tie-break to action 0") {
  Mdp mdp;
  mdp.num_states = 2;
  mdp.num_actions = 3;
  mdp.state_labels = {"s0", "s1"};
  mdp.action_labels = {"a0", "a1", "a2"};
  mdp.T.assign(3 * 2 * 2, 0.0);
  mdp.R.assign(3 * 2 * 2, 0.0);
  for (int a = 0; a < 3; ++a)
    for (int s = 0; s < 2; ++s) mdp.T[mdp.index(a, s, s)] = 1.0;

  NonStationaryPolicy pi = solve_finite(mdp, 2);
  for (int s = 0; s < 2; ++s) {
    CHECK(pi.value[static_cast<std::size_t>(s)][0] == doctest::Approx(0.0));
    CHECK(pi.action[static_cast<std::size_t>(s)][0] == 0);
  }
}

TEST_CASE("value iteration on an absorbing self-reward") {
  Mdp mdp;
  mdp.num_states = 1;
  mdp.num_actions = 1;
  mdp.state_labels = {"s"};
  mdp.action_labels = {"a"};
  mdp.T = {1.0};
  mdp.R = {3.0};

  const double gamma = 0.9, eps = 1e-10;
  StationaryPolicy pi = solve_infinite(mdp, gamma, eps);
  CHECK(pi.value[0] == doctest::Approx(gamma * 3.0 / (1.0 - gamma)).epsilon(1e-8));

  // Residuals contract at least geometrically.
  for (std::size_t i = 1; i < pi.residuals.size(); ++i)
    CHECK(pi.residuals[i] <= gamma * pi.residuals[i - 1] + 1e-12);
}

TEST_CASE("value iteration on all-zero rewards stops immediately") {
  Mdp mdp;
  mdp.num_states = 2;
  mdp.num_actions = 1;
  mdp.state_labels = {"s0", "s1"};
  mdp.action_labels = {"a"};
  mdp.T = {1.0, 0.0, 0.0, 1.0};
  mdp.R = {0.0, 0.0, 0.0, 0.0};
  StationaryPolicy pi = solve_infinite(mdp, 0.9, 1e-6);
  CHECK(pi.sweeps == 1);
  CHECK(pi.value[0] == doctest::Approx(0.0));
}

TEST_CASE("the greedy discounted policy on the simple domain") {
  SimpleWorld w;
  StationaryPolicy pi = solve_infinite(w.mdp, 0.9, 1e-9);
  CHECK(pi.action[static_cast<std::size_t>(w.s00)] == w.a);
  CHECK(pi.action[static_cast<std::size_t>(w.s10)] == w.b);
  CHECK(pi.action[static_cast<std::size_t>(w.s11)] == w.none);

  // Policy evaluation confirms the greedy values: V = gamma*(T R + T V).
  std::vector<double> v(3, 0.0);
  for (int sweep = 0; sweep < 4000; ++sweep) {
    std::vector<double> next(3, 0.0);
    for (int s = 0; s < 3; ++s) {
      const int a = pi.action[static_cast<std::size_t>(s)];
      double q = 0.0;
      for (int s2 = 0; s2 < 3; ++s2)
        q += w.mdp.t(a, s, s2) *
             (w.mdp.r(a, s, s2) + v[static_cast<std::size_t>(s2)]);
      next[static_cast<std::size_t>(s)] = 0.9 * q;
    }
    v = next;
  }
  for (int s = 0; s < 3; ++s)
    CHECK(pi.value[static_cast<std::size_t>(s)] ==
          doctest::Approx(v[static_cast<std::size_t>(s)]).epsilon(1e-6));
}

TEST_CASE("invalid discounts and epsilons are rejected") {
  SimpleWorld w;
  CHECK_THROWS_AS(solve_infinite(w.mdp, 1.0, 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(solve_infinite(w.mdp, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("the logic-side policy value matches the MDP expectation") {
  SimpleWorld w;
  NonStationaryPolicy pi = a_then_b(w);

  const double via_logic = policy_value_via_lpmln(w.t, pi, w.s00, 2);
  const double via_mdp = expected_total_reward(w.mdp, pi, w.s00);
  CHECK(via_logic == doctest::Approx(via_mdp).epsilon(1e-9));
  CHECK(via_logic == doctest::Approx(5.6).epsilon(1e-9));

  CHECK(policy_value_via_lpmln(w.t, pi, w.s00, 0) == doctest::Approx(0.0));
}

TEST_CASE("the logic-side value decomposes over state sequences") {
  SimpleWorld w;
  NonStationaryPolicy pi = a_then_b(w);
  const int m = 2;
  Inference& inf = w.t.full_inference(m);
  const GroundSignature& sig = inf.program().signature;
  const Formula c_pi = w.t.policy_formula(pi.action, m, sig);
  const Formula at_s0 = w.t.state_formula(w.s00, 0, sig);

  double total = 0.0;
  for (int s1 = 0; s1 < 3; ++s1) {
    for (int s2 = 0; s2 < 3; ++s2) {
      const std::vector<int> states{w.s00, s1, s2};
      const std::vector<int> actions{
          pi.action[static_cast<std::size_t>(w.s00)][0],
          pi.action[static_cast<std::size_t>(s1)][1]};
      const Formula seq = Formula::conj2(
          w.t.state_formula(s1, 1, sig), w.t.state_formula(s2, 2, sig));
      const QueryResult qr = inf.query_probability(
          seq, Formula::conj2(at_s0, c_pi));
      if (qr.probability == 0.0) continue;
      const double reward =
          inf.expected_utility(w.t.history_formula(states, actions, sig));
      total += reward * qr.probability;
      // Term-by-term: reward and probability match the MDP quantities.
      CHECK(reward ==
            doctest::Approx(history_reward(w.mdp, states, actions)).epsilon(1e-9));
      CHECK(qr.probability ==
            doctest::Approx(history_probability(w.mdp, states, actions))
                .epsilon(1e-9));
    }
  }
  CHECK(total ==
        doctest::Approx(policy_value_via_lpmln(w.t, pi, w.s00, m)).epsilon(1e-9));
}

TEST_CASE("exhaustive logic-side search agrees with backward induction") {
  SimpleWorld w;
  for (int m : {1, 2}) {
    NonStationaryPolicy mdp_pi = solve_finite(w.mdp, m);
    for (int s0 = 0; s0 < 3; ++s0) {
      PolicySearchResult logic = optimal_policy_via_lpmln(w.t, s0, m);
      CHECK_MESSAGE(
          logic.value ==
              doctest::Approx(
                  mdp_pi.value[static_cast<std::size_t>(s0)][0])
                  .epsilon(1e-9),
          "m=", m, " s0=", s0);
    }
  }
}

TEST_CASE("the equivalence also holds on the one-block world") {
  TransitionAnalysis t(compile_domain("blocks1.pbcp"));
  Mdp mdp = build_mdp(t);
  NonStationaryPolicy pi = solve_finite(mdp, 1);
  for (int s0 = 0; s0 < mdp.num_states; ++s0) {
    PolicySearchResult logic = optimal_policy_via_lpmln(t, s0, 1);
    CHECK(logic.value ==
          doctest::Approx(pi.value[static_cast<std::size_t>(s0)][0])
              .epsilon(1e-9));
    CHECK(policy_value_via_lpmln(t, pi, s0, 1) ==
          doctest::Approx(logic.value).epsilon(1e-9));
  }
}

TEST_CASE("the policy-space guard trips") {
  SimpleWorld w;
  CHECK_THROWS_AS(optimal_policy_via_lpmln(w.t, 0, 2, 10), ResourceGuard);
}

TEST_CASE("finite-horizon values are monotone when rewards are nonnegative") {
  SimpleWorld w;
  double previous = 0.0;
  for (int m = 0; m <= 4; ++m) {
    NonStationaryPolicy pi = solve_finite(w.mdp, m);
    const double value = pi.value[static_cast<std::size_t>(w.s00)][0];
    CHECK(value + 1e-12 >= previous);
    previous = value;
  }
}

TEST_CASE("build_mdp refuses descriptions that break the assumptions") {
  CompiledDescription cd = compile_text(
      "fluent P\n"
      "action A\n"
      "caused { P } after A\n"
      "caused { ~P } after A\n"
      "inertial P\n");
  TransitionAnalysis t(cd);
  CHECK_THROWS_AS(build_mdp(t), AssumptionError);
  Mdp forced = build_mdp(t, /*unchecked=*/true);
  CHECK(forced.num_states == 2);
}
