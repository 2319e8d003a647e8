#include <doctest.h>

#include <cmath>

#include "pbcmdp/dtlpmln.hpp"
#include "oracle.hpp"

using namespace pbcmdp;

namespace {

Formula choice_body(const Formula& a) {
  return Formula::negate(Formula::negate(a));
}

void add_choice(GroundProgram& p, int constant) {
  WeightedRule r;
  r.weight = Weight::alpha();
  r.head = Formula::atom(constant, 1);
  r.body = choice_body(r.head);
  p.rules.push_back(std::move(r));
}

void add_hard(GroundProgram& p, Formula head, Formula body) {
  WeightedRule r;
  r.weight = Weight::alpha();
  r.head = std::move(head);
  r.body = std::move(body);
  p.rules.push_back(std::move(r));
}

void add_soft_fact(GroundProgram& p, double log_w, Formula head) {
  WeightedRule r;
  r.weight = Weight::soft(log_w);
  r.head = std::move(head);
  r.body = Formula::top();
  p.rules.push_back(std::move(r));
}

void add_utility(GroundProgram& p, double value, const std::string& label,
                 Formula body) {
  WeightedRule r;
  r.weight = Weight::alpha();
  r.utility_head = p.signature.add_utility_atom({value, -1, -1, label});
  r.body = std::move(body);
  p.rules.push_back(std::move(r));
}

/// The viral-marketing program: buys propagate over probabilistic influence
/// edges, each buyer pays the reward, marketing to a vertex costs its price.
DecisionProblem marketing_program(const oracle::MarketingGraph& g) {
  DecisionProblem dp;
  GroundProgram& p = dp.program;
  std::vector<int> market, buy;
  for (int v = 0; v < g.vertices; ++v) {
    market.push_back(
        p.signature.add_propositional("marketTo(v" + std::to_string(v) + ")"));
  }
  for (int v = 0; v < g.vertices; ++v)
    buy.push_back(
        p.signature.add_propositional("buy(v" + std::to_string(v) + ")"));
  std::vector<int> influence;
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    influence.push_back(p.signature.add_propositional(
        "influence(" + std::to_string(g.edges[e].first) + "," +
        std::to_string(g.edges[e].second) + ")"));

  for (int v = 0; v < g.vertices; ++v) {
    add_choice(p, market[static_cast<std::size_t>(v)]);
    add_hard(p, Formula::atom(buy[static_cast<std::size_t>(v)], 1),
             Formula::atom(market[static_cast<std::size_t>(v)], 1));
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto [from, to] = g.edges[e];
    const double pe = g.edge_probability[e];
    add_soft_fact(p, std::log(pe / (1.0 - pe)),
                  Formula::atom(influence[e], 1));
    add_hard(p, Formula::atom(buy[static_cast<std::size_t>(to)], 1),
             Formula::conj2(Formula::atom(buy[static_cast<std::size_t>(from)], 1),
                            Formula::atom(influence[e], 1)));
  }
  for (int v = 0; v < g.vertices; ++v) {
    add_utility(p, g.reward_per_buyer, "r" + std::to_string(v),
                Formula::atom(buy[static_cast<std::size_t>(v)], 1));
    add_utility(p, -g.vertex_cost[static_cast<std::size_t>(v)],
                "c" + std::to_string(v),
                Formula::atom(market[static_cast<std::size_t>(v)], 1));
  }
  dp.decision_constants = market;
  return dp;
}

}  // namespace

TEST_CASE("a single conditional utility follows the decision") {
  DecisionProblem dp;
  const int d = dp.program.signature.add_propositional("d");
  add_choice(dp.program, d);
  add_utility(dp.program, 5.0, "u", Formula::atom(d, 1));
  dp.decision_constants = {d};

  Inference inf(dp.program);
  CHECK(evaluate_decision(inf, dp, {{true}}, Formula::top()) ==
        doctest::Approx(5.0));
  CHECK(evaluate_decision(inf, dp, {{false}}, Formula::top()) ==
        doctest::Approx(0.0));

  MeuResult best = meu(inf, dp, Formula::top());
  CHECK(best.expected_utility == doctest::Approx(5.0));
  CHECK(best.best.values == std::vector<bool>{true});
}

TEST_CASE("decisions inconsistent with hard rules are errors") {
  DecisionProblem dp;
  const int d = dp.program.signature.add_propositional("d");
  add_choice(dp.program, d);
  add_hard(dp.program, Formula::bottom(), Formula::atom(d, 1));  // forbid d
  dp.decision_constants = {d};

  Inference inf(dp.program);
  CHECK_THROWS_AS(evaluate_decision(inf, dp, {{true}}, Formula::top()),
                  InfeasibleQuery);
  // meu still works: it skips the infeasible assignment.
  MeuResult best = meu(inf, dp, Formula::top());
  CHECK(best.best.values == std::vector<bool>{false});
}

TEST_CASE("an empty decision set reduces to plain expected utility") {
  DecisionProblem dp;
  const int c = dp.program.signature.add_propositional("c");
  add_choice(dp.program, c);
  add_utility(dp.program, 4.0, "u", Formula::atom(c, 1));

  Inference inf(dp.program);
  MeuResult r = meu(inf, dp, Formula::atom(c, 1));
  CHECK(r.best.values.empty());
  CHECK(r.expected_utility == doctest::Approx(4.0));
}

TEST_CASE("independent decisions add up and both get taken") {
  DecisionProblem dp;
  const int d1 = dp.program.signature.add_propositional("d1");
  const int d2 = dp.program.signature.add_propositional("d2");
  add_choice(dp.program, d1);
  add_choice(dp.program, d2);
  add_utility(dp.program, 1.0, "u1", Formula::atom(d1, 1));
  add_utility(dp.program, 1.0, "u2", Formula::atom(d2, 1));
  dp.decision_constants = {d1, d2};

  Inference inf(dp.program);
  MeuResult best = meu(inf, dp, Formula::top());
  CHECK(best.expected_utility == doctest::Approx(2.0));
  CHECK(best.best.values == std::vector<bool>{true, true});

  // Exhaustively verify meu dominates every assignment.
  for (bool a : {false, true})
    for (bool b : {false, true})
      CHECK(best.expected_utility + 1e-9 >=
            evaluate_decision(inf, dp, {{a, b}}, Formula::top()));
}

TEST_CASE("constant utility shifts every decision equally") {
  DecisionProblem dp;
  const int d = dp.program.signature.add_propositional("d");
  const int c = dp.program.signature.add_propositional("c");
  add_choice(dp.program, d);
  add_choice(dp.program, c);
  add_utility(dp.program, 3.0, "u", Formula::atom(d, 1));
  dp.decision_constants = {d};

  Inference base_inf(dp.program);
  MeuResult base = meu(base_inf, dp, Formula::top());

  DecisionProblem shifted = dp;
  add_utility(shifted.program, 7.0, "k", Formula::top());
  Inference shifted_inf(shifted.program);
  MeuResult after = meu(shifted_inf, shifted, Formula::top());

  CHECK(after.expected_utility ==
        doctest::Approx(base.expected_utility + 7.0));
  CHECK(after.best.values == base.best.values);
}

TEST_CASE("evaluate_decision does not depend on decision-atom order") {
  DecisionProblem dp;
  const int d1 = dp.program.signature.add_propositional("d1");
  const int d2 = dp.program.signature.add_propositional("d2");
  add_choice(dp.program, d1);
  add_choice(dp.program, d2);
  add_utility(dp.program, 2.0, "u", Formula::atom(d1, 1));
  add_utility(dp.program, 1.0, "v", Formula::atom(d2, 1));

  DecisionProblem forward = dp;
  forward.decision_constants = {d1, d2};
  DecisionProblem backward = dp;
  backward.decision_constants = {d2, d1};

  Inference inf(dp.program);
  CHECK(evaluate_decision(inf, forward, {{true, false}}, Formula::top()) ==
        doctest::Approx(
            evaluate_decision(inf, backward, {{false, true}}, Formula::top())));
}

TEST_CASE("the decision-atom guard trips on oversized problems") {
  DecisionProblem dp;
  for (int i = 0; i < 25; ++i)
    dp.decision_constants.push_back(
        dp.program.signature.add_propositional("d" + std::to_string(i)));
  Inference inf(dp.program);
  CHECK_THROWS_AS(meu(inf, dp, Formula::top()), ResourceGuard);
}

TEST_CASE("marketing instances match the graph-level oracle") {
  std::vector<oracle::MarketingGraph> graphs;
  {
    oracle::MarketingGraph g;  // chain with a fork
    g.vertices = 4;
    g.edges = {{0, 1}, {1, 2}, {0, 3}};
    g.edge_probability = {0.8, 0.5, 0.3};
    g.vertex_cost = {5.0, 4.0, 6.0, 3.0};
    g.reward_per_buyer = 10.0;
    graphs.push_back(g);
  }
  {
    oracle::MarketingGraph g;  // diamond
    g.vertices = 4;
    g.edges = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
    g.edge_probability = {0.6, 0.7, 0.4, 0.5};
    g.vertex_cost = {8.0, 2.0, 2.0, 9.0};
    g.reward_per_buyer = 6.0;
    graphs.push_back(g);
  }
  {
    oracle::MarketingGraph g;  // cycle plus tail
    g.vertices = 4;
    g.edges = {{0, 1}, {1, 2}, {2, 0}, {2, 3}};
    g.edge_probability = {0.5, 0.5, 0.5, 0.9};
    g.vertex_cost = {4.0, 4.0, 4.0, 20.0};
    g.reward_per_buyer = 7.0;
    graphs.push_back(g);
  }

  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const auto& g = graphs[gi];
    DecisionProblem dp = marketing_program(g);
    Inference inf(dp.program);

    // Every decision's expected utility agrees with the graph computation.
    for (std::uint64_t mask = 0; mask < (1u << g.vertices); ++mask) {
      std::vector<bool> dec(static_cast<std::size_t>(g.vertices));
      for (int v = 0; v < g.vertices; ++v)
        dec[static_cast<std::size_t>(v)] =
            ((mask >> (g.vertices - 1 - v)) & 1) != 0;
      const double via_program =
          evaluate_decision(inf, dp, {dec}, Formula::top());
      const double via_graph = oracle::marketing_expected_profit(g, dec);
      CHECK_MESSAGE(via_program == doctest::Approx(via_graph).epsilon(1e-9),
                    "graph ", gi, " mask ", mask);
    }

    MeuResult best = meu(inf, dp, Formula::top());
    const auto [oracle_dec, oracle_value] = oracle::marketing_best_decision(g);
    CHECK(best.expected_utility == doctest::Approx(oracle_value).epsilon(1e-9));
    CHECK(best.best.values == oracle_dec);
  }
}
