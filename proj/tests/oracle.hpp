#ifndef PBCMDP_TESTS_ORACLE_HPP
#define PBCMDP_TESTS_ORACLE_HPP

#include <string>
#include <vector>

#include "pbcmdp/engine.hpp"

// Test-only reference implementations, kept independent of the engine's
// search path: plain enumeration of all total assignments, direct
// satisfaction of the reduct, and subset search for minimality.

namespace pbcmdp::oracle {

struct Model {
  std::vector<int> values;
  std::vector<bool> utility_set;
  double weight = 0.0;       // plain domain
  double probability = 0.0;
  double utility = 0.0;
};

/// All stable models by brute force; refuses programs whose assignment space
/// exceeds `max_assignments`.
std::vector<Model> stable_models(const GroundProgram& program,
                                 std::size_t max_assignments = 4'000'000);

double probability(const std::vector<Model>& models, const Formula& f);
double conditional(const std::vector<Model>& models, const Formula& q,
                   const Formula& e);
double expected_utility(const std::vector<Model>& models, const Formula& cond);

/// Viral-marketing instance evaluated purely on the graph: every decision
/// set crossed with every influence outcome, buys by reachability.
struct MarketingGraph {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<double> edge_probability;
  std::vector<double> vertex_cost;
  double reward_per_buyer = 0.0;
};

double marketing_expected_profit(const MarketingGraph& g,
                                 const std::vector<bool>& market_to);
std::pair<std::vector<bool>, double> marketing_best_decision(
    const MarketingGraph& g);

}  // namespace pbcmdp::oracle

#endif
