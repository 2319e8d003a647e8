#ifndef PBCMDP_DTLPMLN_HPP
#define PBCMDP_DTLPMLN_HPP

#include <vector>

#include "pbcmdp/engine.hpp"

namespace pbcmdp {

/// A weighted program together with its decision atoms. Decision atoms must
/// be boolean constants of the program signature and must be exogenous in the
/// program (typically via choice rules); the reasoner conditions on them, it
/// does not add choices on its own.
struct DecisionProblem {
  GroundProgram program;
  std::vector<int> decision_constants;
};

/// Truth assignment over the decision atoms, aligned with
/// DecisionProblem::decision_constants.
struct DecisionAssignment {
  std::vector<bool> values;

  Formula to_formula(const DecisionProblem& dp) const;
};

struct MeuResult {
  DecisionAssignment best;  // lexicographically smallest maximizer
  double expected_utility = 0.0;
  std::vector<DecisionAssignment> maximizers;  // every tying assignment
};

/// E[U(dec & evidence)]; throws InfeasibleQuery when the conjunction has no
/// stable model.
double evaluate_decision(Inference& inference, const DecisionProblem& dp,
                         const DecisionAssignment& dec,
                         const Formula& evidence);

/// Exhaustive maximum-expected-utility search over all 2^|Dec| assignments.
/// Assignments inconsistent with the evidence are skipped; if every
/// assignment is inconsistent the search throws InfeasibleQuery. More than
/// 24 decision atoms trips the resource guard.
MeuResult meu(Inference& inference, const DecisionProblem& dp,
              const Formula& evidence);

}  // namespace pbcmdp

#endif
