#include "pbcmdp/dtlpmln.hpp"

namespace pbcmdp {

Formula DecisionAssignment::to_formula(const DecisionProblem& dp) const {
  std::vector<Formula> parts;
  parts.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    parts.push_back(Formula::atom(dp.decision_constants[i], values[i] ? 1 : 0));
  return Formula::conj(std::move(parts));
}

double evaluate_decision(Inference& inference, const DecisionProblem& dp,
                         const DecisionAssignment& dec,
                         const Formula& evidence) {
  const Formula cond = Formula::conj2(dec.to_formula(dp), evidence);
  try {
    return inference.expected_utility(cond);
  } catch (const InfeasibleQuery&) {
    throw InfeasibleQuery(
        "decision assignment is inconsistent with the evidence and hard "
        "rules");
  }
}

MeuResult meu(Inference& inference, const DecisionProblem& dp,
              const Formula& evidence) {
  const std::size_t n = dp.decision_constants.size();
  if (n > 24)
    throw ResourceGuard("more than 24 decision atoms; refusing 2^n search");

  // Assignments ordered lexicographically in canonical atom order with
  // false < true, so the first maximizer found is the designated one.
  MeuResult result;
  bool found = false;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    DecisionAssignment dec;
    dec.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      dec.values[i] = ((mask >> (n - 1 - i)) & 1) != 0;

    const Formula cond = Formula::conj2(dec.to_formula(dp), evidence);
    double eu = 0.0;
    try {
      eu = inference.expected_utility(cond);
    } catch (const InfeasibleQuery&) {
      continue;  // infeasible decision; never a candidate
    }
    if (!found || eu > result.expected_utility + 1e-12) {
      result.best = dec;
      result.expected_utility = eu;
      result.maximizers.clear();
      result.maximizers.push_back(dec);
      found = true;
    } else if (std::abs(eu - result.expected_utility) <= 1e-12) {
      result.maximizers.push_back(dec);
    }
  }
  if (!found)
    throw InfeasibleQuery("every decision assignment is inconsistent with "
                          "the evidence");
  return result;
}

}  // namespace pbcmdp
