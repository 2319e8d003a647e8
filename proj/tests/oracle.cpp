#include "oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace pbcmdp::oracle {

namespace {

bool sat(const Formula& f, const std::vector<int>& values) {
  switch (f.kind()) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Atom:
      return values[static_cast<std::size_t>(f.constant())] == f.value();
    case Formula::Kind::Not: return !sat(f.children().front(), values);
    case Formula::Kind::And:
      for (const auto& c : f.children())
        if (!sat(c, values)) return false;
      return true;
    case Formula::Kind::Or:
      for (const auto& c : f.children())
        if (sat(c, values)) return true;
      return false;
  }
  return false;
}

struct Universe {
  // universe atom id per constant (-1 when the constant carries no true
  // atom), then one id per true utility atom
  std::vector<int> of_constant;
  std::vector<int> of_utility;
  int size = 0;
};

/// Does J satisfy F^I? Evaluated without materializing the reduct: an
/// unsatisfied subformula acts as bottom, a satisfied negation as top, and a
/// satisfied atom holds in J iff J keeps its universe id.
bool sat_reduct(const Formula& f, const std::vector<int>& values,
                const GroundSignature& sig, const Universe& u,
                const std::vector<bool>& j) {
  if (!sat(f, values)) return false;
  switch (f.kind()) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Atom: {
      const int c = f.constant();
      if (!sig.constant(c).multivalued && f.value() == 0)
        return true;  // negative literal, already satisfied by I
      const int id = u.of_constant[static_cast<std::size_t>(c)];
      return id >= 0 && j[static_cast<std::size_t>(id)];
    }
    case Formula::Kind::Not: return true;
    case Formula::Kind::And:
      for (const auto& c : f.children())
        if (!sat_reduct(c, values, sig, u, j)) return false;
      return true;
    case Formula::Kind::Or:
      for (const auto& c : f.children())
        if (sat(c, values) && sat_reduct(c, values, sig, u, j)) return true;
      return false;
  }
  return false;
}

}  // namespace

std::vector<Model> stable_models(const GroundProgram& program,
                                 std::size_t max_assignments) {
  const GroundSignature& sig = program.signature;
  const std::size_t n = sig.constants().size();

  double space = 1.0;
  for (const auto& c : sig.constants())
    space *= static_cast<double>(c.domain.size());
  if (space > static_cast<double>(max_assignments))
    throw std::runtime_error("oracle: assignment space too large");

  std::vector<Model> out;
  std::vector<int> values(n, 0);
  while (true) {
    // Hard rules first.
    bool hard_ok = true;
    std::vector<bool> utility_set(sig.utility_atoms().size(), false);
    for (const auto& r : program.rules) {
      if (r.utility_head >= 0) {
        if (sat(r.body, values))
          utility_set[static_cast<std::size_t>(r.utility_head)] = true;
        continue;
      }
      if (!r.weight.hard) continue;
      if (sat(r.body, values) && !sat(r.head, values)) {
        hard_ok = false;
        break;
      }
    }

    if (hard_ok) {
      // Minimality universe over true atoms.
      Universe u;
      u.of_constant.assign(n, -1);
      for (std::size_t c = 0; c < n; ++c) {
        if (sig.constant(static_cast<int>(c)).multivalued || values[c] == 1)
          u.of_constant[c] = u.size++;
      }
      u.of_utility.assign(sig.utility_atoms().size(), -1);
      for (std::size_t k = 0; k < utility_set.size(); ++k)
        if (utility_set[k]) u.of_utility[k] = u.size++;

      if (u.size > 22)
        throw std::runtime_error("oracle: minimality universe too large");

      // Satisfied rules; utility-head rules are satisfied by construction.
      struct SatRule {
        const WeightedRule* rule;
        bool body_sat;
      };
      std::vector<SatRule> sat_rules;
      double log_weight = 0.0;
      for (const auto& r : program.rules) {
        const bool body_sat = sat(r.body, values);
        bool satisfied;
        if (r.utility_head >= 0)
          satisfied = true;
        else
          satisfied = !body_sat || sat(r.head, values);
        if (!satisfied) continue;
        if (!r.weight.hard) log_weight += r.weight.log_weight;
        sat_rules.push_back({&r, body_sat});
      }

      auto j_models_reduct = [&](const std::vector<bool>& j) {
        for (const auto& sr : sat_rules) {
          const WeightedRule& r = *sr.rule;
          const bool body_holds = sat_reduct(r.body, values, sig, u, j);
          if (!body_holds) continue;
          if (r.utility_head >= 0) {
            const int id =
                u.of_utility[static_cast<std::size_t>(r.utility_head)];
            if (id < 0 || !j[static_cast<std::size_t>(id)]) return false;
          } else if (!sat_reduct(r.head, values, sig, u, j)) {
            return false;
          }
        }
        return true;
      };

      bool minimal = true;
      const std::uint64_t full = (std::uint64_t{1} << u.size) - 1;
      std::vector<bool> j(static_cast<std::size_t>(u.size));
      for (std::uint64_t mask = 0; mask < full && minimal; ++mask) {
        for (int b = 0; b < u.size; ++b)
          j[static_cast<std::size_t>(b)] = ((mask >> b) & 1) != 0;
        if (j_models_reduct(j)) minimal = false;
      }

      if (minimal) {
        Model m;
        m.values = values;
        m.utility_set = utility_set;
        m.weight = std::exp(log_weight);
        for (std::size_t k = 0; k < utility_set.size(); ++k)
          if (utility_set[k]) m.utility += sig.utility_atoms()[k].value;
        out.push_back(std::move(m));
      }
    }

    // Next assignment.
    std::size_t i = n;
    bool done = true;
    while (i > 0) {
      --i;
      if (++values[i] <
          static_cast<int>(sig.constant(static_cast<int>(i)).domain.size())) {
        done = false;
        break;
      }
      values[i] = 0;
    }
    if (done || n == 0) break;
  }

  double total = 0.0;
  for (const auto& m : out) total += m.weight;
  for (auto& m : out) m.probability = total > 0.0 ? m.weight / total : 0.0;
  return out;
}

double probability(const std::vector<Model>& models, const Formula& f) {
  double p = 0.0;
  for (const auto& m : models)
    if (sat(f, m.values)) p += m.probability;
  return p;
}

double conditional(const std::vector<Model>& models, const Formula& q,
                   const Formula& e) {
  double num = 0.0, den = 0.0;
  for (const auto& m : models) {
    if (!sat(e, m.values)) continue;
    den += m.probability;
    if (sat(q, m.values)) num += m.probability;
  }
  if (den <= 0.0) throw std::runtime_error("oracle: infeasible evidence");
  return num / den;
}

double expected_utility(const std::vector<Model>& models,
                        const Formula& cond) {
  double num = 0.0, den = 0.0;
  for (const auto& m : models) {
    if (!sat(cond, m.values)) continue;
    den += m.probability;
    num += m.probability * m.utility;
  }
  if (den <= 0.0) throw std::runtime_error("oracle: infeasible condition");
  return num / den;
}

double marketing_expected_profit(const MarketingGraph& g,
                                 const std::vector<bool>& market_to) {
  const std::size_t e = g.edges.size();
  double expected = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << e); ++mask) {
    double p_outcome = 1.0;
    for (std::size_t k = 0; k < e; ++k)
      p_outcome *= ((mask >> k) & 1) ? g.edge_probability[k]
                                     : 1.0 - g.edge_probability[k];

    // Buys = vertices reachable from the marketed set over active edges.
    std::vector<bool> buys(static_cast<std::size_t>(g.vertices), false);
    for (int v = 0; v < g.vertices; ++v)
      if (market_to[static_cast<std::size_t>(v)])
        buys[static_cast<std::size_t>(v)] = true;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t k = 0; k < e; ++k) {
        if (!((mask >> k) & 1)) continue;
        const auto [from, to] = g.edges[k];
        if (buys[static_cast<std::size_t>(from)] &&
            !buys[static_cast<std::size_t>(to)]) {
          buys[static_cast<std::size_t>(to)] = true;
          changed = true;
        }
      }
    }

    double profit = 0.0;
    for (int v = 0; v < g.vertices; ++v) {
      if (buys[static_cast<std::size_t>(v)]) profit += g.reward_per_buyer;
      if (market_to[static_cast<std::size_t>(v)])
        profit -= g.vertex_cost[static_cast<std::size_t>(v)];
    }
    expected += p_outcome * profit;
  }
  return expected;
}

std::pair<std::vector<bool>, double> marketing_best_decision(
    const MarketingGraph& g) {
  std::vector<bool> best;
  double best_value = 0.0;
  bool first = true;
  for (std::uint64_t mask = 0;
       mask < (std::uint64_t{1} << g.vertices); ++mask) {
    std::vector<bool> dec(static_cast<std::size_t>(g.vertices));
    for (int v = 0; v < g.vertices; ++v)
      dec[static_cast<std::size_t>(v)] =
          ((mask >> (g.vertices - 1 - v)) & 1) != 0;
    const double value = marketing_expected_profit(g, dec);
    if (first || value > best_value + 1e-12) {
      best = dec;
      best_value = value;
      first = false;
    }
  }
  return {best, best_value};
}

}  // namespace pbcmdp::oracle
