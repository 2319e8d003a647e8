#include "pbcmdp/engine.hpp"

#include <algorithm>
#include <cmath>

#include "pbcmdp/log_domain.hpp"

namespace pbcmdp {

Formula reduct(const Formula& f, const Interpretation& I,
               const GroundSignature& sig) {
  (void)sig;
  if (!f.eval(I.values)) return Formula::bottom();
  switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::Atom:
      return f;
    case Formula::Kind::False:
      return f;  // unreachable: bottom never satisfied
    case Formula::Kind::Not:
      return Formula::negate(reduct(f.children().front(), I, sig));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> parts;
      parts.reserve(f.children().size());
      for (const auto& c : f.children()) parts.push_back(reduct(c, I, sig));
      return f.kind() == Formula::Kind::And ? Formula::conj(std::move(parts))
                                            : Formula::disj(std::move(parts));
    }
  }
  return Formula::bottom();
}

double utility(const Interpretation& I, const GroundSignature& sig) {
  double u = 0.0;
  for (std::size_t k = 0; k < sig.utility_atoms().size(); ++k)
    if (k < I.utility_set.size() && I.utility_set[k])
      u += sig.utility_atoms()[k].value;
  return u;
}

namespace {

// --------------------------------------------------------------------------
// Positive formulas over the minimality universe
//
// After the reduct, every surviving formula is positive over the atoms true
// in the candidate interpretation. Universe atoms get dense ids: one per
// multi-valued constant (its current value), one per true propositional
// atom, one per true utility atom.
// --------------------------------------------------------------------------

struct Pos {
  enum class Kind : unsigned char { True, False, Atom, And, Or } kind;
  int atom = -1;
  std::vector<Pos> children;

  static Pos t() { return {Kind::True, -1, {}}; }
  static Pos f() { return {Kind::False, -1, {}}; }
  static Pos a(int id) { return {Kind::Atom, id, {}}; }
};

bool eval_pos(const Pos& p, const std::vector<char>& in_set) {
  switch (p.kind) {
    case Pos::Kind::True: return true;
    case Pos::Kind::False: return false;
    case Pos::Kind::Atom: return in_set[static_cast<std::size_t>(p.atom)] != 0;
    case Pos::Kind::And:
      for (const auto& c : p.children)
        if (!eval_pos(c, in_set)) return false;
      return true;
    case Pos::Kind::Or:
      for (const auto& c : p.children)
        if (eval_pos(c, in_set)) return true;
      return false;
  }
  return false;
}

/// Collects the atoms of a head that is a conjunction of atoms (or a single
/// atom / top). Returns false when the head has disjunctive structure.
bool flatten_definite_head(const Pos& p, std::vector<int>& atoms) {
  switch (p.kind) {
    case Pos::Kind::True: return true;
    case Pos::Kind::False: return false;
    case Pos::Kind::Atom:
      atoms.push_back(p.atom);
      return true;
    case Pos::Kind::And:
      for (const auto& c : p.children)
        if (!flatten_definite_head(c, atoms)) return false;
      return true;
    case Pos::Kind::Or: return false;
  }
  return false;
}

// --------------------------------------------------------------------------
// Enumerator
// --------------------------------------------------------------------------

class Enumerator {
 public:
  Enumerator(const GroundProgram& prog, const EnumerationLimits& limits)
      : prog_(prog),
        limits_(limits),
        num_constants_(static_cast<int>(prog.signature.constants().size())) {
    build_indexes();
    assign_.assign(static_cast<std::size_t>(num_constants_), -1);
  }

  std::vector<StableModelRecord> run() {
    if (initial_sweep()) {
      search(0);
      normalize();
    }
    return std::move(models_);
  }

 private:
  const GroundProgram& prog_;
  EnumerationLimits limits_;
  int num_constants_;

  std::vector<int> assign_;
  std::vector<int> trail_;
  std::uint64_t nodes_ = 0;
  std::vector<StableModelRecord> models_;

  // rule index -> cached single-atom head (constant, value), or (-1,-1)
  std::vector<std::pair<int, int>> head_atom_;
  // constant -> rules whose head or body mentions it
  std::vector<std::vector<int>> rules_by_constant_;
  // (constant, value) -> rules with that atom positive in the head
  std::vector<std::vector<std::vector<int>>> support_rules_;
  // constant -> atoms whose support rules' bodies mention it
  std::vector<std::vector<std::pair<int, int>>> support_watch_;

  bool needs_support(int c, int v) const {
    const auto& tc = prog_.signature.constant(c);
    return tc.multivalued || v == 1;
  }

  void collect_positive_head_atoms(const Formula& f, bool positive,
                                   std::vector<std::pair<int, int>>& out) {
    switch (f.kind()) {
      case Formula::Kind::Atom:
        if (positive) out.emplace_back(f.constant(), f.value());
        break;
      case Formula::Kind::Not:
        collect_positive_head_atoms(f.children().front(), !positive, out);
        break;
      case Formula::Kind::And:
      case Formula::Kind::Or:
        for (const auto& c : f.children())
          collect_positive_head_atoms(c, positive, out);
        break;
      default:
        break;
    }
  }

  void build_indexes() {
    const auto& sig = prog_.signature;
    rules_by_constant_.assign(static_cast<std::size_t>(num_constants_), {});
    support_rules_.resize(static_cast<std::size_t>(num_constants_));
    support_watch_.assign(static_cast<std::size_t>(num_constants_), {});
    for (int c = 0; c < num_constants_; ++c)
      support_rules_[static_cast<std::size_t>(c)].resize(
          sig.constant(c).domain.size());

    head_atom_.assign(prog_.rules.size(), {-1, -1});
    for (std::size_t r = 0; r < prog_.rules.size(); ++r) {
      const WeightedRule& rule = prog_.rules[r];
      if (rule.utility_head >= 0 && !rule.weight.hard)
        throw std::invalid_argument(
            "utility atoms may only head hard rules");
      std::vector<char> touched(static_cast<std::size_t>(num_constants_), 0);
      auto touch = [&](int c, int) { touched[static_cast<std::size_t>(c)] = 1; };
      rule.body.for_each_atom(touch);
      if (rule.utility_head < 0) rule.head.for_each_atom(touch);
      for (int c = 0; c < num_constants_; ++c)
        if (touched[static_cast<std::size_t>(c)])
          rules_by_constant_[static_cast<std::size_t>(c)].push_back(
              static_cast<int>(r));

      if (rule.utility_head < 0) {
        if (rule.head.kind() == Formula::Kind::Atom)
          head_atom_[r] = {rule.head.constant(), rule.head.value()};
        std::vector<std::pair<int, int>> head_atoms;
        collect_positive_head_atoms(rule.head, true, head_atoms);
        for (auto [c, v] : head_atoms) {
          // Propositional false atoms are negative literals in disguise;
          // they derive nothing.
          if (!prog_.signature.constant(c).multivalued && v == 0) continue;
          auto& vec = support_rules_[static_cast<std::size_t>(c)]
                                    [static_cast<std::size_t>(v)];
          if (vec.empty() || vec.back() != static_cast<int>(r))
            vec.push_back(static_cast<int>(r));
          std::vector<char> body_touched(
              static_cast<std::size_t>(num_constants_), 0);
          rule.body.for_each_atom([&](int bc, int) {
            body_touched[static_cast<std::size_t>(bc)] = 1;
          });
          for (int bc = 0; bc < num_constants_; ++bc)
            if (body_touched[static_cast<std::size_t>(bc)])
              support_watch_[static_cast<std::size_t>(bc)].emplace_back(c, v);
        }
      }
    }
    for (auto& watch : support_watch_) {
      std::sort(watch.begin(), watch.end());
      watch.erase(std::unique(watch.begin(), watch.end()), watch.end());
    }
  }

  /// One pass over every rule before the search starts; catches rules whose
  /// bodies hold vacuously (facts, atom-free constraints) and seeds the
  /// propagation trail.
  bool initial_sweep() {
    for (std::size_t ri = 0; ri < prog_.rules.size(); ++ri) {
      const WeightedRule& rule = prog_.rules[ri];
      if (!rule.weight.hard || rule.utility_head >= 0) continue;
      const Tri body = rule.body.eval3(assign_);
      if (body != Tri::True) continue;
      const Tri head = rule.head.eval3(assign_);
      if (head == Tri::False) return false;
      if (head == Tri::Unknown) {
        const auto [hc, hv] = head_atom_[ri];
        if (hc >= 0 && !set_value(hc, hv)) return false;
      }
    }
    return propagate(0);
  }

  bool support_viable(int c, int v) const {
    for (int r : support_rules_[static_cast<std::size_t>(c)]
                                [static_cast<std::size_t>(v)]) {
      if (prog_.rules[static_cast<std::size_t>(r)].body.eval3(assign_) !=
          Tri::False)
        return true;
    }
    return false;
  }

  bool set_value(int c, int v) {
    int& slot = assign_[static_cast<std::size_t>(c)];
    if (slot >= 0) return slot == v;
    slot = v;
    trail_.push_back(c);
    return true;
  }

  /// Processes the trail from `from` onward: rule violation checks, forced
  /// single-atom heads, and support rechecks. Returns false on conflict.
  bool propagate(std::size_t from) {
    for (std::size_t ti = from; ti < trail_.size(); ++ti) {
      const int c = trail_[ti];
      const int v = assign_[static_cast<std::size_t>(c)];

      for (int ri : rules_by_constant_[static_cast<std::size_t>(c)]) {
        const WeightedRule& rule = prog_.rules[static_cast<std::size_t>(ri)];
        if (!rule.weight.hard || rule.utility_head >= 0) continue;
        const Tri body = rule.body.eval3(assign_);
        if (body != Tri::True) continue;
        const Tri head = rule.head.eval3(assign_);
        if (head == Tri::False) return false;
        if (head == Tri::Unknown) {
          const auto [hc, hv] = head_atom_[static_cast<std::size_t>(ri)];
          if (hc >= 0 && !set_value(hc, hv)) return false;
        }
      }

      if (needs_support(c, v) && !support_viable(c, v)) return false;
      for (auto [ac, av] : support_watch_[static_cast<std::size_t>(c)]) {
        if (assign_[static_cast<std::size_t>(ac)] != av) continue;
        if (needs_support(ac, av) && !support_viable(ac, av)) return false;
      }
    }
    return true;
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      assign_[static_cast<std::size_t>(trail_.back())] = -1;
      trail_.pop_back();
    }
  }

  void search(int hint) {
    int k = -1;
    for (int c = hint; c < num_constants_; ++c) {
      if (assign_[static_cast<std::size_t>(c)] < 0) {
        k = c;
        break;
      }
    }
    if (k < 0) {
      finalize_candidate();
      return;
    }
    const int domain_size = static_cast<int>(
        prog_.signature.constant(k).domain.size());
    for (int v = 0; v < domain_size; ++v) {
      if (++nodes_ > limits_.max_nodes)
        throw ResourceGuard("stable-model search exceeded the node limit");
      const std::size_t mark = trail_.size();
      if (set_value(k, v) && propagate(mark)) search(k + 1);
      undo(mark);
    }
  }

  // --- candidate checking ---------------------------------------------------

  void finalize_candidate() {
    const auto& sig = prog_.signature;
    Interpretation I;
    I.values = assign_;
    I.utility_set.assign(sig.utility_atoms().size(), false);
    for (const auto& rule : prog_.rules)
      if (rule.utility_head >= 0 && rule.body.eval(I.values))
        I.utility_set[static_cast<std::size_t>(rule.utility_head)] = true;

    double log_weight = 0.0;
    if (!check_stability(I, log_weight)) return;

    if (models_.size() >= limits_.max_models)
      throw ResourceGuard("stable-model enumeration exceeded the model limit");
    StableModelRecord rec;
    rec.interpretation = std::move(I);
    rec.log_weight = log_weight;
    rec.utility = utility(rec.interpretation, sig);
    models_.push_back(std::move(rec));
  }

  bool rule_satisfied(const WeightedRule& rule, const Interpretation& I) const {
    if (!rule.body.eval(I.values)) return true;
    if (rule.utility_head >= 0)
      return I.utility_set[static_cast<std::size_t>(rule.utility_head)];
    return rule.head.eval(I.values);
  }

  /// Ferraris reduct of a satisfied formula into the positive fragment.
  Pos reduce(const Formula& f, const Interpretation& I,
             const std::vector<int>& universe_of_constant) const {
    if (!f.eval(I.values)) return Pos::f();
    switch (f.kind()) {
      case Formula::Kind::True:
        return Pos::t();
      case Formula::Kind::Atom: {
        const int c = f.constant();
        if (!prog_.signature.constant(c).multivalued && f.value() == 0)
          return Pos::t();  // satisfied negative literal
        return Pos::a(universe_of_constant[static_cast<std::size_t>(c)]);
      }
      case Formula::Kind::Not:
        return Pos::t();  // satisfied negation reduces to top
      case Formula::Kind::And: {
        Pos p{Pos::Kind::And, -1, {}};
        for (const auto& ch : f.children())
          p.children.push_back(reduce(ch, I, universe_of_constant));
        return p;
      }
      case Formula::Kind::Or: {
        Pos p{Pos::Kind::Or, -1, {}};
        for (const auto& ch : f.children())
          p.children.push_back(reduce(ch, I, universe_of_constant));
        return p;
      }
      case Formula::Kind::False:
        return Pos::f();
    }
    return Pos::f();
  }

  bool check_stability(const Interpretation& I, double& log_weight) {
    const auto& sig = prog_.signature;

    // Universe of true atoms: one per constant that carries a real atom,
    // plus true utility atoms.
    std::vector<int> universe_of_constant(
        static_cast<std::size_t>(num_constants_), -1);
    int universe_size = 0;
    for (int c = 0; c < num_constants_; ++c) {
      const auto& tc = sig.constant(c);
      if (tc.multivalued || I.values[static_cast<std::size_t>(c)] == 1)
        universe_of_constant[static_cast<std::size_t>(c)] = universe_size++;
    }
    std::vector<int> universe_of_utility(sig.utility_atoms().size(), -1);
    for (std::size_t k = 0; k < sig.utility_atoms().size(); ++k)
      if (I.utility_set[k]) universe_of_utility[k] = universe_size++;

    struct ReductRule {
      Pos body;
      std::vector<int> head_atoms;  // definite heads
      Pos head;                     // disjunctive heads
      bool definite = true;
    };
    std::vector<ReductRule> rules;
    std::vector<ReductRule> nondefinite;

    log_weight = 0.0;
    for (const auto& rule : prog_.rules) {
      const bool satisfied = rule_satisfied(rule, I);
      if (!satisfied) continue;  // search guarantees hard rules hold
      if (!rule.weight.hard) log_weight += rule.weight.log_weight;

      Pos body = reduce(rule.body, I, universe_of_constant);
      if (body.kind == Pos::Kind::False) continue;

      ReductRule rr;
      rr.body = std::move(body);
      if (rule.utility_head >= 0) {
        rr.head_atoms.push_back(
            universe_of_utility[static_cast<std::size_t>(rule.utility_head)]);
      } else {
        Pos head = reduce(rule.head, I, universe_of_constant);
        if (!flatten_definite_head(head, rr.head_atoms)) {
          rr.definite = false;
          rr.head = std::move(head);
        }
      }
      if (rr.definite)
        rules.push_back(std::move(rr));
      else
        nondefinite.push_back(std::move(rr));
    }

    // Least model of the definite part.
    std::vector<char> lm(static_cast<std::size_t>(universe_size), 0);
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& rr : rules) {
        if (!eval_pos(rr.body, lm)) continue;
        for (int a : rr.head_atoms) {
          if (!lm[static_cast<std::size_t>(a)]) {
            lm[static_cast<std::size_t>(a)] = 1;
            changed = true;
          }
        }
      }
    }

    int lm_size = 0;
    for (char b : lm) lm_size += b;

    if (nondefinite.empty()) return lm_size == universe_size;

    // Disjunctive heads: any model of the reduct contains the definite least
    // model, so search the remaining atoms for a proper submodel.
    std::vector<int> rest;
    for (int a = 0; a < universe_size; ++a)
      if (!lm[static_cast<std::size_t>(a)]) rest.push_back(a);
    if (rest.empty()) return true;
    if (rest.size() > 22)
      throw ResourceGuard(
          "minimality check with disjunctive heads over too many atoms");

    const std::uint64_t all = (std::uint64_t{1} << rest.size()) - 1;
    std::vector<char> j(static_cast<std::size_t>(universe_size), 0);
    for (std::uint64_t mask = 0; mask < all; ++mask) {  // excludes full set
      for (std::size_t i = 0; i < rest.size(); ++i)
        j[static_cast<std::size_t>(rest[i])] = (mask >> i) & 1 ? 1 : 0;
      for (int a = 0; a < universe_size; ++a)
        if (lm[static_cast<std::size_t>(a)]) j[static_cast<std::size_t>(a)] = 1;
      bool model = true;
      for (const auto& rr : rules) {
        if (eval_pos(rr.body, j)) {
          for (int a : rr.head_atoms)
            if (!j[static_cast<std::size_t>(a)]) {
              model = false;
              break;
            }
        }
        if (!model) break;
      }
      if (model) {
        for (const auto& rr : nondefinite) {
          if (eval_pos(rr.body, j) && !eval_pos(rr.head, j)) {
            model = false;
            break;
          }
        }
      }
      if (model) return false;  // proper submodel found
    }
    return true;
  }

  void normalize() {
    if (models_.empty()) return;
    std::vector<double> weights;
    weights.reserve(models_.size());
    for (const auto& m : models_) weights.push_back(m.log_weight);
    const double lse = log_sum_exp(weights);
    for (auto& m : models_) m.probability = std::exp(m.log_weight - lse);
  }
};

}  // namespace

Inference::Inference(GroundProgram program, EnumerationLimits limits)
    : program_(std::move(program)), limits_(limits) {}

void Inference::enumerate() {
  if (enumerated_) return;
  Enumerator e(program_, limits_);
  models_ = e.run();
  enumerated_ = true;
}

const std::vector<StableModelRecord>& Inference::models() {
  enumerate();
  if (models_.empty()) throw NoStableModel();
  return models_;
}

bool Inference::has_models() {
  enumerate();
  return !models_.empty();
}

QueryResult Inference::query_probability(const Formula& query,
                                         const Formula& evidence) {
  const auto& ms = models();
  double num = 0.0, den = 0.0;
  std::size_t support = 0;
  for (const auto& m : ms) {
    if (!evidence.eval(m.interpretation.values)) continue;
    den += m.probability;
    if (query.eval(m.interpretation.values)) {
      num += m.probability;
      ++support;
    }
  }
  if (den <= 0.0)
    throw InfeasibleQuery("evidence has no satisfying stable model");
  return {num / den, support};
}

double Inference::probability(const Formula& f) {
  const auto& ms = models();
  double p = 0.0;
  for (const auto& m : ms)
    if (f.eval(m.interpretation.values)) p += m.probability;
  return p;
}

double Inference::expected_utility(const Formula& condition) {
  const auto& ms = models();
  double num = 0.0, den = 0.0;
  bool any = false;
  for (const auto& m : ms) {
    if (!condition.eval(m.interpretation.values)) continue;
    any = true;
    den += m.probability;
    num += m.probability * m.utility;
  }
  if (!any || den <= 0.0)
    throw InfeasibleQuery("condition has no satisfying stable model");
  return num / den;
}

std::vector<StableModelRecord> enumerate_stable_models(
    const GroundProgram& program, EnumerationLimits limits) {
  Enumerator e(program, limits);
  return e.run();
}

}  // namespace pbcmdp
