#include "pbcmdp/translator.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pbcmdp {

int GroundSignature::add_constant(TimedConstant c) {
  const int idx = static_cast<int>(constants_.size());
  by_name_[c.name] = idx;
  if (c.desc_constant >= 0)
    by_desc_step_[{c.desc_constant, c.step}] = idx;
  constants_.push_back(std::move(c));
  return idx;
}

int GroundSignature::add_propositional(const std::string& name) {
  TimedConstant c;
  c.name = name;
  c.domain = {"false", "true"};
  c.multivalued = false;
  return add_constant(std::move(c));
}

int GroundSignature::add_utility_atom(UtilityAtom u) {
  utility_.push_back(std::move(u));
  return static_cast<int>(utility_.size()) - 1;
}

int GroundSignature::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

int GroundSignature::find(int desc_constant, int step) const {
  auto it = by_desc_step_.find({desc_constant, step});
  return it == by_desc_step_.end() ? -1 : it->second;
}

std::string GroundSignature::atom_name(int constant, int value) const {
  const auto& c = constants_[static_cast<std::size_t>(constant)];
  return c.name + "=" + c.domain[static_cast<std::size_t>(value)];
}

Formula lift(const Formula& f, int step, const CompiledDescription& d,
             const GroundSignature& sig) {
  switch (f.kind()) {
    case Formula::Kind::True:
      return Formula::top();
    case Formula::Kind::False:
      return Formula::bottom();
    case Formula::Kind::Atom: {
      const int timed = sig.find(f.constant(), step);
      if (timed < 0)
        throw std::out_of_range("no step-" + std::to_string(step) +
                                " copy of constant " +
                                d.constants()[static_cast<std::size_t>(
                                                  f.constant())]
                                    .name);
      return Formula::atom(timed, f.value());
    }
    case Formula::Kind::Not:
      return Formula::negate(lift(f.children().front(), step, d, sig));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> parts;
      parts.reserve(f.children().size());
      for (const auto& c : f.children()) parts.push_back(lift(c, step, d, sig));
      return f.kind() == Formula::Kind::And ? Formula::conj(std::move(parts))
                                            : Formula::disj(std::move(parts));
    }
  }
  return Formula::top();
}

namespace {

std::string format_weight(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

/// Timed-constant layout, chosen so that the stable-model search assigns
/// initpf first, then per step: fluents, actions, pf. Fluent steps run 0..m,
/// action and pf steps 0..m-1, initpf exists at step 0 only and only in
/// programs that carry the init part.
GroundSignature build_signature(const CompiledDescription& d, int m,
                                bool with_initpf) {
  GroundSignature sig;
  auto add = [&](int desc_idx, int step) {
    const auto& decl = d.constants()[static_cast<std::size_t>(desc_idx)];
    TimedConstant tc;
    tc.name = std::to_string(step) + ":" + decl.name;
    tc.domain = decl.domain;
    tc.multivalued = true;
    tc.kind = decl.kind;
    tc.desc_constant = desc_idx;
    tc.step = step;
    sig.add_constant(std::move(tc));
  };

  if (with_initpf) {
    for (std::size_t i = 0; i < d.constants().size(); ++i)
      if (d.constants()[i].kind == ConstantKind::InitPf)
        add(static_cast<int>(i), 0);
  }
  for (int step = 0; step <= m; ++step) {
    for (std::size_t i = 0; i < d.constants().size(); ++i)
      if (is_fluent(d.constants()[i].kind)) add(static_cast<int>(i), step);
    if (step < m) {
      for (std::size_t i = 0; i < d.constants().size(); ++i)
        if (d.constants()[i].kind == ConstantKind::Action)
          add(static_cast<int>(i), step);
      for (std::size_t i = 0; i < d.constants().size(); ++i)
        if (d.constants()[i].kind == ConstantKind::Pf)
          add(static_cast<int>(i), step);
    }
  }
  return sig;
}

}  // namespace

GroundProgram translate(const CompiledDescription& d, int m,
                        TranslationParts parts) {
  if (m < 0) throw std::invalid_argument("horizon must be nonnegative");

  GroundProgram p;
  const bool emit_init = parts != TranslationParts::DynamicOnly;
  p.signature = build_signature(d, m, emit_init);
  const GroundSignature& sig = p.signature;

  auto push = [&](Weight w, Formula head, Formula body, RuleCategory cat,
                  int source, int utility_head = -1) {
    WeightedRule r;
    r.weight = w;
    r.head = std::move(head);
    r.body = std::move(body);
    r.utility_head = utility_head;
    r.category = cat;
    r.source_law = source;
    p.rules.push_back(std::move(r));
  };

  // (a) static laws, every step
  for (const auto& law : d.laws()) {
    if (law.kind != CompiledLawKind::Static) continue;
    for (int i = 0; i <= m; ++i)
      push(Weight::alpha(), lift(law.head, i, d, sig),
           lift(law.cond, i, d, sig), RuleCategory::Static, law.source_index);
  }
  // (b) fluent dynamic laws
  for (const auto& law : d.laws()) {
    if (law.kind != CompiledLawKind::Dynamic) continue;
    for (int i = 0; i < m; ++i)
      push(Weight::alpha(), lift(law.head, i + 1, d, sig),
           Formula::conj2(lift(law.cond, i + 1, d, sig),
                          lift(law.after, i, d, sig)),
           RuleCategory::Dynamic, law.source_index);
  }
  // (c) pf facts: ln(p_j): (i:c)=v_j
  for (const auto& law : d.laws()) {
    if (law.kind != CompiledLawKind::PfDecl) continue;
    for (int i = 0; i < m; ++i) {
      const int timed = sig.find(law.pf_constant, i);
      for (std::size_t v = 0; v < law.pf_probs.size(); ++v)
        push(Weight::soft(std::log(law.pf_probs[v])),
             Formula::atom(timed, static_cast<int>(v)), Formula::top(),
             RuleCategory::PfFact, law.source_index);
    }
  }
  if (emit_init) {
    // (d) initpf facts at step 0
    for (const auto& law : d.laws()) {
      if (law.kind != CompiledLawKind::InitPfDecl) continue;
      const int timed = sig.find(law.pf_constant, 0);
      for (std::size_t v = 0; v < law.pf_probs.size(); ++v)
        push(Weight::soft(std::log(law.pf_probs[v])),
             Formula::atom(timed, static_cast<int>(v)), Formula::top(),
             RuleCategory::InitPfFact, law.source_index);
    }
    // (e) initial static laws: bottom <- ~(0:F) & 0:G
    for (const auto& law : d.laws()) {
      if (law.kind != CompiledLawKind::InitialStatic) continue;
      push(Weight::alpha(), Formula::bottom(),
           Formula::conj2(Formula::negate(lift(law.head, 0, d, sig)),
                          lift(law.cond, 0, d, sig)),
           RuleCategory::InitialStatic, law.source_index);
    }
  }
  // (f) choice rules: {A}ch <- Body encoded as A <- Body & ~~A
  for (std::size_t c = 0; c < d.constants().size(); ++c) {
    const auto& decl = d.constants()[c];
    if (decl.kind == ConstantKind::RegularFluent) {
      const int timed = sig.find(static_cast<int>(c), 0);
      for (std::size_t v = 0; v < decl.domain.size(); ++v) {
        const Formula a = Formula::atom(timed, static_cast<int>(v));
        push(Weight::alpha(), a, Formula::negate(Formula::negate(a)),
             RuleCategory::ChoiceFluent, -1);
      }
    } else if (decl.kind == ConstantKind::Action) {
      for (int i = 0; i < m; ++i) {
        const int timed = sig.find(static_cast<int>(c), i);
        for (int v = 1; v >= 0; --v) {  // {true}ch then {false}ch
          const Formula a = Formula::atom(timed, v);
          push(Weight::alpha(), a, Formula::negate(Formula::negate(a)),
               RuleCategory::ChoiceAction, -1);
        }
      }
    }
  }
  // (g) uniqueness and existence, every timed constant
  for (int c = 0; c < static_cast<int>(sig.constants().size()); ++c) {
    const auto& tc = sig.constant(c);
    const int n = static_cast<int>(tc.domain.size());
    for (int v1 = 0; v1 < n; ++v1)
      for (int v2 = v1 + 1; v2 < n; ++v2)
        push(Weight::alpha(), Formula::bottom(),
             Formula::conj2(Formula::atom(c, v1), Formula::atom(c, v2)),
             RuleCategory::Uniqueness, -1);
    std::vector<Formula> any;
    for (int v = 0; v < n; ++v) any.push_back(Formula::atom(c, v));
    push(Weight::alpha(), Formula::bottom(),
         Formula::negate(Formula::disj(std::move(any))),
         RuleCategory::Existence, -1);
  }
  // (h) utility rules: utility(v, i+1, id) <- (i+1:F) & (i:G)
  int next_id = 0;
  for (const auto& law : d.laws()) {
    if (law.kind != CompiledLawKind::Utility) continue;
    for (int i = 0; i < m; ++i) {
      UtilityAtom u;
      u.value = law.reward;
      u.step = i + 1;
      u.rule_id = next_id++;
      u.label = "utility(" + format_weight(law.reward) + "," +
                std::to_string(i + 1) + "," + std::to_string(u.rule_id) + ")";
      const int idx = p.signature.add_utility_atom(u);
      push(Weight::alpha(), Formula::top(),
           Formula::conj2(lift(law.head, i + 1, d, sig),
                          lift(law.cond, i, d, sig)),
           RuleCategory::Utility, law.source_index, idx);
    }
  }
  return p;
}

RuleCounts rule_count(const CompiledDescription& d, int m,
                      TranslationParts parts) {
  const GroundProgram p = translate(d, m, parts);
  RuleCounts counts;
  for (const auto& r : p.rules) {
    switch (r.category) {
      case RuleCategory::Static: ++counts.static_rules; break;
      case RuleCategory::Dynamic: ++counts.dynamic_rules; break;
      case RuleCategory::PfFact: ++counts.pf_facts; break;
      case RuleCategory::InitPfFact: ++counts.initpf_facts; break;
      case RuleCategory::InitialStatic: ++counts.initial_static; break;
      case RuleCategory::ChoiceFluent: ++counts.choice_fluent; break;
      case RuleCategory::ChoiceAction: ++counts.choice_action; break;
      case RuleCategory::Uniqueness: ++counts.uniqueness; break;
      case RuleCategory::Existence: ++counts.existence; break;
      case RuleCategory::Utility: ++counts.utility; break;
      case RuleCategory::Other: break;
    }
  }
  return counts;
}

std::string dump_program(const GroundProgram& p) {
  std::string out;
  auto atom_printer = [&](int c, int v) { return p.signature.atom_name(c, v); };
  for (const auto& r : p.rules) {
    if (r.weight.hard) {
      out += "hard: ";
    } else {
      char buf[48];
      std::snprintf(buf, sizeof buf, "soft(%.9g): ", r.weight.log_weight);
      out += buf;
    }
    if (r.utility_head >= 0) {
      out += p.signature.utility_atoms()[static_cast<std::size_t>(
                                             r.utility_head)]
                 .label;
    } else {
      out += r.head.to_string(atom_printer);
    }
    out += " <- ";
    out += r.body.to_string(atom_printer);
    out += ".\n";
  }
  return out;
}

}  // namespace pbcmdp
