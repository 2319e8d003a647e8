#ifndef PBCMDP_TRANSLATOR_HPP
#define PBCMDP_TRANSLATOR_HPP

#include <map>
#include <string>
#include <vector>

#include "pbcmdp/lang.hpp"

namespace pbcmdp {

/// Rule weight: hard (alpha) or soft with a log-domain weight. Soft weights
/// are stored directly as ln(p); no exp/ln round trips anywhere.
struct Weight {
  bool hard = true;
  double log_weight = 0.0;

  static Weight alpha() { return {true, 0.0}; }
  static Weight soft(double log_w) { return {false, log_w}; }
};

enum class RuleCategory : unsigned char {
  Static,
  Dynamic,
  PfFact,
  InitPfFact,
  InitialStatic,
  ChoiceFluent,
  ChoiceAction,
  Uniqueness,
  Existence,
  Utility,
  Other,  // free-form programs built outside the translator
};

/// Atoms of a ground program: (timed constant, value). A timed constant is a
/// description constant stamped with a step, or a free-form constant for
/// programs built directly. `multivalued` selects the semantics of the value
/// "false": multi-valued constants treat every c=v as a real atom that needs
/// derivation, while plain propositional constants treat false as absence.
struct TimedConstant {
  std::string name;
  std::vector<std::string> domain;
  bool multivalued = true;
  ConstantKind kind = ConstantKind::RegularFluent;
  int desc_constant = -1;
  int step = -1;
};

struct UtilityAtom {
  double value = 0.0;
  int step = -1;
  int rule_id = -1;
  std::string label;
};

class GroundSignature {
 public:
  int add_constant(TimedConstant c);
  int add_propositional(const std::string& name);  // boolean, false = absence
  int add_utility_atom(UtilityAtom u);

  const std::vector<TimedConstant>& constants() const { return constants_; }
  const std::vector<UtilityAtom>& utility_atoms() const { return utility_; }
  const TimedConstant& constant(int i) const {
    return constants_[static_cast<std::size_t>(i)];
  }

  int find(const std::string& name) const;        // -1 when missing
  int find(int desc_constant, int step) const;    // -1 when missing
  std::string atom_name(int constant, int value) const;

 private:
  std::vector<TimedConstant> constants_;
  std::vector<UtilityAtom> utility_;
  std::map<std::string, int> by_name_;
  std::map<std::pair<int, int>, int> by_desc_step_;
};

struct WeightedRule {
  Weight weight;
  Formula head;
  Formula body;
  int utility_head = -1;  // index into the signature's utility table, or -1
  RuleCategory category = RuleCategory::Other;
  int source_law = -1;
};

struct GroundProgram {
  GroundSignature signature;
  std::vector<WeightedRule> rules;
};

/// Which halves of the translation to emit. The init part carries the initpf
/// atoms, their facts, and the initial-state constraints; the dynamic part is
/// everything else. Transition extraction conditions on explicit states and
/// must not mix in the initial-state distribution, so it asks for
/// DynamicOnly, whose signature has no initpf atoms at all.
enum class TranslationParts : unsigned char { All, DynamicOnly };

/// Inserts step prefixes: every atom c=v of an untimed description formula
/// becomes (step:c)=v. Structure-preserving. Input atoms index description
/// constants, output atoms index the program signature; the operation is a
/// single application and is not defined on its own output.
Formula lift(const Formula& f, int step, const CompiledDescription& d,
             const GroundSignature& sig);

/// Translation of a ground description over horizon m into a weighted
/// stable-model program. Deterministic: rule order and utility-rule ids are
/// stable across runs.
GroundProgram translate(const CompiledDescription& d, int m,
                        TranslationParts parts = TranslationParts::All);

struct RuleCounts {
  std::size_t static_rules = 0;
  std::size_t dynamic_rules = 0;
  std::size_t pf_facts = 0;
  std::size_t initpf_facts = 0;
  std::size_t initial_static = 0;
  std::size_t choice_fluent = 0;
  std::size_t choice_action = 0;
  std::size_t uniqueness = 0;
  std::size_t existence = 0;
  std::size_t utility = 0;

  std::size_t total() const {
    return static_rules + dynamic_rules + pf_facts + initpf_facts +
           initial_static + choice_fluent + choice_action + uniqueness +
           existence + utility;
  }
};

RuleCounts rule_count(const CompiledDescription& d, int m,
                      TranslationParts parts = TranslationParts::All);

/// One rule per line, `hard:` / `soft(<w>):` prefixes.
std::string dump_program(const GroundProgram& p);

}  // namespace pbcmdp

#endif
