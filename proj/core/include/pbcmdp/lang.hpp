#ifndef PBCMDP_LANG_HPP
#define PBCMDP_LANG_HPP

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pbcmdp/formula.hpp"

namespace pbcmdp {

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

struct Sort {
  std::string name;
  std::vector<std::string> objects;  // ordered, nonempty, unique
};

enum class ConstantKind : unsigned char {
  RegularFluent,
  StaticFluent,
  Action,
  Pf,
  InitPf,
};

bool is_fluent(ConstantKind k);
const char* kind_name(ConstantKind k);

/// How a declared constant's domain is specified.
struct DomainSpec {
  enum class Tag { Boolean, SortRef, Explicit } tag = Tag::Boolean;
  std::string sort;                  // SortRef
  std::vector<std::string> values;   // Explicit
};

/// A declared constant, possibly parameterized by sorts:
///   fluent OnTopOf(block, block)
/// grounds to one constant per argument tuple.
struct ConstantSchema {
  std::string name;
  std::vector<std::string> arg_sorts;
  ConstantKind kind = ConstantKind::RegularFluent;
  DomainSpec domain;
};

// ---------------------------------------------------------------------------
// Terms and schematic formulas
// ---------------------------------------------------------------------------

/// An object name or a schematic variable.
struct Term {
  bool is_variable = false;
  std::string text;

  static Term object(std::string s) { return {false, std::move(s)}; }
  static Term variable(std::string s) { return {true, std::move(s)}; }
  bool operator==(const Term& o) const {
    return is_variable == o.is_variable && text == o.text;
  }
};

struct AtomTemplate {
  std::string constant;
  std::vector<Term> args;
  Term value;  // object/boolean literal, or a variable ranging over the domain

  bool operator==(const AtomTemplate& o) const {
    return constant == o.constant && args == o.args && value == o.value;
  }
};

/// Schematic counterpart of Formula with AtomTemplate leaves.
class Fml {
 public:
  enum class Kind : unsigned char { True, False, Atom, Not, And, Or };

  Fml() : Fml(top()) {}

  static Fml top();
  static Fml bottom();
  static Fml atom(AtomTemplate a);
  static Fml negate(Fml f);
  static Fml conj(std::vector<Fml> parts);
  static Fml disj(std::vector<Fml> parts);
  static Fml conj2(Fml a, Fml b);

  Kind kind() const { return node_->kind; }
  const AtomTemplate& leaf() const { return node_->atom; }
  const std::vector<Fml>& children() const { return node_->children; }

  std::size_t node_count() const;
  bool operator==(const Fml& o) const;

  Fml substitute(const std::map<std::string, std::string>& binding) const;
  void collect_variables(std::vector<std::string>& out) const;
  void for_each_atom(const std::function<void(const AtomTemplate&)>& fn) const;

 private:
  struct Node {
    Kind kind = Kind::True;
    AtomTemplate atom;
    std::vector<Fml> children;
  };
  explicit Fml(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Causal laws
// ---------------------------------------------------------------------------

enum class LawKind : unsigned char {
  Static,         // caused F if G
  Dynamic,        // caused F if G after H
  PfDecl,         // caused c = { v1 : p1, ... }
  InitPfDecl,     // same for an initpf constant
  InitialStatic,  // initially F if G
  Utility,        // reward v if F after G
  NoConcurrency,  // marker; expands to pairwise action constraints at grounding
};

struct InequalityGuard {
  Term lhs;
  Term rhs;  // guard holds when the ground instantiations differ
};

struct CausalLaw {
  LawKind kind = LawKind::Static;
  Fml head;   // F
  Fml cond;   // G
  Fml after;  // H (Dynamic only)

  // PfDecl / InitPfDecl
  AtomTemplate pf_constant;                               // args may be schematic
  std::vector<std::pair<std::string, double>> pf_dist;    // (value, probability)

  double reward = 0.0;  // Utility

  std::vector<InequalityGuard> guards;
  int source_line = 0;
};

// ---------------------------------------------------------------------------
// Action description
// ---------------------------------------------------------------------------

struct ActionDescription {
  std::vector<Sort> sorts;
  std::vector<ConstantSchema> constants;
  std::map<std::string, std::string> variables;  // variable name -> sort
  std::vector<CausalLaw> laws;

  const Sort* find_sort(const std::string& name) const;
  const ConstantSchema* find_constant(const std::string& name) const;
  bool is_ground() const;
};

struct Violation {
  int law_index = -1;  // -1 for description-level problems
  std::string message;
};

/// Checks every syntactic restriction on a ground description. Violations are
/// data, not failures; an empty result means the description is well-formed.
std::vector<Violation> validate(const ActionDescription& d);

struct GroundingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Expands schematic variables over their sorts, drops instances ruled out by
/// inequality guards, and expands the no-concurrency marker. Idempotent on
/// variable-free descriptions.
ActionDescription ground_schematics(const ActionDescription& d);

// ---------------------------------------------------------------------------
// Compiled (indexed) form
// ---------------------------------------------------------------------------

/// A ground constant after schema expansion, e.g. "OnTopOf(b1,b2)".
struct GroundConstantDecl {
  std::string name;
  ConstantKind kind;
  std::vector<std::string> domain;
  int value_index(const std::string& v) const;
};

enum class CompiledLawKind : unsigned char {
  Static,
  Dynamic,
  PfDecl,
  InitPfDecl,
  InitialStatic,
  Utility,
};

struct CompiledLaw {
  CompiledLawKind kind;
  Formula head;               // over description constants (untimed)
  Formula cond;
  Formula after;
  int pf_constant = -1;
  std::vector<double> pf_probs;  // aligned with the constant's domain
  double reward = 0.0;
  int source_index = -1;  // index into ActionDescription::laws
};

/// Index-resolved description: formulas refer to constants by position.
class CompiledDescription {
 public:
  const std::vector<GroundConstantDecl>& constants() const { return constants_; }
  const std::vector<CompiledLaw>& laws() const { return laws_; }
  int constant_index(const std::string& name) const;  // -1 when missing
  std::vector<int> constants_of_kind(ConstantKind k) const;
  std::string atom_name(int constant, int value) const;

  static CompiledDescription compile(const ActionDescription& ground);

 private:
  std::vector<GroundConstantDecl> constants_;
  std::vector<CompiledLaw> laws_;
  std::map<std::string, int> index_;
};

}  // namespace pbcmdp

#endif
