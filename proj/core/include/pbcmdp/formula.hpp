#ifndef PBCMDP_FORMULA_HPP
#define PBCMDP_FORMULA_HPP

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pbcmdp {

/// Three-valued truth for evaluation under partial assignments.
enum class Tri : unsigned char { False = 0, True = 1, Unknown = 2 };

/// Propositional formula over multi-valued atoms `constant = value`.
///
/// Atoms are (constant index, value index) pairs resolved against whatever
/// signature the formula was built for; the class itself is signature-agnostic.
/// Nodes are immutable and shared, so copies are cheap.
class Formula {
 public:
  enum class Kind : unsigned char { True, False, Atom, Not, And, Or };

  Formula() : Formula(top()) {}

  static Formula top();
  static Formula bottom();
  static Formula atom(int constant, int value);
  static Formula negate(Formula f);
  static Formula conj(std::vector<Formula> parts);   // conj({}) == top
  static Formula disj(std::vector<Formula> parts);   // disj({}) == bottom
  static Formula conj2(Formula a, Formula b);
  static Formula disj2(Formula a, Formula b);
  /// Classical implication a -> b, encoded as ~a | b. Only for use in
  /// query/evidence formulas; rules keep head and body separate.
  static Formula implies(Formula a, Formula b);

  Kind kind() const { return node_->kind; }
  bool is_constant_true() const { return node_->kind == Kind::True; }
  bool is_constant_false() const { return node_->kind == Kind::False; }

  /// Atom accessors; only valid when kind() == Kind::Atom.
  int constant() const { return node_->constant; }
  int value() const { return node_->value; }

  const std::vector<Formula>& children() const { return node_->children; }

  std::size_t node_count() const;
  bool structurally_equal(const Formula& other) const;

  /// Visits every atom leaf as (constant, value).
  void for_each_atom(const std::function<void(int, int)>& fn) const;

  /// Two-valued evaluation under a total assignment (values[c] = value index).
  bool eval(std::span<const int> values) const;

  /// Kleene evaluation under a partial assignment; -1 marks unassigned.
  Tri eval3(std::span<const int> values) const;

  std::string to_string(
      const std::function<std::string(int, int)>& atom_printer) const;

 private:
  struct Node {
    Kind kind = Kind::True;
    int constant = -1;
    int value = -1;
    std::vector<Formula> children;
  };

  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static std::shared_ptr<Node> make_node(Kind k);

  std::shared_ptr<const Node> node_;
};

}  // namespace pbcmdp

#endif
