#include "pbcmdp/formula.hpp"

namespace pbcmdp {

std::shared_ptr<Formula::Node> Formula::make_node(Kind k) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  return n;
}

Formula Formula::top() {
  static Formula f{make_node(Kind::True)};
  return f;
}

Formula Formula::bottom() {
  static Formula f{make_node(Kind::False)};
  return f;
}

Formula Formula::atom(int constant, int value) {
  auto n = make_node(Kind::Atom);
  n->constant = constant;
  n->value = value;
  return Formula{std::move(n)};
}

Formula Formula::negate(Formula f) {
  auto n = make_node(Kind::Not);
  n->children.push_back(std::move(f));
  return Formula{std::move(n)};
}

Formula Formula::conj(std::vector<Formula> parts) {
  if (parts.empty()) return top();
  if (parts.size() == 1) return parts.front();
  auto n = make_node(Kind::And);
  n->children = std::move(parts);
  return Formula{std::move(n)};
}

Formula Formula::disj(std::vector<Formula> parts) {
  if (parts.empty()) return bottom();
  if (parts.size() == 1) return parts.front();
  auto n = make_node(Kind::Or);
  n->children = std::move(parts);
  return Formula{std::move(n)};
}

Formula Formula::conj2(Formula a, Formula b) {
  std::vector<Formula> parts;
  parts.push_back(std::move(a));
  parts.push_back(std::move(b));
  return conj(std::move(parts));
}

Formula Formula::disj2(Formula a, Formula b) {
  std::vector<Formula> parts;
  parts.push_back(std::move(a));
  parts.push_back(std::move(b));
  return disj(std::move(parts));
}

Formula Formula::implies(Formula a, Formula b) {
  return disj2(negate(std::move(a)), std::move(b));
}

std::size_t Formula::node_count() const {
  std::size_t n = 1;
  for (const auto& c : node_->children) n += c.node_count();
  return n;
}

bool Formula::structurally_equal(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (node_->kind != other.node_->kind) return false;
  if (node_->kind == Kind::Atom)
    return node_->constant == other.node_->constant &&
           node_->value == other.node_->value;
  if (node_->children.size() != other.node_->children.size()) return false;
  for (std::size_t i = 0; i < node_->children.size(); ++i)
    if (!node_->children[i].structurally_equal(other.node_->children[i]))
      return false;
  return true;
}

void Formula::for_each_atom(const std::function<void(int, int)>& fn) const {
  switch (node_->kind) {
    case Kind::Atom:
      fn(node_->constant, node_->value);
      break;
    case Kind::Not:
    case Kind::And:
    case Kind::Or:
      for (const auto& c : node_->children) c.for_each_atom(fn);
      break;
    default:
      break;
  }
}

bool Formula::eval(std::span<const int> values) const {
  switch (node_->kind) {
    case Kind::True:
      return true;
    case Kind::False:
      return false;
    case Kind::Atom:
      return values[static_cast<std::size_t>(node_->constant)] == node_->value;
    case Kind::Not:
      return !node_->children.front().eval(values);
    case Kind::And:
      for (const auto& c : node_->children)
        if (!c.eval(values)) return false;
      return true;
    case Kind::Or:
      for (const auto& c : node_->children)
        if (c.eval(values)) return true;
      return false;
  }
  return false;
}

Tri Formula::eval3(std::span<const int> values) const {
  switch (node_->kind) {
    case Kind::True:
      return Tri::True;
    case Kind::False:
      return Tri::False;
    case Kind::Atom: {
      const int v = values[static_cast<std::size_t>(node_->constant)];
      if (v < 0) return Tri::Unknown;
      return v == node_->value ? Tri::True : Tri::False;
    }
    case Kind::Not: {
      const Tri t = node_->children.front().eval3(values);
      if (t == Tri::Unknown) return Tri::Unknown;
      return t == Tri::True ? Tri::False : Tri::True;
    }
    case Kind::And: {
      bool unknown = false;
      for (const auto& c : node_->children) {
        const Tri t = c.eval3(values);
        if (t == Tri::False) return Tri::False;
        if (t == Tri::Unknown) unknown = true;
      }
      return unknown ? Tri::Unknown : Tri::True;
    }
    case Kind::Or: {
      bool unknown = false;
      for (const auto& c : node_->children) {
        const Tri t = c.eval3(values);
        if (t == Tri::True) return Tri::True;
        if (t == Tri::Unknown) unknown = true;
      }
      return unknown ? Tri::Unknown : Tri::False;
    }
  }
  return Tri::Unknown;
}

namespace {

void print(const Formula& f, std::string& out,
           const std::function<std::string(int, int)>& atoms, bool parens) {
  switch (f.kind()) {
    case Formula::Kind::True:
      out += "true";
      return;
    case Formula::Kind::False:
      out += "false";
      return;
    case Formula::Kind::Atom:
      out += atoms(f.constant(), f.value());
      return;
    case Formula::Kind::Not:
      out += "~";
      print(f.children().front(), out, atoms, true);
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      const char* sep = f.kind() == Formula::Kind::And ? " & " : " | ";
      if (parens) out += "(";
      bool first = true;
      for (const auto& c : f.children()) {
        if (!first) out += sep;
        first = false;
        print(c, out, atoms, true);
      }
      if (parens) out += ")";
      return;
    }
  }
}

}  // namespace

std::string Formula::to_string(
    const std::function<std::string(int, int)>& atom_printer) const {
  std::string out;
  print(*this, out, atom_printer, false);
  return out;
}

}  // namespace pbcmdp
