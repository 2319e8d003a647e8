#include "pbcmdp/lang.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace pbcmdp {

bool is_fluent(ConstantKind k) {
  return k == ConstantKind::RegularFluent || k == ConstantKind::StaticFluent;
}

const char* kind_name(ConstantKind k) {
  switch (k) {
    case ConstantKind::RegularFluent: return "fluent";
    case ConstantKind::StaticFluent: return "fluent static";
    case ConstantKind::Action: return "action";
    case ConstantKind::Pf: return "pf";
    case ConstantKind::InitPf: return "initpf";
  }
  return "?";
}

// --------------------------------------------------------------------------
// Fml
// --------------------------------------------------------------------------

Fml Fml::top() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::True;
  static Fml f{std::move(n)};
  return f;
}

Fml Fml::bottom() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::False;
  static Fml f{std::move(n)};
  return f;
}

Fml Fml::atom(AtomTemplate a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Atom;
  n->atom = std::move(a);
  return Fml{std::move(n)};
}

Fml Fml::negate(Fml f) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Not;
  n->children.push_back(std::move(f));
  return Fml{std::move(n)};
}

Fml Fml::conj(std::vector<Fml> parts) {
  if (parts.empty()) return top();
  if (parts.size() == 1) return parts.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  n->children = std::move(parts);
  return Fml{std::move(n)};
}

Fml Fml::disj(std::vector<Fml> parts) {
  if (parts.empty()) return bottom();
  if (parts.size() == 1) return parts.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::Or;
  n->children = std::move(parts);
  return Fml{std::move(n)};
}

Fml Fml::conj2(Fml a, Fml b) {
  std::vector<Fml> parts;
  parts.push_back(std::move(a));
  parts.push_back(std::move(b));
  return conj(std::move(parts));
}

std::size_t Fml::node_count() const {
  std::size_t n = 1;
  for (const auto& c : node_->children) n += c.node_count();
  return n;
}

bool Fml::operator==(const Fml& o) const {
  if (node_ == o.node_) return true;
  if (node_->kind != o.node_->kind) return false;
  if (node_->kind == Kind::Atom) return node_->atom == o.node_->atom;
  if (node_->children.size() != o.node_->children.size()) return false;
  for (std::size_t i = 0; i < node_->children.size(); ++i)
    if (!(node_->children[i] == o.node_->children[i])) return false;
  return true;
}

namespace {

Term substitute_term(const Term& t,
                     const std::map<std::string, std::string>& binding) {
  if (!t.is_variable) return t;
  auto it = binding.find(t.text);
  if (it == binding.end()) return t;
  return Term::object(it->second);
}

}  // namespace

Fml Fml::substitute(const std::map<std::string, std::string>& binding) const {
  switch (node_->kind) {
    case Kind::True:
    case Kind::False:
      return *this;
    case Kind::Atom: {
      AtomTemplate a = node_->atom;
      for (auto& arg : a.args) arg = substitute_term(arg, binding);
      a.value = substitute_term(a.value, binding);
      return atom(std::move(a));
    }
    case Kind::Not:
      return negate(node_->children.front().substitute(binding));
    case Kind::And:
    case Kind::Or: {
      std::vector<Fml> parts;
      parts.reserve(node_->children.size());
      for (const auto& c : node_->children) parts.push_back(c.substitute(binding));
      auto n = std::make_shared<Node>();
      n->kind = node_->kind;
      n->children = std::move(parts);
      return Fml{std::move(n)};
    }
  }
  return *this;
}

void Fml::collect_variables(std::vector<std::string>& out) const {
  for_each_atom([&](const AtomTemplate& a) {
    for (const auto& arg : a.args)
      if (arg.is_variable) out.push_back(arg.text);
    if (a.value.is_variable) out.push_back(a.value.text);
  });
}

void Fml::for_each_atom(
    const std::function<void(const AtomTemplate&)>& fn) const {
  switch (node_->kind) {
    case Kind::Atom:
      fn(node_->atom);
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

// --------------------------------------------------------------------------
// ActionDescription
// --------------------------------------------------------------------------

const Sort* ActionDescription::find_sort(const std::string& name) const {
  for (const auto& s : sorts)
    if (s.name == name) return &s;
  return nullptr;
}

const ConstantSchema* ActionDescription::find_constant(
    const std::string& name) const {
  for (const auto& c : constants)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

void collect_law_variables(const CausalLaw& law, std::vector<std::string>& out) {
  law.head.collect_variables(out);
  law.cond.collect_variables(out);
  law.after.collect_variables(out);
  for (const auto& arg : law.pf_constant.args)
    if (arg.is_variable) out.push_back(arg.text);
  for (const auto& g : law.guards) {
    if (g.lhs.is_variable) out.push_back(g.lhs.text);
    if (g.rhs.is_variable) out.push_back(g.rhs.text);
  }
}

}  // namespace

bool ActionDescription::is_ground() const {
  for (const auto& law : laws) {
    if (law.kind == LawKind::NoConcurrency) return false;
    std::vector<std::string> vars;
    collect_law_variables(law, vars);
    if (!vars.empty()) return false;
  }
  return true;
}

// --------------------------------------------------------------------------
// Grounding
// --------------------------------------------------------------------------

namespace {

std::string ground_constant_name(const std::string& base,
                                 const std::vector<std::string>& args) {
  if (args.empty()) return base;
  std::string out = base + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += args[i];
  }
  out += ")";
  return out;
}

std::vector<std::string> resolved_domain(const ActionDescription& d,
                                         const DomainSpec& spec) {
  switch (spec.tag) {
    case DomainSpec::Tag::Boolean:
      return {"false", "true"};
    case DomainSpec::Tag::SortRef: {
      const Sort* s = d.find_sort(spec.sort);
      if (!s) throw GroundingError("unknown sort in domain: " + spec.sort);
      return s->objects;
    }
    case DomainSpec::Tag::Explicit:
      return spec.values;
  }
  return {};
}

/// Ground action constant references in declaration/tuple order.
std::vector<AtomTemplate> ground_action_atoms(const ActionDescription& d) {
  std::vector<AtomTemplate> atoms;
  for (const auto& schema : d.constants) {
    if (schema.kind != ConstantKind::Action) continue;
    std::vector<std::vector<std::string>> pools;
    for (const auto& s : schema.arg_sorts) {
      const Sort* sort = d.find_sort(s);
      if (!sort) throw GroundingError("unknown sort " + s);
      pools.push_back(sort->objects);
    }
    std::vector<std::size_t> idx(pools.size(), 0);
    while (true) {
      AtomTemplate a;
      a.constant = schema.name;
      for (std::size_t i = 0; i < pools.size(); ++i)
        a.args.push_back(Term::object(pools[i][idx[i]]));
      a.value = Term::object("true");
      atoms.push_back(std::move(a));
      std::size_t i = pools.size();
      bool done = true;
      while (i > 0) {
        --i;
        if (++idx[i] < pools[i].size()) {
          done = false;
          break;
        }
        idx[i] = 0;
      }
      if (done) break;
    }
  }
  return atoms;
}

}  // namespace

ActionDescription ground_schematics(const ActionDescription& d) {
  ActionDescription out;
  out.sorts = d.sorts;
  out.constants = d.constants;
  // The output is variable-free, so no variable table survives.

  for (const auto& law : d.laws) {
    if (law.kind == LawKind::NoConcurrency) {
      const auto actions = ground_action_atoms(d);
      for (std::size_t i = 0; i < actions.size(); ++i) {
        for (std::size_t j = i + 1; j < actions.size(); ++j) {
          CausalLaw pair;
          pair.kind = LawKind::Dynamic;
          pair.head = Fml::bottom();
          pair.cond = Fml::top();
          pair.after = Fml::conj2(Fml::atom(actions[i]), Fml::atom(actions[j]));
          pair.source_line = law.source_line;
          out.laws.push_back(std::move(pair));
        }
      }
      continue;
    }

    std::vector<std::string> vars;
    collect_law_variables(law, vars);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());

    if (vars.empty()) {
      out.laws.push_back(law);
      continue;
    }

    std::vector<std::vector<std::string>> pools;
    for (const auto& v : vars) {
      auto it = d.variables.find(v);
      if (it == d.variables.end())
        throw GroundingError("unbound variable '" + v + "' in law at line " +
                             std::to_string(law.source_line));
      const Sort* sort = d.find_sort(it->second);
      if (!sort && it->second == "boolean") {
        pools.push_back({"false", "true"});
        continue;
      }
      if (!sort)
        throw GroundingError("variable '" + v + "' has unknown sort '" +
                             it->second + "'");
      pools.push_back(sort->objects);
    }

    std::vector<std::size_t> idx(vars.size(), 0);
    while (true) {
      std::map<std::string, std::string> binding;
      for (std::size_t i = 0; i < vars.size(); ++i)
        binding[vars[i]] = pools[i][idx[i]];

      bool guards_ok = true;
      for (const auto& g : law.guards) {
        const Term l = substitute_term(g.lhs, binding);
        const Term r = substitute_term(g.rhs, binding);
        if (l.text == r.text) {
          guards_ok = false;
          break;
        }
      }
      if (guards_ok) {
        CausalLaw ground = law;
        ground.head = law.head.substitute(binding);
        ground.cond = law.cond.substitute(binding);
        ground.after = law.after.substitute(binding);
        for (auto& arg : ground.pf_constant.args)
          arg = substitute_term(arg, binding);
        ground.guards.clear();
        out.laws.push_back(std::move(ground));
      }

      std::size_t i = vars.size();
      bool done = true;
      while (i > 0) {
        --i;
        if (++idx[i] < pools[i].size()) {
          done = false;
          break;
        }
        idx[i] = 0;
      }
      if (done) break;
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// Validation
// --------------------------------------------------------------------------

namespace {

struct Validator {
  const ActionDescription& d;
  std::vector<Violation>& out;
  int law_index = -1;

  void report(const std::string& msg) { out.push_back({law_index, msg}); }

  const ConstantSchema* schema_for(const AtomTemplate& a) {
    const ConstantSchema* s = d.find_constant(a.constant);
    if (!s) {
      report("atom references undeclared constant '" + a.constant + "'");
      return nullptr;
    }
    if (s->arg_sorts.size() != a.args.size()) {
      report("constant '" + a.constant + "' expects " +
             std::to_string(s->arg_sorts.size()) + " argument(s), got " +
             std::to_string(a.args.size()));
      return nullptr;
    }
    return s;
  }

  void check_term(const Term& t, const std::string& expected_sort) {
    if (t.is_variable) {
      auto it = d.variables.find(t.text);
      if (it == d.variables.end()) {
        report("undeclared variable '" + t.text + "'");
      } else if (it->second != expected_sort) {
        report("variable '" + t.text + "' of sort '" + it->second +
               "' used where sort '" + expected_sort + "' is expected");
      }
      return;
    }
    if (expected_sort == "boolean") {
      if (t.text != "true" && t.text != "false")
        report("'" + t.text + "' is not a boolean value");
      return;
    }
    const Sort* s = d.find_sort(expected_sort);
    if (s && std::find(s->objects.begin(), s->objects.end(), t.text) ==
                 s->objects.end())
      report("object '" + t.text + "' is not in sort '" + expected_sort + "'");
  }

  void check_value(const AtomTemplate& a, const ConstantSchema& s) {
    if (a.value.is_variable) {
      auto it = d.variables.find(a.value.text);
      if (it == d.variables.end())
        report("undeclared variable '" + a.value.text + "'");
      else if (s.domain.tag == DomainSpec::Tag::SortRef &&
               it->second != s.domain.sort)
        report("value variable '" + a.value.text + "' does not range over '" +
               s.domain.sort + "'");
      else if (s.domain.tag == DomainSpec::Tag::Boolean &&
               it->second != "boolean")
        report("value variable '" + a.value.text + "' is not boolean");
      return;
    }
    const auto domain = resolved_domain(d, s.domain);
    if (std::find(domain.begin(), domain.end(), a.value.text) == domain.end())
      report("value '" + a.value.text + "' is not in the domain of '" +
             a.constant + "'");
  }

  void check_atoms(const Fml& f) {
    f.for_each_atom([&](const AtomTemplate& a) {
      const ConstantSchema* s = schema_for(a);
      if (!s) return;
      for (std::size_t i = 0; i < a.args.size(); ++i)
        check_term(a.args[i], s->arg_sorts[i]);
      check_value(a, *s);
    });
  }

  bool only_kinds(const Fml& f, std::initializer_list<ConstantKind> kinds,
                  const char* where, const char* what) {
    bool ok = true;
    f.for_each_atom([&](const AtomTemplate& a) {
      const ConstantSchema* s = d.find_constant(a.constant);
      if (!s) return;  // reported elsewhere
      if (std::find(kinds.begin(), kinds.end(), s->kind) == kinds.end()) {
        report(std::string(where) + " mentions " + kind_name(s->kind) +
               " constant '" + a.constant + "' but must contain " + what);
        ok = false;
      }
    });
    return ok;
  }

  bool mentions_kind(const Fml& f, ConstantKind k) {
    bool found = false;
    f.for_each_atom([&](const AtomTemplate& a) {
      const ConstantSchema* s = d.find_constant(a.constant);
      if (s && s->kind == k) found = true;
    });
    return found;
  }
};

constexpr ConstantKind kRegular = ConstantKind::RegularFluent;
constexpr ConstantKind kStatic = ConstantKind::StaticFluent;
constexpr ConstantKind kAction = ConstantKind::Action;
constexpr ConstantKind kPf = ConstantKind::Pf;
constexpr ConstantKind kInitPf = ConstantKind::InitPf;

}  // namespace

std::vector<Violation> validate(const ActionDescription& d) {
  std::vector<Violation> out;
  Validator v{d, out};

  for (const auto& s : d.sorts) {
    if (s.objects.empty()) v.report("sort '" + s.name + "' has no objects");
    std::set<std::string> seen(s.objects.begin(), s.objects.end());
    if (seen.size() != s.objects.size())
      v.report("sort '" + s.name + "' has duplicate objects");
  }

  std::set<std::string> const_names;
  for (const auto& c : d.constants) {
    if (!const_names.insert(c.name).second)
      v.report("constant '" + c.name + "' declared twice");
    if (c.kind == kAction && c.domain.tag != DomainSpec::Tag::Boolean)
      v.report("action constant '" + c.name + "' must be boolean");
    for (const auto& s : c.arg_sorts)
      if (!d.find_sort(s))
        v.report("constant '" + c.name + "' uses unknown sort '" + s + "'");
    if (c.domain.tag == DomainSpec::Tag::SortRef && !d.find_sort(c.domain.sort))
      v.report("constant '" + c.name + "' has unknown domain sort '" +
               c.domain.sort + "'");
    if (c.domain.tag == DomainSpec::Tag::Explicit) {
      if (c.domain.values.empty())
        v.report("constant '" + c.name + "' has an empty domain");
      std::set<std::string> vals(c.domain.values.begin(), c.domain.values.end());
      if (vals.size() != c.domain.values.size())
        v.report("constant '" + c.name + "' has duplicate domain values");
    }
  }

  for (const auto& [name, sort] : d.variables) {
    if (sort != "boolean" && !d.find_sort(sort))
      v.report("variable '" + name + "' has unknown sort '" + sort + "'");
  }

  // Track pf/initpf declarations. Keyed by the ground constant name when the
  // declaration is variable-free; schematic declarations are counted after
  // grounding by re-validation.
  std::map<std::string, int> pf_decl_count;

  for (std::size_t i = 0; i < d.laws.size(); ++i) {
    const CausalLaw& law = d.laws[i];
    v.law_index = static_cast<int>(i);
    switch (law.kind) {
      case LawKind::Static:
        v.check_atoms(law.head);
        v.check_atoms(law.cond);
        v.only_kinds(law.head, {kRegular, kStatic}, "static law head",
                     "fluent constants only");
        v.only_kinds(law.cond, {kRegular, kStatic}, "static law condition",
                     "fluent constants only");
        break;
      case LawKind::Dynamic:
        v.check_atoms(law.head);
        v.check_atoms(law.cond);
        v.check_atoms(law.after);
        v.only_kinds(law.head, {kRegular}, "dynamic law head",
                     "regular fluent constants only");
        v.only_kinds(law.cond, {kRegular, kStatic}, "dynamic law condition",
                     "fluent constants only");
        if (v.mentions_kind(law.after, kInitPf))
          v.report("dynamic law after-part mentions an initpf constant");
        v.only_kinds(law.after, {kRegular, kStatic, kAction, kPf},
                     "dynamic law after-part",
                     "fluent, action, and pf constants only");
        break;
      case LawKind::PfDecl:
      case LawKind::InitPfDecl: {
        const ConstantKind want = law.kind == LawKind::PfDecl ? kPf : kInitPf;
        const ConstantSchema* s = v.schema_for(law.pf_constant);
        if (s) {
          if (s->kind != want)
            v.report("distribution declared for non-" +
                     std::string(kind_name(want)) + " constant '" + s->name +
                     "'");
          for (std::size_t a = 0; a < law.pf_constant.args.size(); ++a)
            v.check_term(law.pf_constant.args[a], s->arg_sorts[a]);

          const auto domain = resolved_domain(d, s->domain);
          std::set<std::string> covered;
          double sum = 0.0;
          for (const auto& [value, p] : law.pf_dist) {
            if (std::find(domain.begin(), domain.end(), value) == domain.end())
              v.report("distribution value '" + value +
                       "' is not in the domain of '" + s->name + "'");
            if (!covered.insert(value).second)
              v.report("distribution assigns '" + value + "' twice");
            if (!(p > 0.0 && p < 1.0))
              v.report("probability " + std::to_string(p) +
                       " not in (0,1) for '" + s->name + "'");
            sum += p;
          }
          if (covered.size() == law.pf_dist.size() &&
              covered.size() != domain.size())
            v.report("distribution for '" + s->name +
                     "' does not cover its whole domain");
          if (std::fabs(sum - 1.0) > 1e-9)
            v.report("probabilities for '" + s->name + "' sum to " +
                     std::to_string(sum) + ", expected 1");

          bool schematic = false;
          for (const auto& arg : law.pf_constant.args)
            if (arg.is_variable) schematic = true;
          if (!schematic) {
            std::vector<std::string> args;
            for (const auto& a : law.pf_constant.args) args.push_back(a.text);
            pf_decl_count[ground_constant_name(s->name, args)]++;
          }
        }
        break;
      }
      case LawKind::InitialStatic:
        v.check_atoms(law.head);
        v.check_atoms(law.cond);
        v.only_kinds(law.head, {kRegular, kStatic}, "initial law head",
                     "fluent constants only");
        v.only_kinds(law.cond, {kRegular, kStatic, kInitPf},
                     "initial law condition",
                     "fluent and initpf constants only");
        break;
      case LawKind::Utility:
        v.check_atoms(law.head);
        v.check_atoms(law.cond);
        v.only_kinds(law.head, {kRegular, kStatic}, "utility law head",
                     "fluent constants only");
        v.only_kinds(law.cond, {kRegular, kStatic, kAction},
                     "utility law after-part",
                     "fluent and action constants only");
        break;
      case LawKind::NoConcurrency:
        break;
    }
    for (const auto& g : law.guards) {
      for (const Term* t : {&g.lhs, &g.rhs}) {
        if (t->is_variable && !d.variables.count(t->text))
          v.report("undeclared variable '" + t->text + "' in guard");
      }
    }
  }

  v.law_index = -1;
  for (const auto& [name, count] : pf_decl_count) {
    if (count > 1)
      v.report("constant '" + name + "' has " + std::to_string(count) +
               " distribution declarations");
  }
  if (d.is_ground()) {
    // Every ground pf/initpf constant needs exactly one declaration.
    for (const auto& c : d.constants) {
      if (c.kind != kPf && c.kind != kInitPf) continue;
      std::vector<std::vector<std::string>> pools;
      bool sorts_ok = true;
      for (const auto& s : c.arg_sorts) {
        const Sort* sort = d.find_sort(s);
        if (!sort) {
          sorts_ok = false;
          break;
        }
        pools.push_back(sort->objects);
      }
      if (!sorts_ok) continue;
      std::vector<std::size_t> idx(pools.size(), 0);
      while (true) {
        std::vector<std::string> args;
        for (std::size_t i = 0; i < pools.size(); ++i)
          args.push_back(pools[i][idx[i]]);
        const std::string name = ground_constant_name(c.name, args);
        if (pf_decl_count.find(name) == pf_decl_count.end())
          v.report("constant '" + name + "' has no distribution declaration");
        std::size_t i = pools.size();
        bool done = true;
        while (i > 0) {
          --i;
          if (++idx[i] < pools[i].size()) {
            done = false;
            break;
          }
          idx[i] = 0;
        }
        if (done) break;
      }
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// Compilation
// --------------------------------------------------------------------------

int GroundConstantDecl::value_index(const std::string& v) const {
  for (std::size_t i = 0; i < domain.size(); ++i)
    if (domain[i] == v) return static_cast<int>(i);
  return -1;
}

int CompiledDescription::constant_index(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

std::vector<int> CompiledDescription::constants_of_kind(ConstantKind k) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < constants_.size(); ++i)
    if (constants_[i].kind == k) out.push_back(static_cast<int>(i));
  return out;
}

std::string CompiledDescription::atom_name(int constant, int value) const {
  const auto& c = constants_[static_cast<std::size_t>(constant)];
  return c.name + "=" + c.domain[static_cast<std::size_t>(value)];
}

namespace {

Formula lower(const Fml& f, const CompiledDescription& cd,
              const ActionDescription& d) {
  switch (f.kind()) {
    case Fml::Kind::True:
      return Formula::top();
    case Fml::Kind::False:
      return Formula::bottom();
    case Fml::Kind::Atom: {
      const AtomTemplate& a = f.leaf();
      std::vector<std::string> args;
      for (const auto& t : a.args) args.push_back(t.text);
      const std::string name = ground_constant_name(a.constant, args);
      const int c = cd.constant_index(name);
      if (c < 0) throw GroundingError("unknown ground constant " + name);
      const int v = cd.constants()[static_cast<std::size_t>(c)].value_index(
          a.value.text);
      if (v < 0)
        throw GroundingError("value " + a.value.text + " not in domain of " +
                             name);
      (void)d;
      return Formula::atom(c, v);
    }
    case Fml::Kind::Not:
      return Formula::negate(lower(f.children().front(), cd, d));
    case Fml::Kind::And:
    case Fml::Kind::Or: {
      std::vector<Formula> parts;
      parts.reserve(f.children().size());
      for (const auto& c : f.children()) parts.push_back(lower(c, cd, d));
      return f.kind() == Fml::Kind::And ? Formula::conj(std::move(parts))
                                        : Formula::disj(std::move(parts));
    }
  }
  return Formula::top();
}

}  // namespace

CompiledDescription CompiledDescription::compile(const ActionDescription& d) {
  if (!d.is_ground())
    throw GroundingError("compile requires a ground description");

  CompiledDescription cd;
  for (const auto& schema : d.constants) {
    std::vector<std::vector<std::string>> pools;
    for (const auto& s : schema.arg_sorts) {
      const Sort* sort = d.find_sort(s);
      if (!sort) throw GroundingError("unknown sort " + s);
      pools.push_back(sort->objects);
    }
    const auto domain = resolved_domain(d, schema.domain);
    std::vector<std::size_t> idx(pools.size(), 0);
    while (true) {
      std::vector<std::string> args;
      for (std::size_t i = 0; i < pools.size(); ++i)
        args.push_back(pools[i][idx[i]]);
      GroundConstantDecl decl;
      decl.name = ground_constant_name(schema.name, args);
      decl.kind = schema.kind;
      decl.domain = domain;
      cd.index_[decl.name] = static_cast<int>(cd.constants_.size());
      cd.constants_.push_back(std::move(decl));
      std::size_t i = pools.size();
      bool done = true;
      while (i > 0) {
        --i;
        if (++idx[i] < pools[i].size()) {
          done = false;
          break;
        }
        idx[i] = 0;
      }
      if (done) break;
    }
  }

  for (std::size_t i = 0; i < d.laws.size(); ++i) {
    const CausalLaw& law = d.laws[i];
    CompiledLaw cl;
    cl.source_index = static_cast<int>(i);
    switch (law.kind) {
      case LawKind::Static:
        cl.kind = CompiledLawKind::Static;
        cl.head = lower(law.head, cd, d);
        cl.cond = lower(law.cond, cd, d);
        break;
      case LawKind::Dynamic:
        cl.kind = CompiledLawKind::Dynamic;
        cl.head = lower(law.head, cd, d);
        cl.cond = lower(law.cond, cd, d);
        cl.after = lower(law.after, cd, d);
        break;
      case LawKind::PfDecl:
      case LawKind::InitPfDecl: {
        cl.kind = law.kind == LawKind::PfDecl ? CompiledLawKind::PfDecl
                                              : CompiledLawKind::InitPfDecl;
        std::vector<std::string> args;
        for (const auto& t : law.pf_constant.args) args.push_back(t.text);
        const std::string name =
            ground_constant_name(law.pf_constant.constant, args);
        cl.pf_constant = cd.constant_index(name);
        if (cl.pf_constant < 0)
          throw GroundingError("unknown pf constant " + name);
        const auto& decl =
            cd.constants_[static_cast<std::size_t>(cl.pf_constant)];
        cl.pf_probs.assign(decl.domain.size(), 0.0);
        for (const auto& [value, p] : law.pf_dist) {
          const int vi = decl.value_index(value);
          if (vi < 0) throw GroundingError("bad distribution value " + value);
          cl.pf_probs[static_cast<std::size_t>(vi)] = p;
        }
        break;
      }
      case LawKind::InitialStatic:
        cl.kind = CompiledLawKind::InitialStatic;
        cl.head = lower(law.head, cd, d);
        cl.cond = lower(law.cond, cd, d);
        break;
      case LawKind::Utility:
        cl.kind = CompiledLawKind::Utility;
        cl.head = lower(law.head, cd, d);
        cl.cond = lower(law.cond, cd, d);
        cl.reward = law.reward;
        break;
      case LawKind::NoConcurrency:
        throw GroundingError("no-concurrency marker survived grounding");
    }
    cd.laws_.push_back(std::move(cl));
  }
  return cd;
}

}  // namespace pbcmdp
