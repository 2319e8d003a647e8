#include "pbcmdp/parser.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "pbcmdp/translator.hpp"

namespace pbcmdp {

namespace {

// --------------------------------------------------------------------------
// Lexer
// --------------------------------------------------------------------------

enum class Tok : unsigned char {
  Ident, Number,
  KwSort, KwVar, KwFluent, KwStatic, KwAction, KwPf, KwInitPf,
  KwCaused, KwIf, KwAfter, KwInitially, KwReward, KwDefault, KwInertial,
  KwConstraint, KwCauses, KwNoConcurrency, KwWhere, KwTrue, KwFalse, KwBoolean,
  LBrace, RBrace, LParen, RParen, Comma, Colon, Equals, Amp, Pipe, Tilde,
  Semicolon, Period, NotEquals, Minus,
  End, Error,
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::KwSort: return "'sort'";
    case Tok::KwVar: return "'var'";
    case Tok::KwFluent: return "'fluent'";
    case Tok::KwStatic: return "'static'";
    case Tok::KwAction: return "'action'";
    case Tok::KwPf: return "'pf'";
    case Tok::KwInitPf: return "'initpf'";
    case Tok::KwCaused: return "'caused'";
    case Tok::KwIf: return "'if'";
    case Tok::KwAfter: return "'after'";
    case Tok::KwInitially: return "'initially'";
    case Tok::KwReward: return "'reward'";
    case Tok::KwDefault: return "'default'";
    case Tok::KwInertial: return "'inertial'";
    case Tok::KwConstraint: return "'constraint'";
    case Tok::KwCauses: return "'causes'";
    case Tok::KwNoConcurrency: return "'noconcurrency'";
    case Tok::KwWhere: return "'where'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwBoolean: return "'boolean'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Equals: return "'='";
    case Tok::Amp: return "'&'";
    case Tok::Pipe: return "'|'";
    case Tok::Tilde: return "'~'";
    case Tok::Semicolon: return "';'";
    case Tok::Period: return "'.'";
    case Tok::NotEquals: return "'!='";
    case Tok::Minus: return "'-'";
    case Tok::End: return "end of input";
    case Tok::Error: return "invalid token";
  }
  return "?";
}

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  SourceSpan span;
};

std::vector<Token> tokenize(const std::string& src) {
  static const std::map<std::string, Tok> keywords = {
      {"sort", Tok::KwSort},       {"var", Tok::KwVar},
      {"fluent", Tok::KwFluent},   {"static", Tok::KwStatic},
      {"action", Tok::KwAction},   {"pf", Tok::KwPf},
      {"initpf", Tok::KwInitPf},   {"caused", Tok::KwCaused},
      {"if", Tok::KwIf},           {"after", Tok::KwAfter},
      {"initially", Tok::KwInitially}, {"reward", Tok::KwReward},
      {"default", Tok::KwDefault}, {"inertial", Tok::KwInertial},
      {"constraint", Tok::KwConstraint}, {"causes", Tok::KwCauses},
      {"noconcurrency", Tok::KwNoConcurrency}, {"where", Tok::KwWhere},
      {"true", Tok::KwTrue},       {"false", Tok::KwFalse},
      {"boolean", Tok::KwBoolean},
  };

  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };

  while (i < src.size()) {
    const char c = src[i];
    if (c == '%') {  // comment to end of line
      std::size_t j = i;
      while (j < src.size() && src[j] != '\n') ++j;
      advance(j - i);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }

    Token t;
    t.span = {line, col, i, i + 1};

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) ||
              src[j] == '_' || src[j] == '\''))
        ++j;
      t.text = src.substr(i, j - i);
      auto kw = keywords.find(t.text);
      t.kind = kw == keywords.end() ? Tok::Ident : kw->second;
      t.span.end = j;
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      if (j < src.size() && src[j] == '.' && j + 1 < src.size() &&
          std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[j])))
          ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          ++k;
          while (k < src.size() &&
                 std::isdigit(static_cast<unsigned char>(src[k])))
            ++k;
          j = k;
        }
      }
      t.kind = Tok::Number;
      t.text = src.substr(i, j - i);
      t.number = std::strtod(t.text.c_str(), nullptr);
      t.span.end = j;
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }

    auto sym = [&](Tok k, std::size_t len) {
      t.kind = k;
      t.text = src.substr(i, len);
      t.span.end = i + len;
      advance(len);
      out.push_back(t);
    };
    switch (c) {
      case '{': sym(Tok::LBrace, 1); break;
      case '}': sym(Tok::RBrace, 1); break;
      case '(': sym(Tok::LParen, 1); break;
      case ')': sym(Tok::RParen, 1); break;
      case ',': sym(Tok::Comma, 1); break;
      case ':': sym(Tok::Colon, 1); break;
      case '=': sym(Tok::Equals, 1); break;
      case '&': sym(Tok::Amp, 1); break;
      case '|': sym(Tok::Pipe, 1); break;
      case '~': sym(Tok::Tilde, 1); break;
      case ';': sym(Tok::Semicolon, 1); break;
      case '.': sym(Tok::Period, 1); break;
      case '-': sym(Tok::Minus, 1); break;
      case '!':
        if (i + 1 < src.size() && src[i + 1] == '=') {
          sym(Tok::NotEquals, 2);
        } else {
          sym(Tok::Error, 1);
        }
        break;
      default:
        sym(Tok::Error, 1);
        break;
    }
  }
  Token end;
  end.kind = Tok::End;
  // Anchor the end-of-input span on the last byte so error spans always
  // point inside the text.
  const std::size_t anchor = src.empty() ? 0 : src.size() - 1;
  end.span = {line, col, anchor, src.size()};
  out.push_back(end);
  return out;
}

// --------------------------------------------------------------------------
// Parser
// --------------------------------------------------------------------------

struct ParseFailure {
  ParseError error;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : tokens_(tokenize(text)) {}

  ActionDescription parse_program() {
    ActionDescription d;
    while (peek().kind != Tok::End) {
      parse_statement(d);
      while (peek().kind == Tok::Period || peek().kind == Tok::Semicolon)
        next();
    }
    return d;
  }

  Fml parse_single_formula(ActionDescription& scope) {
    desc_ = &scope;
    Fml f = parse_formula().fml;
    expect(Tok::End, "end of formula");
    return f;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  ActionDescription* desc_ = nullptr;

  const Token& peek(std::size_t off = 0) const {
    return tokens_[std::min(pos_ + off, tokens_.size() - 1)];
  }
  const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  [[noreturn]] void fail(const Token& at, std::string msg,
                         std::vector<std::string> expected = {}) {
    throw ParseFailure{ParseError{at.span, std::move(msg), std::move(expected)}};
  }

  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k)
      fail(peek(), std::string("expected ") + what + ", found " +
                       tok_name(peek().kind),
           {tok_name(k)});
    return next();
  }

  std::string expect_ident(const char* what) {
    if (peek().kind != Tok::Ident)
      fail(peek(), std::string("expected ") + what + ", found " +
                       tok_name(peek().kind),
           {"identifier"});
    return next().text;
  }

  bool accept(Tok k) {
    if (peek().kind == k) {
      next();
      return true;
    }
    return false;
  }

  // --- declarations -------------------------------------------------------

  void parse_statement(ActionDescription& d) {
    desc_ = &d;
    switch (peek().kind) {
      case Tok::KwSort: parse_sort(d); return;
      case Tok::KwVar: parse_var(d); return;
      case Tok::KwFluent:
      case Tok::KwAction:
      case Tok::KwPf:
      case Tok::KwInitPf: parse_constants(d); return;
      case Tok::KwCaused: parse_caused(d); return;
      case Tok::KwInitially: parse_initially(d); return;
      case Tok::KwReward: parse_reward(d); return;
      case Tok::KwDefault: parse_default(d); return;
      case Tok::KwInertial: parse_inertial(d); return;
      case Tok::KwConstraint: parse_constraint(d); return;
      case Tok::KwNoConcurrency: {
        CausalLaw law;
        law.kind = LawKind::NoConcurrency;
        law.source_line = peek().span.line;
        next();
        d.laws.push_back(std::move(law));
        return;
      }
      default: parse_causes(d); return;
    }
  }

  void parse_sort(ActionDescription& d) {
    next();
    Sort s;
    s.name = expect_ident("sort name");
    expect(Tok::LBrace, "'{'");
    s.objects.push_back(parse_object_name());
    while (accept(Tok::Comma)) s.objects.push_back(parse_object_name());
    expect(Tok::RBrace, "'}'");
    d.sorts.push_back(std::move(s));
  }

  std::string parse_object_name() {
    if (peek().kind == Tok::KwTrue || peek().kind == Tok::KwFalse)
      return next().text;
    return expect_ident("object name");
  }

  void parse_var(ActionDescription& d) {
    next();
    std::vector<std::string> names;
    names.push_back(expect_ident("variable name"));
    while (accept(Tok::Comma)) names.push_back(expect_ident("variable name"));
    expect(Tok::Colon, "':'");
    std::string sort;
    if (peek().kind == Tok::KwBoolean) {
      next();
      sort = "boolean";
    } else {
      sort = expect_ident("sort name");
    }
    for (auto& n : names) d.variables[n] = sort;
  }

  void parse_constants(ActionDescription& d) {
    ConstantKind kind = ConstantKind::RegularFluent;
    switch (next().kind) {
      case Tok::KwFluent:
        kind = accept(Tok::KwStatic) ? ConstantKind::StaticFluent
                                     : ConstantKind::RegularFluent;
        break;
      case Tok::KwAction: kind = ConstantKind::Action; break;
      case Tok::KwPf: kind = ConstantKind::Pf; break;
      case Tok::KwInitPf: kind = ConstantKind::InitPf; break;
      default: break;
    }
    struct Item {
      ConstantSchema schema;
      bool explicit_domain = false;
    };
    std::vector<Item> items;
    do {
      Item item;
      item.schema.kind = kind;
      item.schema.name = expect_ident("constant name");
      if (accept(Tok::LParen)) {
        item.schema.arg_sorts.push_back(expect_ident("sort name"));
        while (accept(Tok::Comma))
          item.schema.arg_sorts.push_back(expect_ident("sort name"));
        expect(Tok::RParen, "')'");
      }
      if (accept(Tok::Colon)) {
        item.explicit_domain = true;
        item.schema.domain = parse_domain();
      }
      items.push_back(std::move(item));
    } while (accept(Tok::Comma));

    // A trailing domain annotation covers earlier items without their own.
    if (items.size() > 1 && items.back().explicit_domain) {
      bool others_plain = true;
      for (std::size_t i = 0; i + 1 < items.size(); ++i)
        if (items[i].explicit_domain) others_plain = false;
      if (others_plain) {
        for (std::size_t i = 0; i + 1 < items.size(); ++i)
          items[i].schema.domain = items.back().schema.domain;
      }
    }
    for (auto& item : items) d.constants.push_back(std::move(item.schema));
  }

  DomainSpec parse_domain() {
    DomainSpec spec;
    if (accept(Tok::KwBoolean)) {
      spec.tag = DomainSpec::Tag::Boolean;
      return spec;
    }
    if (accept(Tok::LBrace)) {
      spec.tag = DomainSpec::Tag::Explicit;
      spec.values.push_back(parse_object_name());
      while (accept(Tok::Comma)) spec.values.push_back(parse_object_name());
      expect(Tok::RBrace, "'}'");
      return spec;
    }
    spec.tag = DomainSpec::Tag::SortRef;
    spec.sort = expect_ident("domain (sort name, 'boolean', or '{...}')");
    return spec;
  }

  // --- terms and formulas -------------------------------------------------

  Term parse_term() {
    if (peek().kind == Tok::KwTrue || peek().kind == Tok::KwFalse)
      return Term::object(next().text);
    const std::string name = expect_ident("object or variable");
    if (desc_ && desc_->variables.count(name)) return Term::variable(name);
    return Term::object(name);
  }

  struct ParsedFml {
    Fml fml;
    bool bare_atom = false;  // atom written without '=' (eligible for ~ sugar)
  };

  ParsedFml parse_formula() {
    ParsedFml lhs = parse_and();
    if (peek().kind != Tok::Pipe) return lhs;
    std::vector<Fml> parts{lhs.fml};
    while (accept(Tok::Pipe)) parts.push_back(parse_and().fml);
    return {Fml::disj(std::move(parts)), false};
  }

  ParsedFml parse_and() {
    ParsedFml lhs = parse_unary();
    if (peek().kind != Tok::Amp) return lhs;
    std::vector<Fml> parts{lhs.fml};
    while (accept(Tok::Amp)) parts.push_back(parse_unary().fml);
    return {Fml::conj(std::move(parts)), false};
  }

  ParsedFml parse_unary() {
    if (accept(Tok::Tilde)) {
      ParsedFml inner = parse_unary();
      if (inner.bare_atom) {
        // ~c abbreviates c=false.
        AtomTemplate a = inner.fml.leaf();
        a.value = Term::object("false");
        return {Fml::atom(std::move(a)), false};
      }
      return {Fml::negate(inner.fml), false};
    }
    return parse_primary();
  }

  ParsedFml parse_primary() {
    switch (peek().kind) {
      case Tok::KwTrue: next(); return {Fml::top(), false};
      case Tok::KwFalse: next(); return {Fml::bottom(), false};
      case Tok::LParen: {
        next();
        ParsedFml f = parse_formula();
        expect(Tok::RParen, "')'");
        return {f.fml, false};
      }
      case Tok::Ident: {
        AtomTemplate a;
        a.constant = next().text;
        if (accept(Tok::LParen)) {
          a.args.push_back(parse_term());
          while (accept(Tok::Comma)) a.args.push_back(parse_term());
          expect(Tok::RParen, "')'");
        }
        if (accept(Tok::Equals)) {
          a.value = parse_term();
          return {Fml::atom(std::move(a)), false};
        }
        a.value = Term::object("true");
        return {Fml::atom(std::move(a)), true};
      }
      default:
        fail(peek(), std::string("expected a formula, found ") +
                         tok_name(peek().kind),
             {"identifier", "'true'", "'false'", "'('", "'~'"});
    }
  }

  // --- laws -----------------------------------------------------------------

  std::vector<InequalityGuard> parse_where() {
    std::vector<InequalityGuard> guards;
    if (!accept(Tok::KwWhere)) return guards;
    do {
      InequalityGuard g;
      g.lhs = parse_term();
      expect(Tok::NotEquals, "'!='");
      g.rhs = parse_term();
      guards.push_back(std::move(g));
    } while (accept(Tok::Comma));
    return guards;
  }

  void parse_caused(ActionDescription& d) {
    const int line = peek().span.line;
    next();

    if (peek().kind == Tok::LBrace) {  // caused { F } if G after H
      next();
      Fml head = parse_formula().fml;
      expect(Tok::RBrace, "'}'");
      Fml cond = accept(Tok::KwIf) ? parse_formula().fml : Fml::top();
      const bool dynamic = peek().kind == Tok::KwAfter;
      Fml after = accept(Tok::KwAfter) ? parse_formula().fml : Fml::top();
      CausalLaw law;
      law.kind = dynamic ? LawKind::Dynamic : LawKind::Static;
      law.head = head;
      law.cond = Fml::conj2(cond, Fml::negate(Fml::negate(head)));
      law.after = after;
      law.guards = parse_where();
      law.source_line = line;
      d.laws.push_back(std::move(law));
      return;
    }

    // Distribution declaration: caused c = { v1 : p1, ... }
    if (peek().kind == Tok::Ident) {
      const std::size_t mark = pos_;
      AtomTemplate constant;
      constant.constant = next().text;
      bool args_ok = true;
      if (accept(Tok::LParen)) {
        while (peek().kind != Tok::RParen && peek().kind != Tok::End) {
          if (peek().kind == Tok::Ident || peek().kind == Tok::KwTrue ||
              peek().kind == Tok::KwFalse) {
            constant.args.push_back(parse_term());
            if (!accept(Tok::Comma)) break;
          } else {
            args_ok = false;
            break;
          }
        }
        if (args_ok && !accept(Tok::RParen)) args_ok = false;
      }
      if (args_ok && peek().kind == Tok::Equals &&
          peek(1).kind == Tok::LBrace) {
        next();  // =
        next();  // {
        CausalLaw law;
        const ConstantSchema* schema = d.find_constant(constant.constant);
        law.kind = (schema && schema->kind == ConstantKind::InitPf)
                       ? LawKind::InitPfDecl
                       : LawKind::PfDecl;
        law.pf_constant = std::move(constant);
        do {
          const std::string value = parse_object_name();
          expect(Tok::Colon, "':'");
          const Token& num = peek();
          if (num.kind != Tok::Number)
            fail(num, "expected a probability", {"number"});
          next();
          law.pf_dist.emplace_back(value, num.number);
        } while (accept(Tok::Comma));
        expect(Tok::RBrace, "'}'");
        law.guards = parse_where();
        law.source_line = line;
        d.laws.push_back(std::move(law));
        return;
      }
      pos_ = mark;  // plain law after all
    }

    Fml head = parse_formula().fml;
    Fml cond = accept(Tok::KwIf) ? parse_formula().fml : Fml::top();
    CausalLaw law;
    if (accept(Tok::KwAfter)) {
      law.kind = LawKind::Dynamic;
      law.after = parse_formula().fml;
    } else {
      law.kind = LawKind::Static;
    }
    law.head = std::move(head);
    law.cond = std::move(cond);
    law.guards = parse_where();
    law.source_line = line;
    d.laws.push_back(std::move(law));
  }

  void parse_initially(ActionDescription& d) {
    const int line = peek().span.line;
    next();
    CausalLaw law;
    law.kind = LawKind::InitialStatic;
    law.head = parse_formula().fml;
    law.cond = accept(Tok::KwIf) ? parse_formula().fml : Fml::top();
    law.guards = parse_where();
    law.source_line = line;
    d.laws.push_back(std::move(law));
  }

  void parse_reward(ActionDescription& d) {
    const int line = peek().span.line;
    next();
    double sign = 1.0;
    if (accept(Tok::Minus)) sign = -1.0;
    const Token& num = peek();
    if (num.kind != Tok::Number) fail(num, "expected a reward", {"number"});
    next();
    CausalLaw law;
    law.kind = LawKind::Utility;
    law.reward = sign * num.number;
    law.head = accept(Tok::KwIf) ? parse_formula().fml : Fml::top();
    law.cond = accept(Tok::KwAfter) ? parse_formula().fml : Fml::top();
    law.guards = parse_where();
    law.source_line = line;
    d.laws.push_back(std::move(law));
  }

  void parse_default(ActionDescription& d) {
    const int line = peek().span.line;
    next();
    Fml head = parse_formula().fml;
    CausalLaw law;
    law.kind = LawKind::Static;
    law.head = head;
    law.cond = Fml::negate(Fml::negate(head));
    law.guards = parse_where();
    law.source_line = line;
    d.laws.push_back(std::move(law));
  }

  void parse_inertial(ActionDescription& d) {
    const int line = peek().span.line;
    next();
    do {
      AtomTemplate ref;
      const Token& name_tok = peek();
      ref.constant = expect_ident("fluent constant");
      if (accept(Tok::LParen)) {
        ref.args.push_back(parse_term());
        while (accept(Tok::Comma)) ref.args.push_back(parse_term());
        expect(Tok::RParen, "')'");
      }
      const ConstantSchema* schema = d.find_constant(ref.constant);
      if (!schema)
        fail(name_tok,
             "'inertial' needs a previously declared fluent constant, got '" +
                 ref.constant + "'");
      std::vector<std::string> values;
      switch (schema->domain.tag) {
        case DomainSpec::Tag::Boolean:
          values = {"false", "true"};
          break;
        case DomainSpec::Tag::SortRef: {
          const Sort* s = d.find_sort(schema->domain.sort);
          if (!s)
            fail(name_tok, "domain sort '" + schema->domain.sort +
                               "' of '" + ref.constant + "' is not declared");
          values = s->objects;
          break;
        }
        case DomainSpec::Tag::Explicit:
          values = schema->domain.values;
          break;
      }
      for (const auto& v : values) {
        AtomTemplate a = ref;
        a.value = Term::object(v);
        CausalLaw law;
        law.kind = LawKind::Dynamic;
        law.head = Fml::atom(a);
        law.cond = Fml::negate(Fml::negate(Fml::atom(a)));
        law.after = Fml::atom(a);
        law.source_line = line;
        d.laws.push_back(std::move(law));
      }
    } while (accept(Tok::Comma));
  }

  void parse_constraint(ActionDescription& d) {
    const int line = peek().span.line;
    next();
    CausalLaw law;
    law.kind = LawKind::Static;
    law.head = Fml::bottom();
    law.cond = Fml::negate(parse_formula().fml);
    law.guards = parse_where();
    law.source_line = line;
    d.laws.push_back(std::move(law));
  }

  void parse_causes(ActionDescription& d) {
    const int line = peek().span.line;
    Fml trigger = parse_formula().fml;
    expect(Tok::KwCauses, "'causes'");
    Fml effect = parse_formula().fml;
    CausalLaw law;
    law.kind = LawKind::Dynamic;
    law.head = std::move(effect);
    law.cond = Fml::top();
    if (accept(Tok::KwIf)) {
      law.after = Fml::conj2(std::move(trigger), parse_formula().fml);
    } else {
      law.after = std::move(trigger);
    }
    law.guards = parse_where();
    law.source_line = line;
    d.laws.push_back(std::move(law));
  }
};

// --------------------------------------------------------------------------
// Formatting
// --------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_term(const Term& t) { return t.text; }

std::string format_atom(const AtomTemplate& a, const ActionDescription& d) {
  std::string base = a.constant;
  if (!a.args.empty()) {
    base += "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (i) base += ",";
      base += format_term(a.args[i]);
    }
    base += ")";
  }
  const ConstantSchema* s = d.find_constant(a.constant);
  const bool boolean = s && s->domain.tag == DomainSpec::Tag::Boolean;
  if (boolean && !a.value.is_variable) {
    if (a.value.text == "true") return base;
    if (a.value.text == "false") return "~" + base;
  }
  return base + " = " + format_term(a.value);
}

void format_fml(const Fml& f, const ActionDescription& d, std::string& out,
                bool parens) {
  switch (f.kind()) {
    case Fml::Kind::True: out += "true"; return;
    case Fml::Kind::False: out += "false"; return;
    case Fml::Kind::Atom: out += format_atom(f.leaf(), d); return;
    case Fml::Kind::Not:
      out += "~(";
      format_fml(f.children().front(), d, out, false);
      out += ")";
      return;
    case Fml::Kind::And:
    case Fml::Kind::Or: {
      const char* sep = f.kind() == Fml::Kind::And ? " & " : " | ";
      if (parens) out += "(";
      bool first = true;
      for (const auto& c : f.children()) {
        if (!first) out += sep;
        first = false;
        const bool need =
            c.kind() == Fml::Kind::And || c.kind() == Fml::Kind::Or;
        format_fml(c, d, out, need);
      }
      if (parens) out += ")";
      return;
    }
  }
}

std::string fml_str(const Fml& f, const ActionDescription& d) {
  std::string out;
  format_fml(f, d, out, false);
  return out;
}

bool is_top(const Fml& f) { return f.kind() == Fml::Kind::True; }

void format_guards(const CausalLaw& law, std::string& out) {
  if (law.guards.empty()) return;
  out += " where ";
  for (std::size_t i = 0; i < law.guards.size(); ++i) {
    if (i) out += ", ";
    out += format_term(law.guards[i].lhs) + " != " +
           format_term(law.guards[i].rhs);
  }
}

}  // namespace

std::string ParseError::to_string() const {
  std::ostringstream os;
  os << "parse error at " << span.line << ":" << span.column << ": " << message;
  return os.str();
}

ParseResult parse_description(const std::string& text) {
  ParseResult result;
  try {
    Parser p(text);
    result.description = p.parse_program();
  } catch (const ParseFailure& f) {
    result.error = f.error;
  }
  return result;
}

std::string format_description(const ActionDescription& d) {
  std::string out;
  for (const auto& s : d.sorts) {
    out += "sort " + s.name + " { ";
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
      if (i) out += ", ";
      out += s.objects[i];
    }
    out += " }\n";
  }
  for (const auto& [name, sort] : d.variables)
    out += "var " + name + " : " + sort + "\n";
  for (const auto& c : d.constants) {
    switch (c.kind) {
      case ConstantKind::RegularFluent: out += "fluent "; break;
      case ConstantKind::StaticFluent: out += "fluent static "; break;
      case ConstantKind::Action: out += "action "; break;
      case ConstantKind::Pf: out += "pf "; break;
      case ConstantKind::InitPf: out += "initpf "; break;
    }
    out += c.name;
    if (!c.arg_sorts.empty()) {
      out += "(";
      for (std::size_t i = 0; i < c.arg_sorts.size(); ++i) {
        if (i) out += ",";
        out += c.arg_sorts[i];
      }
      out += ")";
    }
    switch (c.domain.tag) {
      case DomainSpec::Tag::Boolean: break;
      case DomainSpec::Tag::SortRef: out += " : " + c.domain.sort; break;
      case DomainSpec::Tag::Explicit: {
        out += " : { ";
        for (std::size_t i = 0; i < c.domain.values.size(); ++i) {
          if (i) out += ", ";
          out += c.domain.values[i];
        }
        out += " }";
        break;
      }
    }
    out += "\n";
  }

  for (const auto& law : d.laws) {
    switch (law.kind) {
      case LawKind::Static:
        out += "caused " + fml_str(law.head, d);
        if (!is_top(law.cond)) out += " if " + fml_str(law.cond, d);
        break;
      case LawKind::Dynamic:
        out += "caused " + fml_str(law.head, d);
        if (!is_top(law.cond)) out += " if " + fml_str(law.cond, d);
        out += " after " + fml_str(law.after, d);
        break;
      case LawKind::PfDecl:
      case LawKind::InitPfDecl: {
        std::string name = law.pf_constant.constant;
        if (!law.pf_constant.args.empty()) {
          name += "(";
          for (std::size_t i = 0; i < law.pf_constant.args.size(); ++i) {
            if (i) name += ",";
            name += format_term(law.pf_constant.args[i]);
          }
          name += ")";
        }
        out += "caused " + name + " = { ";
        for (std::size_t i = 0; i < law.pf_dist.size(); ++i) {
          if (i) out += ", ";
          out += law.pf_dist[i].first + ": " +
                 format_double(law.pf_dist[i].second);
        }
        out += " }";
        break;
      }
      case LawKind::InitialStatic:
        out += "initially " + fml_str(law.head, d);
        if (!is_top(law.cond)) out += " if " + fml_str(law.cond, d);
        break;
      case LawKind::Utility:
        out += "reward " + format_double(law.reward);
        if (!is_top(law.head)) out += " if " + fml_str(law.head, d);
        if (!is_top(law.cond)) out += " after " + fml_str(law.cond, d);
        break;
      case LawKind::NoConcurrency:
        out += "noconcurrency";
        break;
    }
    format_guards(law, out);
    out += "\n";
  }
  return out;
}

// --------------------------------------------------------------------------
// Query / state formulas
// --------------------------------------------------------------------------

namespace {

struct AtomRef {
  bool has_step = false;
  int step = 0;
  std::string flat_name;  // Name(a,b)
  std::string value;
  SourceSpan span;
};

/// Resolver maps a surface atom reference to a ground Formula atom.
using AtomResolver = std::function<Formula(const AtomRef&)>;

class QueryParser {
 public:
  QueryParser(const std::string& text, AtomResolver resolve)
      : tokens_(tokenize(text)), resolve_(std::move(resolve)) {}

  Formula parse() {
    Formula f = parse_or();
    if (peek().kind != Tok::End)
      fail(peek(), std::string("unexpected ") + tok_name(peek().kind));
    return f;
  }

 private:
  std::vector<Token> tokens_;
  AtomResolver resolve_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t off = 0) const {
    return tokens_[std::min(pos_ + off, tokens_.size() - 1)];
  }
  const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }
  bool accept(Tok k) {
    if (peek().kind == k) {
      next();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const Token& at, std::string msg) {
    throw ParseFailure{ParseError{at.span, std::move(msg), {}}};
  }

  Formula parse_or() {
    std::vector<Formula> parts{parse_and()};
    while (accept(Tok::Pipe)) parts.push_back(parse_and());
    return Formula::disj(std::move(parts));
  }

  Formula parse_and() {
    std::vector<Formula> parts{parse_unary()};
    while (accept(Tok::Amp)) parts.push_back(parse_unary());
    return Formula::conj(std::move(parts));
  }

  Formula parse_unary() {
    if (accept(Tok::Tilde)) {
      if (peek().kind == Tok::Number || peek().kind == Tok::Ident) {
        AtomRef ref = parse_atom_ref();
        if (ref.value.empty()) {
          ref.value = "false";
          return resolve_(ref);
        }
        return Formula::negate(resolve_(ref));
      }
      return Formula::negate(parse_unary());
    }
    switch (peek().kind) {
      case Tok::KwTrue: next(); return Formula::top();
      case Tok::KwFalse: next(); return Formula::bottom();
      case Tok::LParen: {
        next();
        Formula f = parse_or();
        if (!accept(Tok::RParen)) fail(peek(), "expected ')'");
        return f;
      }
      case Tok::Number:
      case Tok::Ident: {
        AtomRef ref = parse_atom_ref();
        if (ref.value.empty()) ref.value = "true";
        return resolve_(ref);
      }
      default:
        fail(peek(), std::string("expected a formula, found ") +
                         tok_name(peek().kind));
    }
  }

  AtomRef parse_atom_ref() {
    AtomRef ref;
    ref.span = peek().span;
    if (peek().kind == Tok::Number) {
      const Token& t = next();
      if (t.number < 0 || t.number != std::floor(t.number))
        fail(t, "step prefix must be a nonnegative integer");
      ref.has_step = true;
      ref.step = static_cast<int>(t.number);
      if (!accept(Tok::Colon)) fail(peek(), "expected ':' after step prefix");
    }
    // Both ~0:P and 0:~P spell the atom P=false at step 0.
    bool negated_name = false;
    if (ref.has_step && accept(Tok::Tilde)) negated_name = true;
    if (peek().kind != Tok::Ident) fail(peek(), "expected an atom name");
    ref.flat_name = next().text;
    if (accept(Tok::LParen)) {
      ref.flat_name += "(";
      bool first = true;
      do {
        if (!first) ref.flat_name += ",";
        first = false;
        if (peek().kind != Tok::Ident && peek().kind != Tok::KwTrue &&
            peek().kind != Tok::KwFalse)
          fail(peek(), "expected an object name");
        ref.flat_name += next().text;
      } while (accept(Tok::Comma));
      if (!accept(Tok::RParen)) fail(peek(), "expected ')'");
      ref.span.end = peek().span.begin;
    }
    if (accept(Tok::Equals)) {
      if (negated_name) fail(peek(), "unexpected '=' after '~'");
      if (peek().kind != Tok::Ident && peek().kind != Tok::KwTrue &&
          peek().kind != Tok::KwFalse && peek().kind != Tok::Number)
        fail(peek(), "expected a value");
      ref.value = next().text;
    } else if (negated_name) {
      ref.value = "false";
    }
    return ref;
  }
};

}  // namespace

FormulaParseResult parse_query_formula(const std::string& text,
                                       const GroundSignature& signature) {
  FormulaParseResult result;
  try {
    QueryParser p(text, [&](const AtomRef& ref) -> Formula {
      if (!ref.has_step)
        throw ParseFailure{ParseError{
            ref.span, "atom '" + ref.flat_name +
                          "' needs a step prefix (e.g. 0:" + ref.flat_name + ")",
            {}}};
      const std::string timed =
          std::to_string(ref.step) + ":" + ref.flat_name;
      const int c = signature.find(timed);
      if (c < 0)
        throw ParseFailure{ParseError{
            ref.span, "unknown atom '" + timed + "' in this program", {}}};
      const auto& tc = signature.constant(c);
      for (std::size_t v = 0; v < tc.domain.size(); ++v)
        if (tc.domain[v] == ref.value)
          return Formula::atom(c, static_cast<int>(v));
      throw ParseFailure{ParseError{
          ref.span,
          "value '" + ref.value + "' is not in the domain of '" + timed + "'",
          {}}};
    });
    result.formula = p.parse();
  } catch (const ParseFailure& f) {
    result.error = f.error;
  }
  return result;
}

FormulaParseResult parse_state_formula(const std::string& text,
                                       const CompiledDescription& desc) {
  FormulaParseResult result;
  try {
    QueryParser p(text, [&](const AtomRef& ref) -> Formula {
      if (ref.has_step)
        throw ParseFailure{ParseError{
            ref.span, "state formulas are untimed; drop the step prefix", {}}};
      const int c = desc.constant_index(ref.flat_name);
      if (c < 0)
        throw ParseFailure{ParseError{
            ref.span, "unknown constant '" + ref.flat_name + "'", {}}};
      const auto& decl = desc.constants()[static_cast<std::size_t>(c)];
      if (!is_fluent(decl.kind))
        throw ParseFailure{ParseError{
            ref.span,
            "'" + ref.flat_name + "' is not a fluent constant", {}}};
      const int v = decl.value_index(ref.value);
      if (v < 0)
        throw ParseFailure{ParseError{
            ref.span,
            "value '" + ref.value + "' is not in the domain of '" +
                ref.flat_name + "'",
            {}}};
      return Formula::atom(c, v);
    });
    result.formula = p.parse();
  } catch (const ParseFailure& f) {
    result.error = f.error;
  }
  return result;
}

}  // namespace pbcmdp
