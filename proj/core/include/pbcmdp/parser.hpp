#ifndef PBCMDP_PARSER_HPP
#define PBCMDP_PARSER_HPP

#include <optional>
#include <string>
#include <vector>

#include "pbcmdp/lang.hpp"

namespace pbcmdp {

struct SourceSpan {
  int line = 1;
  int column = 1;
  std::size_t begin = 0;  // byte offsets, begin <= end
  std::size_t end = 0;
};

struct ParseError {
  SourceSpan span;
  std::string message;
  std::vector<std::string> expected;

  std::string to_string() const;
};

struct ParseResult {
  std::optional<ActionDescription> description;
  std::optional<ParseError> error;

  bool ok() const { return description.has_value(); }
};

/// Parses the .pbcp surface syntax into an action description. Surface sugar
/// (default, inertial, constraint, causes, choice braces, noconcurrency) is
/// expanded here except for the no-concurrency marker, which needs ground
/// action constants and expands during grounding.
ParseResult parse_description(const std::string& text);

/// Prints a description in core form; parse_description(format_description(d))
/// is structurally equal to d for any d this parser produced.
std::string format_description(const ActionDescription& d);

class GroundSignature;  // translator.hpp

struct FormulaParseResult {
  std::optional<Formula> formula;
  std::optional<ParseError> error;
  bool ok() const { return formula.has_value(); }
};

/// Formula over timed atoms, e.g. "0:~P & 0:~Q & 1:In(b1)=r2". Every atom
/// needs a step prefix; names resolve against the program signature.
FormulaParseResult parse_query_formula(const std::string& text,
                                       const GroundSignature& signature);

/// Formula over untimed fluent atoms, e.g. "~P & ~Q"; used to select states.
FormulaParseResult parse_state_formula(const std::string& text,
                                       const CompiledDescription& desc);

}  // namespace pbcmdp

#endif
