#ifndef PBCMDP_TESTS_SUPPORT_HPP
#define PBCMDP_TESTS_SUPPORT_HPP

#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "pbcmdp/parser.hpp"

namespace pbcmdp::test {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "cannot open ", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string domain_path(const std::string& name) {
  return std::string(PBCMDP_DOMAINS_DIR) + "/" + name;
}

inline ActionDescription parse_ok(const std::string& text) {
  ParseResult r = parse_description(text);
  if (r.error) FAIL(r.error->to_string());
  return *r.description;
}

inline ActionDescription load_domain(const std::string& name) {
  return parse_ok(read_file(domain_path(name)));
}

inline CompiledDescription compile_domain(const std::string& name) {
  ActionDescription d = ground_schematics(load_domain(name));
  const auto violations = validate(d);
  for (const auto& v : violations) FAIL(name, ": ", v.message);
  return CompiledDescription::compile(d);
}

inline CompiledDescription compile_text(const std::string& text) {
  ActionDescription d = ground_schematics(parse_ok(text));
  const auto violations = validate(d);
  for (const auto& v : violations) FAIL(v.message);
  return CompiledDescription::compile(d);
}

}  // namespace pbcmdp::test

#endif
