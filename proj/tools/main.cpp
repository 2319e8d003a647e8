// pbcmdp: compile probabilistic action descriptions to weighted stable-model
// programs, extract the induced transition system and MDP, run exact queries,
// and solve for optimal policies.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pbcmdp/dtlpmln.hpp"
#include "pbcmdp/dump.hpp"
#include "pbcmdp/mdp.hpp"
#include "pbcmdp/parser.hpp"

using namespace pbcmdp;

namespace {

// Exit codes: 1 parse, 2 validation, 3 assumption violation, 4 infeasible
// query, 5 resource guard.
enum ExitCode {
  kOk = 0,
  kParseError = 1,
  kValidationError = 2,
  kAssumptionError = 3,
  kInfeasible = 4,
  kGuard = 5,
};

struct CliError {
  int code;
  std::string message;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good())
    throw CliError{kParseError, "parse: cannot open '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CompiledDescription load(const std::string& path) {
  ParseResult parsed = parse_description(read_file(path));
  if (!parsed.ok())
    throw CliError{kParseError, "parse: " + parsed.error->to_string()};
  ActionDescription ground;
  try {
    ground = ground_schematics(*parsed.description);
  } catch (const GroundingError& e) {
    throw CliError{kValidationError, std::string("validation: ") + e.what()};
  }
  const auto violations = validate(ground);
  if (!violations.empty()) {
    std::string what = "validation: ";
    for (std::size_t i = 0; i < violations.size(); ++i) {
      if (i) what += "; ";
      if (violations[i].law_index >= 0)
        what += "law " + std::to_string(violations[i].law_index) + ": ";
      what += violations[i].message;
    }
    throw CliError{kValidationError, what};
  }
  return CompiledDescription::compile(ground);
}

void gate_assumptions(TransitionAnalysis& analysis, bool unchecked) {
  if (unchecked) return;
  const AssumptionReport report = analysis.check_assumptions();
  if (report.ok()) return;
  std::string what = "assumption:";
  for (const auto& v : report.violations)
    what += " [" + std::to_string(v.assumption) + "] " + v.witness + ";";
  what += " (rerun with --unchecked to force)";
  throw CliError{kAssumptionError, what};
}

Formula parse_query_or_die(const std::string& text,
                           const GroundSignature& sig) {
  FormulaParseResult r = parse_query_formula(text, sig);
  if (!r.ok())
    throw CliError{kInfeasible, "infeasible: " + r.error->to_string()};
  return *r.formula;
}

void write_output(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path);
  out << content;
}

void maybe_dump_program(const CompiledDescription& desc, int horizon,
                        const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path);
  out << dump_program(translate(desc, horizon));
}

/// States whose assignment satisfies the untimed selector formula.
std::vector<int> select_states(TransitionAnalysis& analysis,
                               const CompiledDescription& desc,
                               const std::string& selector) {
  std::vector<int> out;
  if (selector.empty()) {
    for (std::size_t s = 0; s < analysis.states().size(); ++s)
      out.push_back(static_cast<int>(s));
    return out;
  }
  FormulaParseResult parsed = parse_state_formula(selector, desc);
  if (!parsed.ok())
    throw CliError{kInfeasible, "infeasible: " + parsed.error->to_string()};
  // The state formula is over description constants; state values cover the
  // fluent subset in declaration order, so expand to a full vector first.
  for (std::size_t s = 0; s < analysis.states().size(); ++s) {
    std::vector<int> full(desc.constants().size(), -1);
    const auto& fluents = analysis.fluent_constants();
    for (std::size_t i = 0; i < fluents.size(); ++i)
      full[static_cast<std::size_t>(fluents[i])] =
          analysis.states()[s].values[i];
    if (parsed.formula->eval3(full) == Tri::True)
      out.push_back(static_cast<int>(s));
  }
  if (out.empty())
    throw CliError{kInfeasible,
                   "infeasible: no state satisfies '" + selector + "'"};
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "pbcmdp: probabilistic action descriptions -> weighted stable-model "
      "programs -> transition systems, MDPs, and optimal policies"};
  app.require_subcommand(1);

  std::string input;
  int horizon = 1;
  double discount = 0.0;
  double epsilon = 1e-6;
  std::string initial, query_text, evidence_text;
  std::string format = "text";
  std::string out_path, dump_path;
  bool unchecked = false;
  bool seedless = true;

  auto add_common = [&](CLI::App* cmd, bool with_pipeline_flags) {
    cmd->add_option("input", input, "action description (.pbcp)")->required();
    if (with_pipeline_flags) {
      cmd->add_flag("--unchecked", unchecked,
                    "skip the assumption gate before building");
      cmd->add_option("--dump-program", dump_path,
                      "write the translated ground program to this file");
    }
    cmd->add_flag("--seedless-deterministic", seedless,
                  "deterministic output (always on; flag kept for scripts)");
    return cmd;
  };

  auto* cmd_validate =
      add_common(app.add_subcommand("validate", "check a description"), false);

  auto* cmd_states = add_common(
      app.add_subcommand("states", "enumerate and print the states"), false);

  auto* cmd_actions = add_common(
      app.add_subcommand("actions", "enumerate and print the action profiles"),
      false);

  auto* cmd_transition = add_common(
      app.add_subcommand("transition",
                         "dump the labeled probabilistic transition system"),
      true);
  cmd_transition->add_option("--out", out_path, "write the dump here");

  auto* cmd_mdp = add_common(
      app.add_subcommand("mdp", "build and dump the induced MDP"), true);
  cmd_mdp->add_option("--format", format, "json or tsv")
      ->check(CLI::IsMember({"json", "tsv"}));
  cmd_mdp->add_option("--out", out_path, "write the dump here");

  auto* cmd_solve = add_common(
      app.add_subcommand("solve", "optimal policy by value iteration"), true);
  cmd_solve->add_option("--horizon", horizon, "finite horizon m");
  cmd_solve->add_option("--discount", discount,
                        "discount factor (switches to infinite horizon)");
  cmd_solve->add_option("--epsilon", epsilon, "value-iteration tolerance");
  cmd_solve->add_option("--initial", initial,
                        "untimed fluent formula selecting initial states");
  cmd_solve->add_option("--out", out_path, "write the policy dump here");

  auto* cmd_eval = add_common(
      app.add_subcommand("eval", "conditional probability and expected "
                                 "utility of timed formulas"),
      true);
  cmd_eval->add_option("--horizon", horizon, "horizon m")->required();
  cmd_eval->add_option("--query", query_text, "timed formula")->required();
  cmd_eval->add_option("--evidence", evidence_text, "timed formula");

  auto* cmd_meu = add_common(
      app.add_subcommand("meu", "maximum-expected-utility action assignment"),
      true);
  cmd_meu->add_option("--horizon", horizon, "horizon m")->required();
  cmd_meu->add_option("--evidence", evidence_text, "timed formula");

  auto* cmd_program = add_common(
      app.add_subcommand("program", "print the translated ground program"),
      false);
  cmd_program->add_option("--horizon", horizon, "horizon m");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_validate->parsed()) {
      load(input);  // throws on problems
      std::cout << "ok\n";
      return kOk;
    }

    CompiledDescription desc = load(input);

    if (cmd_states->parsed()) {
      TransitionAnalysis analysis(desc);
      const auto& states = analysis.states();
      for (std::size_t i = 0; i < states.size(); ++i)
        std::cout << "s" << i << ": " << states[i].label << "\n";
      std::cout << states.size() << " states detected.\n";
      return kOk;
    }

    if (cmd_actions->parsed()) {
      TransitionAnalysis analysis(desc);
      const auto& actions = analysis.actions();
      for (std::size_t i = 0; i < actions.size(); ++i)
        std::cout << "a" << i << ": " << actions[i].label << "\n";
      std::cout << actions.size() << " actions detected.\n";
      return kOk;
    }

    if (cmd_transition->parsed()) {
      TransitionAnalysis analysis(desc);
      maybe_dump_program(desc, 1, dump_path);
      gate_assumptions(analysis, unchecked);
      const TransitionSystem ts = analysis.system();
      write_output(transition_system_json(ts), out_path);
      std::cerr << ts.states.size() << " states, " << ts.actions.size()
                << " actions, " << ts.edges.size() << " edges.\n";
      return kOk;
    }

    if (cmd_mdp->parsed()) {
      TransitionAnalysis analysis(desc);
      maybe_dump_program(desc, 1, dump_path);
      gate_assumptions(analysis, unchecked);
      const Mdp mdp = build_mdp(analysis, /*unchecked=*/true);
      write_output(format == "tsv" ? mdp_tsv(mdp) : mdp_json(mdp), out_path);
      std::cerr << mdp.num_states << " states, " << mdp.num_actions
                << " actions.\n";
      return kOk;
    }

    if (cmd_solve->parsed()) {
      TransitionAnalysis analysis(desc);
      maybe_dump_program(desc, std::max(horizon, 1), dump_path);
      gate_assumptions(analysis, unchecked);
      const Mdp mdp = build_mdp(analysis, /*unchecked=*/true);
      const std::vector<int> initial_states =
          select_states(analysis, desc, initial);

      if (discount > 0.0) {
        StationaryPolicy pi = solve_infinite(mdp, discount, epsilon);
        std::cout << "gamma = " << num(discount) << ", sweeps = " << pi.sweeps
                  << "\n";
        for (int s = 0; s < mdp.num_states; ++s)
          std::cout << "s" << s << " "
                    << mdp.state_labels[static_cast<std::size_t>(s)] << ": "
                    << mdp.action_labels[static_cast<std::size_t>(
                           pi.action[static_cast<std::size_t>(s)])]
                    << "  V = " << num(pi.value[static_cast<std::size_t>(s)])
                    << "\n";
        if (!initial.empty())
          for (int s : initial_states)
            std::cout << "value = "
                      << num(pi.value[static_cast<std::size_t>(s)]) << " at s"
                      << s << " "
                      << mdp.state_labels[static_cast<std::size_t>(s)] << "\n";
        if (!out_path.empty())
          write_output(
              stationary_policy_json(pi, mdp.state_labels, mdp.action_labels),
              out_path);
      } else {
        NonStationaryPolicy pi = solve_finite(mdp, horizon);
        std::cout << "horizon = " << horizon << "\n";
        for (int s = 0; s < mdp.num_states; ++s) {
          std::cout << "s" << s << " "
                    << mdp.state_labels[static_cast<std::size_t>(s)] << ":";
          for (int step = 0; step < horizon; ++step)
            std::cout << " "
                      << mdp.action_labels[static_cast<std::size_t>(
                             pi.action[static_cast<std::size_t>(s)]
                                      [static_cast<std::size_t>(step)])];
          std::cout << "  V0 = "
                    << num(pi.value[static_cast<std::size_t>(s)][0]) << "\n";
        }
        if (!initial.empty())
          for (int s : initial_states)
            std::cout << "value = "
                      << num(pi.value[static_cast<std::size_t>(s)][0])
                      << " at s" << s << " "
                      << mdp.state_labels[static_cast<std::size_t>(s)] << "\n";
        if (!out_path.empty())
          write_output(
              finite_policy_json(pi, mdp.state_labels, mdp.action_labels),
              out_path);
      }
      return kOk;
    }

    if (cmd_eval->parsed()) {
      GroundProgram program = translate(desc, horizon);
      maybe_dump_program(desc, horizon, dump_path);
      const Formula query = parse_query_or_die(query_text, program.signature);
      const Formula evidence =
          evidence_text.empty()
              ? Formula::top()
              : parse_query_or_die(evidence_text, program.signature);
      Inference inference(std::move(program));
      const QueryResult result = inference.query_probability(query, evidence);
      std::cout << "probability = " << num(result.probability) << " ("
                << result.support << " supporting stable models)\n";
      const Formula both = Formula::conj2(query, evidence);
      try {
        std::cout << "expected utility of query & evidence = "
                  << num(inference.expected_utility(both)) << "\n";
      } catch (const InfeasibleQuery&) {
        std::cout << "expected utility of query & evidence = undefined "
                     "(zero probability)\n";
      }
      return kOk;
    }

    if (cmd_meu->parsed()) {
      GroundProgram program = translate(desc, horizon);
      maybe_dump_program(desc, horizon, dump_path);
      DecisionProblem dp;
      for (std::size_t c = 0; c < program.signature.constants().size(); ++c)
        if (program.signature.constant(static_cast<int>(c)).kind ==
            ConstantKind::Action)
          dp.decision_constants.push_back(static_cast<int>(c));
      const Formula evidence =
          evidence_text.empty()
              ? Formula::top()
              : parse_query_or_die(evidence_text, program.signature);
      dp.program = std::move(program);
      Inference inference(dp.program);
      const MeuResult best = meu(inference, dp, evidence);
      std::cout << "decision:";
      bool any = false;
      for (std::size_t i = 0; i < dp.decision_constants.size(); ++i) {
        if (!best.best.values[i]) continue;
        std::cout << " "
                  << dp.program.signature.constant(dp.decision_constants[i])
                         .name;
        any = true;
      }
      if (!any) std::cout << " none";
      std::cout << "\n";
      std::cout << "expected utility = " << num(best.expected_utility) << "\n";
      if (best.maximizers.size() > 1)
        std::cout << best.maximizers.size()
                  << " assignments tie; reporting the lexicographically "
                     "smallest.\n";
      return kOk;
    }

    if (cmd_program->parsed()) {
      std::cout << dump_program(translate(desc, horizon));
      return kOk;
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const AssumptionError& e) {
    std::cerr << "error: assumption: " << e.what() << "\n";
    return kAssumptionError;
  } catch (const InfeasibleQuery& e) {
    std::cerr << "error: infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const NoStableModel& e) {
    std::cerr << "error: infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const ResourceGuard& e) {
    std::cerr << "error: guard: " << e.what() << "\n";
    return kGuard;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 10;
  }
  return kOk;
}
