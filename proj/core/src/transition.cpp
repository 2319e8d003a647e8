#include "pbcmdp/transition.hpp"

#include <algorithm>

namespace pbcmdp {

namespace {

/// Permutation of `constants` sorted by constant name; canonical state and
/// action order compares value vectors through this permutation.
std::vector<int> name_order(const CompiledDescription& d,
                            const std::vector<int>& constants) {
  std::vector<int> perm(constants.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  std::sort(perm.begin(), perm.end(), [&](int a, int b) {
    return d.constants()[static_cast<std::size_t>(constants[a])].name <
           d.constants()[static_cast<std::size_t>(constants[b])].name;
  });
  return perm;
}

struct CanonicalLess {
  const std::vector<int>* perm;
  bool operator()(const std::vector<int>& a, const std::vector<int>& b) const {
    for (int i : *perm) {
      const std::size_t k = static_cast<std::size_t>(i);
      if (a[k] != b[k]) return a[k] < b[k];
    }
    return false;
  }
};

}  // namespace

TransitionAnalysis::TransitionAnalysis(CompiledDescription desc,
                                       EnumerationLimits limits)
    : desc_(std::move(desc)), limits_(limits) {
  for (std::size_t i = 0; i < desc_.constants().size(); ++i) {
    switch (desc_.constants()[i].kind) {
      case ConstantKind::RegularFluent:
      case ConstantKind::StaticFluent:
        fluents_.push_back(static_cast<int>(i));
        break;
      case ConstantKind::Action:
        actions_decl_.push_back(static_cast<int>(i));
        break;
      case ConstantKind::Pf:
        pfs_.push_back(static_cast<int>(i));
        break;
      case ConstantKind::InitPf:
        initpfs_.push_back(static_cast<int>(i));
        break;
    }
  }
}

const GroundProgram& TransitionAnalysis::full_program(int m) {
  return full_inference(m).program();
}

Inference& TransitionAnalysis::full_inference(int m) {
  auto it = full_.find(m);
  if (it == full_.end()) {
    it = full_
             .emplace(m, std::make_unique<Inference>(
                             translate(desc_, m, TranslationParts::All),
                             limits_))
             .first;
  }
  return *it->second;
}

Inference& TransitionAnalysis::step_inference(int m) {
  auto it = step_.find(m);
  if (it == step_.end()) {
    it = step_
             .emplace(m, std::make_unique<Inference>(
                             translate(desc_, m, TranslationParts::DynamicOnly),
                             limits_))
             .first;
  }
  return *it->second;
}

std::string TransitionAnalysis::state_label(
    const std::vector<int>& values) const {
  std::string out = "{";
  const auto perm = name_order(desc_, fluents_);
  bool first = true;
  for (int i : perm) {
    const auto& decl =
        desc_.constants()[static_cast<std::size_t>(fluents_[static_cast<std::size_t>(i)])];
    if (!first) out += ", ";
    first = false;
    const int v = values[static_cast<std::size_t>(i)];
    if (decl.domain.size() == 2 && decl.domain[0] == "false" &&
        decl.domain[1] == "true") {
      out += (v == 1 ? decl.name : "~" + decl.name);
    } else {
      out += decl.name + "=" + decl.domain[static_cast<std::size_t>(v)];
    }
  }
  out += "}";
  return out;
}

std::string TransitionAnalysis::profile_label(
    const std::vector<int>& values) const {
  // Actions are boolean; list the true ones, or "none".
  std::string out;
  const auto perm = name_order(desc_, actions_decl_);
  for (int i : perm) {
    if (values[static_cast<std::size_t>(i)] != 1) continue;
    if (!out.empty()) out += "+";
    out += desc_
               .constants()[static_cast<std::size_t>(
                   actions_decl_[static_cast<std::size_t>(i)])]
               .name;
  }
  return out.empty() ? "none" : out;
}

void TransitionAnalysis::ensure_states() {
  if (states_done_) return;
  Inference& inf = step_inference(0);
  if (!inf.has_models())
    throw NoStableModel();  // inconsistent description: no states

  const GroundSignature& sig = inf.program().signature;
  std::vector<int> timed;
  for (int c : fluents_) timed.push_back(sig.find(c, 0));

  std::vector<std::vector<int>> seen;
  for (const auto& m : inf.models())
    seen.push_back(m.interpretation.project(timed));
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());

  const auto perm = name_order(desc_, fluents_);
  CanonicalLess less{&perm};
  std::sort(seen.begin(), seen.end(), less);

  for (auto& values : seen) {
    State s;
    s.label = state_label(values);
    s.values = std::move(values);
    state_index_[s.values] = static_cast<int>(states_.size());
    states_.push_back(std::move(s));
  }
  states_done_ = true;
}

void TransitionAnalysis::ensure_actions() {
  if (actions_done_) return;
  Inference& inf = step_inference(1);
  const GroundSignature& sig = inf.program().signature;
  std::vector<int> timed;
  for (int c : actions_decl_) timed.push_back(sig.find(c, 0));

  std::vector<std::vector<int>> seen;
  if (inf.has_models())
    for (const auto& m : inf.models())
      seen.push_back(m.interpretation.project(timed));
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());

  const auto perm = name_order(desc_, actions_decl_);
  CanonicalLess less{&perm};
  std::sort(seen.begin(), seen.end(), less);

  for (auto& values : seen) {
    ActionProfile a;
    a.label = profile_label(values);
    a.values = std::move(values);
    action_index_[a.values] = static_cast<int>(actions_.size());
    actions_.push_back(std::move(a));
  }
  actions_done_ = true;
}

void TransitionAnalysis::ensure_transitions() {
  if (transitions_done_) return;
  ensure_states();
  ensure_actions();

  Inference& inf = step_inference(1);
  const GroundSignature& sig = inf.program().signature;
  std::vector<int> fl0, fl1, act0, pf0;
  for (int c : fluents_) fl0.push_back(sig.find(c, 0));
  for (int c : fluents_) fl1.push_back(sig.find(c, 1));
  for (int c : actions_decl_) act0.push_back(sig.find(c, 0));
  for (int c : pfs_) pf0.push_back(sig.find(c, 0));

  // Register the full pf product up front so the assumption check sees pf
  // assignments that never reach a stable model.
  {
    std::vector<int> pf(pfs_.size(), 0);
    while (true) {
      pf_index_.emplace(pf, static_cast<int>(pf_index_.size()));
      std::size_t i = pf.size();
      bool done = true;
      while (i > 0) {
        --i;
        const auto& decl = desc_.constants()[static_cast<std::size_t>(pfs_[i])];
        if (++pf[i] < static_cast<int>(decl.domain.size())) {
          done = false;
          break;
        }
        pf[i] = 0;
      }
      if (done || pf.empty()) break;
    }
  }

  for (const auto& m : inf.models()) {
    const auto s_vals = m.interpretation.project(fl0);
    const auto s2_vals = m.interpretation.project(fl1);
    const auto a_vals = m.interpretation.project(act0);
    const auto pf_vals = m.interpretation.project(pf0);

    const auto si = state_index_.find(s_vals);
    const auto s2i = state_index_.find(s2_vals);
    const auto ai = action_index_.find(a_vals);
    if (si == state_index_.end() || s2i == state_index_.end() ||
        ai == action_index_.end())
      throw std::logic_error(
          "one-step stable model projects outside the state/action sets");

    int pfk;
    auto pit = pf_index_.find(pf_vals);
    if (pit == pf_index_.end()) {
      pfk = static_cast<int>(pf_index_.size());
      pf_index_.emplace(pf_vals, pfk);
    } else {
      pfk = pit->second;
    }

    auto& stats = triples_[{si->second, ai->second, s2i->second}];
    stats.mass += m.probability;
    stats.utility_mass += m.probability * m.utility;
    pair_mass_[{si->second, ai->second}] += m.probability;

    auto& succ = pf_successors_[{si->second, ai->second, pfk}];
    if (std::find(succ.begin(), succ.end(), s2i->second) == succ.end())
      succ.push_back(s2i->second);
  }
  transitions_done_ = true;
}

const std::vector<State>& TransitionAnalysis::states() {
  ensure_states();
  return states_;
}

const std::vector<ActionProfile>& TransitionAnalysis::actions() {
  ensure_actions();
  return actions_;
}

int TransitionAnalysis::state_index(const std::vector<int>& fluent_values) {
  ensure_states();
  auto it = state_index_.find(fluent_values);
  return it == state_index_.end() ? -1 : it->second;
}

int TransitionAnalysis::action_index(const std::vector<int>& action_values) {
  ensure_actions();
  auto it = action_index_.find(action_values);
  return it == action_index_.end() ? -1 : it->second;
}

double TransitionAnalysis::transition_probability(int s, int a, int s2) {
  ensure_transitions();
  auto pm = pair_mass_.find({s, a});
  if (pm == pair_mass_.end() || pm->second <= 0.0)
    throw InfeasibleQuery("state-action pair (" + states_[s].label + ", " +
                          actions_[a].label + ") has no stable model");
  auto it = triples_.find({s, a, s2});
  if (it == triples_.end()) return 0.0;
  return it->second.mass / pm->second;
}

double TransitionAnalysis::transition_reward(int s, int a, int s2) {
  ensure_transitions();
  auto it = triples_.find({s, a, s2});
  if (it == triples_.end() || it->second.mass <= 0.0)
    throw InfeasibleQuery("transition (" + states_[s].label + ", " +
                          actions_[a].label + ", " + states_[s2].label +
                          ") has probability zero");
  return it->second.utility_mass / it->second.mass;
}

int TransitionAnalysis::successor(int s, int a,
                                  const std::vector<int>& pf_values) {
  ensure_transitions();
  auto pit = pf_index_.find(pf_values);
  if (pit == pf_index_.end())
    throw AssumptionError("assumption 2 violated: no successor for (" +
                          states_[s].label + ", " + actions_[a].label + ")");
  auto it = pf_successors_.find({s, a, pit->second});
  if (it == pf_successors_.end() || it->second.empty())
    throw AssumptionError("assumption 2 violated: no successor for (" +
                          states_[s].label + ", " + actions_[a].label + ")");
  if (it->second.size() > 1)
    throw AssumptionError("assumption 2 violated: multiple successors for (" +
                          states_[s].label + ", " + actions_[a].label + ")");
  return it->second.front();
}

AssumptionReport TransitionAnalysis::check_assumptions() {
  AssumptionReport report;
  try {
    ensure_transitions();
  } catch (const NoStableModel&) {
    report.violations.push_back(
        {2, "the one-step program has no stable model at all"});
    return report;
  }

  // Assumption 1: no concurrency.
  for (const auto& a : actions_) {
    int true_count = 0;
    for (int v : a.values) true_count += v == 1 ? 1 : 0;
    if (true_count > 1)
      report.violations.push_back(
          {1, "action profile " + a.label + " has " +
                  std::to_string(true_count) + " actions true"});
  }

  // Assumption 2: exactly one successor per (state, profile, pf assignment).
  const std::size_t num_pf = pf_index_.size();
  for (std::size_t s = 0; s < states_.size(); ++s) {
    for (std::size_t a = 0; a < actions_.size(); ++a) {
      for (std::size_t k = 0; k < num_pf; ++k) {
        auto it = pf_successors_.find({static_cast<int>(s),
                                       static_cast<int>(a),
                                       static_cast<int>(k)});
        const std::size_t count =
            it == pf_successors_.end() ? 0 : it->second.size();
        if (count != 1)
          report.violations.push_back(
              {2, "(" + states_[s].label + ", " + actions_[a].label +
                      ", pf#" + std::to_string(k) + ") has " +
                      std::to_string(count) + " successors"});
      }
    }
  }

  // Assumption 3: each initpf assignment pins exactly one initial fluent
  // assignment. Without initpf constants and initial laws the description
  // carries no initial-state machinery and the check does not apply.
  bool has_init_laws = false;
  for (const auto& law : desc_.laws())
    if (law.kind == CompiledLawKind::InitialStatic ||
        law.kind == CompiledLawKind::InitPfDecl)
      has_init_laws = true;
  if (initpfs_.empty() && !has_init_laws) {
    report.initial_check_applicable = false;
    report.notes.push_back(
        "assumption 3 skipped: no initpf constants or initial laws");
  } else {
    Inference& inf = full_inference(0);
    const GroundSignature& sig = inf.program().signature;
    std::vector<int> init_timed, fl_timed;
    for (int c : initpfs_) init_timed.push_back(sig.find(c, 0));
    for (int c : fluents_) fl_timed.push_back(sig.find(c, 0));
    std::map<std::vector<int>, std::vector<std::vector<int>>> groups;
    if (inf.has_models()) {
      for (const auto& m : inf.models()) {
        auto& fls = groups[m.interpretation.project(init_timed)];
        auto fl = m.interpretation.project(fl_timed);
        if (std::find(fls.begin(), fls.end(), fl) == fls.end())
          fls.push_back(std::move(fl));
      }
    }
    std::size_t expected = 1;
    for (int c : initpfs_)
      expected *= desc_.constants()[static_cast<std::size_t>(c)].domain.size();
    if (groups.size() != expected)
      report.violations.push_back(
          {3, std::to_string(expected - groups.size()) +
                  " initpf assignment(s) admit no initial state"});
    for (const auto& [init, fls] : groups) {
      if (fls.size() != 1) {
        std::string witness = "initpf assignment {";
        for (std::size_t i = 0; i < initpfs_.size(); ++i) {
          if (i) witness += ", ";
          const auto& decl =
              desc_.constants()[static_cast<std::size_t>(initpfs_[i])];
          witness += decl.name + "=" +
                     decl.domain[static_cast<std::size_t>(init[i])];
        }
        witness += "} admits " + std::to_string(fls.size()) +
                   " initial fluent assignments";
        report.violations.push_back({3, witness});
      }
    }
  }

  // The action-sequence normalization divides by |sigma_act|+1 per step;
  // flag profiles count mismatches instead of guessing intent.
  if (actions_.size() != actions_decl_.size() + 1)
    report.notes.push_back(
        "profile count " + std::to_string(actions_.size()) +
        " differs from |sigma_act|+1 = " +
        std::to_string(actions_decl_.size() + 1) +
        "; action-sequence probabilities will not be uniform");

  return report;
}

TransitionSystem TransitionAnalysis::system() {
  ensure_transitions();
  TransitionSystem ts;
  ts.states = states_;
  ts.actions = actions_;
  for (const auto& [key, stats] : triples_) {
    if (stats.mass <= 0.0) continue;
    const auto [s, a, s2] = key;
    TransitionEdge e;
    e.from = s;
    e.action = a;
    e.to = s2;
    e.probability = stats.mass / pair_mass_.at({s, a});
    e.reward = stats.utility_mass / stats.mass;
    ts.edges.push_back(e);
  }
  return ts;
}

bool TransitionAnalysis::initial_consistent(int s) {
  ensure_states();
  Inference& inf = full_inference(0);
  if (!inf.has_models()) return false;
  const GroundSignature& sig = inf.program().signature;
  std::vector<int> fl_timed;
  for (int c : fluents_) fl_timed.push_back(sig.find(c, 0));
  for (const auto& m : inf.models())
    if (m.interpretation.project(fl_timed) ==
        states_[static_cast<std::size_t>(s)].values)
      return true;
  return false;
}

Formula TransitionAnalysis::state_formula(int state, int step,
                                          const GroundSignature& sig) {
  ensure_states();
  const auto& s = states_.at(static_cast<std::size_t>(state));
  std::vector<Formula> parts;
  for (std::size_t i = 0; i < fluents_.size(); ++i) {
    const int timed = sig.find(fluents_[i], step);
    if (timed < 0) throw std::out_of_range("no fluent atoms at that step");
    parts.push_back(Formula::atom(timed, s.values[i]));
  }
  return Formula::conj(std::move(parts));
}

Formula TransitionAnalysis::action_formula(int action, int step,
                                           const GroundSignature& sig) {
  ensure_actions();
  const auto& a = actions_.at(static_cast<std::size_t>(action));
  std::vector<Formula> parts;
  for (std::size_t i = 0; i < actions_decl_.size(); ++i) {
    const int timed = sig.find(actions_decl_[i], step);
    if (timed < 0) throw std::out_of_range("no action atoms at that step");
    parts.push_back(Formula::atom(timed, a.values[i]));
  }
  return Formula::conj(std::move(parts));
}

Formula TransitionAnalysis::history_formula(std::span<const int> state_seq,
                                            std::span<const int> action_seq,
                                            const GroundSignature& sig) {
  if (!state_seq.empty() && action_seq.size() != state_seq.size() - 1)
    throw std::out_of_range("history needs one action between states");
  std::vector<Formula> parts;
  for (std::size_t i = 0; i < state_seq.size(); ++i) {
    parts.push_back(state_formula(state_seq[i], static_cast<int>(i), sig));
    if (i < action_seq.size())
      parts.push_back(action_formula(action_seq[i], static_cast<int>(i), sig));
  }
  return Formula::conj(std::move(parts));
}

Formula TransitionAnalysis::policy_formula(
    const std::vector<std::vector<int>>& action_by_state, int m,
    const GroundSignature& sig) {
  ensure_states();
  ensure_actions();
  std::vector<Formula> parts;
  for (std::size_t s = 0; s < states_.size(); ++s) {
    for (int i = 0; i < m; ++i) {
      const int a = action_by_state.at(s).at(static_cast<std::size_t>(i));
      parts.push_back(
          Formula::implies(state_formula(static_cast<int>(s), i, sig),
                           action_formula(a, i, sig)));
    }
  }
  return Formula::conj(std::move(parts));
}

}  // namespace pbcmdp
