#ifndef PBCMDP_DUMP_HPP
#define PBCMDP_DUMP_HPP

#include <string>

#include "pbcmdp/mdp.hpp"
#include "pbcmdp/transition.hpp"

namespace pbcmdp {

// Machine-readable dumps. The layouts are documented in docs/formats.md;
// output is byte-stable for identical inputs.

std::string transition_system_json(const TransitionSystem& ts);

std::string mdp_json(const Mdp& mdp);
std::string mdp_tsv(const Mdp& mdp);  // one "a s s2 p r" row per cell

std::string finite_policy_json(const NonStationaryPolicy& pi,
                               const std::vector<std::string>& state_labels,
                               const std::vector<std::string>& action_labels);
std::string stationary_policy_json(
    const StationaryPolicy& pi, const std::vector<std::string>& state_labels,
    const std::vector<std::string>& action_labels);

std::string models_dump(Inference& inference);  // one stable model per line

}  // namespace pbcmdp

#endif
