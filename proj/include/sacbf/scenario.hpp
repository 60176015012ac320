#pragma once

#include "sacbf/simulator.hpp"

#include <string>

namespace sacbf {

/// Parses the sectioned key = value scenario format:
///
///   [scenario]          name, model, initial_state, t0, dt, horizon,
///                       controller, input_lower, input_upper, policy,
///                       audit_substep, integrator_tolerance
///   [bound]             nodes, safety_factor, lipschitz_samples, seed,
///                       cache_fraction, input_variation, candidate_inputs,
///                       certify_iterations, certify_margin
///   [safety <id>]       center, radius, norm_order, form, relative_degree,
///                       lambda, eta, weight
///   [reach <id>]        center, eps0, eps_d, t_start, t_reach, t_remain,
///                       norm_order, schedule, form, relative_degree,
///                       lambda, eta, weight
///
/// Lists are whitespace separated. `lambda` and `eta` take one value per
/// level or a single value applied to every level. Lines starting with '#'
/// or ';' are comments. Unknown sections or keys, duplicates, missing
/// required fields and invalid values raise ParseError naming the field.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

/// Writes every field explicitly; parse_scenario(serialize_scenario(c)) == c.
std::string serialize_scenario(const ScenarioConfig& config);

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

}  // namespace sacbf
