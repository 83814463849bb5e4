#pragma once

#include "fair_amdp/mdp.hpp"
#include "fair_amdp/sampling.hpp"

#include <optional>
#include <string>

namespace fairmdp {

/// Raised on malformed instance files; the message names the offending
/// field (and row index where applicable).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * On-disk instance: JSON object with integer `n` and `m`, an l x n
 * `transitions` array of arrays in flat pair-row order, a length-l
 * `rewards` array, and optional length-n `rho` and `initial_distribution`
 * arrays.
 */
struct Instance {
    MdpModel model;
    std::optional<FairnessSpec> rho;
};

Instance parse_instance(const std::string& text);
Instance load_instance(const std::string& path);
std::string serialize_instance(const Instance& instance);
void save_instance(const Instance& instance, const std::string& path);

/// Random model whose transition rows are strictly positive, so every
/// policy induces an ergodic chain. Rewards are uniform in [0, 1].
MdpModel random_ergodic_model(int n_states, int n_actions, RngStream& rng);

/// Random floors rho_s uniform in [0, max_fraction / n].
FairnessSpec random_fairness(int n_states, double max_fraction, RngStream& rng);

} // namespace fairmdp
