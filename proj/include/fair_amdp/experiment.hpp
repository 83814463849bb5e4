#pragma once

#include "fair_amdp/evaluation.hpp"
#include "fair_amdp/smd.hpp"

#include <string>
#include <vector>

namespace fairmdp {

/**
 * Multi-run experiment settings. Run i draws its seed deterministically
 * from base_seed, so results are independent of the worker count and runs
 * merge in seed order.
 */
struct ExperimentConfig {
    SmdConfig smd; // per-run seed is derived; the seed field here is ignored
    uint64_t base_seed = 0;
    int runs = 1;
    int jobs = 1;
    bool zero_wall_ms = false; // CI mode: deterministic output bytes
};

/// Fixed CSV schema: seed,t,reward_policy,reward_xbar,nu_0..nu_{n-1},gap,eps1,eps2,wall_ms
std::string run_record_header(int n_states);

uint64_t run_seed(uint64_t base_seed, int run_index);

struct ExperimentOutput {
    std::string csv;          // header plus one row per recorded stride per run
    std::string summary_json; // per-metric mean and std at the final iteration
};

/**
 * Runs the saddle solver `runs` times and evaluates every recorded snapshot
 * against the exact model: extracted-policy reward and stationary
 * distribution, r^T x-bar, exact gap, and the approximation metrics against
 * the Fair-LP optimum (solved once up front; throws if it is not optimal).
 */
ExperimentOutput run_experiment(const MdpModel& model, const FairnessSpec& fairness,
                                const ExperimentConfig& config);

struct SweepEntry {
    double rho_value;
    bool skipped = false;    // floor at or above 1/n without the override
    bool feasible = false;
    double v_star = 0.0;
    ExperimentOutput output; // empty when skipped or infeasible
};

/**
 * Re-runs the experiment for each floor value substituted at `state_index`,
 * solving the LP per value for the exact optimum. Infeasible values are
 * reported and the sweep continues.
 */
std::vector<SweepEntry> run_sweep(const MdpModel& model, const FairnessSpec& base,
                                  int state_index, const std::vector<double>& values,
                                  const ExperimentConfig& config,
                                  bool allow_near_boundary);

std::string sweep_summary_json(const std::vector<SweepEntry>& entries);

} // namespace fairmdp
