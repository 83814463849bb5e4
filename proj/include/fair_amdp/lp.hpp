#pragma once

#include "fair_amdp/mdp.hpp"

namespace fairmdp {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus status);

/**
 * Dense standard-form LP: maximize objective^T x subject to
 * eq_A x = eq_b, ge_A x >= ge_b, x >= 0.
 */
struct LinearProgram {
    Vec objective;
    Mat eq_A;
    Vec eq_b;
    Mat ge_A;
    Vec ge_b;

    int n_vars() const { return static_cast<int>(objective.size()); }
};

/**
 * Simplex solution. Dual sign convention for the maximization problem:
 * value = eq_b . dual_eq + ge_b . dual_ge, with dual_ge <= 0 at optimality
 * (>=-rows of a max program carry non-positive multipliers).
 */
struct LpSolution {
    LpStatus status = LpStatus::iteration_limit;
    double value = 0.0;
    Vec point;
    Vec dual_eq;
    Vec dual_ge;
};

/**
 * Two-phase dense simplex with Bland's anti-cycling rule throughout.
 * Double precision with 1e-9 pivot tolerance; redundant equality rows
 * (e.g. the flow-balance rows, which sum to zero) are detected after
 * phase 1 and carry a zero dual. Duals are recovered from the final basis
 * via the artificial columns.
 */
LpSolution simplex_solve(const LinearProgram& lp, int max_iters = 100000);

/// UC-LP (D): maximize r^T x over the pair simplex under flow balance.
/// l variables, n flow-balance equalities plus the normalization row.
LinearProgram build_uc_lp(const MdpModel& model);

/// Fair-LP (D): UC-LP rows plus, for every state with rho_s > 0, the row
/// (1/rho_s) sum_a x_{s,a} >= 1. Throws when sum(rho) > 1.
LinearProgram build_fair_lp(const MdpModel& model, const FairnessSpec& fairness);

/**
 * Exact fair-optimal solve: value, occupancy, extracted policy and the
 * dual certificate in the saddle-point sign convention, i.e. lambda and mu
 * satisfy (I_hat - Gamma) lambda + r + C^T mu <= beta 1 with mu >= 0 and
 * value = beta - sum(mu).
 */
struct FairOptimal {
    LpStatus status = LpStatus::infeasible;
    double value = 0.0;
    OccupancyMeasure occupancy;
    Policy policy;
    Vec lambda; // n_states
    Vec mu;     // n_states, zero where rho_s == 0
    double beta = 0.0;
};

FairOptimal fair_optimal(const MdpModel& model, const FairnessSpec& fairness,
                         int max_iters = 100000);

} // namespace fairmdp
