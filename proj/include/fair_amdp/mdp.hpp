#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairmdp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Thrown when a chain is not ergodic (stationary solve is rank deficient
/// beyond the expected one-dimensional null space, or a fundamental matrix
/// is singular).
struct SingularChainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when an iteration ceiling or enumeration budget is exceeded.
struct LimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * Finite MDP with n_states states and n_actions actions per state.
 *
 * `transitions` has one row per state-action pair; row (s, a) lives at flat
 * index s * n_actions + a and is a probability distribution over next
 * states. `rewards` holds one entry in [0, 1] per pair. The optional
 * initial-state distribution is parsed and stored but plays no role in the
 * average-reward objective.
 */
struct MdpModel {
    int n_states = 0;
    int n_actions = 0;
    Mat transitions;          // (n_states * n_actions) x n_states
    Vec rewards;              // n_states * n_actions
    Vec initial_distribution; // empty or n_states; inert

    int pair_count() const { return n_states * n_actions; }
    int pair_index(int s, int a) const { return s * n_actions + a; }
    int pair_state(int idx) const { return idx / n_actions; }
    int pair_action(int idx) const { return idx % n_actions; }
};

/// Per-state distribution over actions; row s of `probs` is pi(.|s).
struct Policy {
    Mat probs; // n_states x n_actions
};

/// Distribution over states (simplex membership enforced by construction).
struct StateDistribution {
    Vec mass; // n_states
};

/// Distribution over state-action pairs.
struct OccupancyMeasure {
    Vec mass; // n_states * n_actions
};

/// Per-state minimum stationary-visitation floors rho_s in [0, 1).
struct FairnessSpec {
    Vec rho; // n_states

    double sum() const { return rho.size() ? rho.sum() : 0.0; }
    /// True when every floor is strictly below 1/n (needed by the dual
    /// bound mu_s <= n rho_s / (1 - n rho_s)).
    bool strictly_below_uniform() const {
        const int n = static_cast<int>(rho.size());
        for (int s = 0; s < n; ++s)
            if (rho[s] >= 1.0 / n) return false;
        return true;
    }
    static FairnessSpec zero(int n) { return FairnessSpec{Vec::Zero(n)}; }
};

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;
    bool ok() const { return violations.empty(); }
};

/// Checks row-stochasticity, reward range and dimension consistency.
/// Violations are reported (not thrown); a non-strongly-connected support
/// graph is surfaced as a warning only.
ValidationReport validate_model(const MdpModel& model);

/// Transition matrix of the chain induced by `policy`:
/// (s, s') entry = sum_a pi(a|s) * Gamma((s,a), s').
Mat induced_chain(const MdpModel& model, const Policy& policy);

/**
 * Stationary distribution of a row-stochastic chain, by dense solve of the
 * stacked system [ (I - P)^T ; 1^T ] nu = [ 0 ; 1 ].
 *
 * Throws SingularChainError when the system is rank deficient or the
 * residual ||nu^T P - nu^T||_inf exceeds 1e-10.
 */
StateDistribution stationary_distribution(const Mat& chain);

/// Long-run average reward of `policy`: r^T x with x the occupancy measure.
double average_reward(const MdpModel& model, const Policy& policy);

/// x_{s,a} = nu_s * pi(a|s) for the policy's stationary nu.
OccupancyMeasure occupancy_from_policy(const MdpModel& model, const Policy& policy);

/// Row-normalizes x per state group. A group with zero total mass (legal
/// when rho_s = 0) yields the uniform row.
Policy policy_from_occupancy(const Vec& x, int n_states, int n_actions);
inline Policy policy_from_occupancy(const OccupancyMeasure& x, int n_states, int n_actions) {
    return policy_from_occupancy(x.mass, n_states, n_actions);
}

/// Appends a zero-reward action with uniform transitions (1/n to each
/// state) at index n_actions, per state. Original pairs keep their data.
MdpModel augment_fair_action(const MdpModel& model);

constexpr int kDefaultMixingCeiling = 1'000'000;
constexpr int kDefaultPolicyBudget = 4096;

/**
 * Smallest t >= 1 with max_s || row_s(P^t) - nu ||_1 <= 1/2, computed by
 * repeated matrix powering (the max of the total-variation distance over
 * initial distributions is attained at a vertex e_s).
 *
 * Throws LimitError past `ceiling` steps.
 */
int mixing_time_of_policy(const Mat& chain, int ceiling = kDefaultMixingCeiling);

/**
 * Max of mixing_time_of_policy over all deterministic policies. This is an
 * estimate of the MDP mixing time: the definition maximizes over all
 * stochastic policies, which is not enumerable; callers may supply the dual
 * radius M directly instead.
 *
 * Throws LimitError when n_actions^n_states exceeds `policy_budget`.
 */
int mixing_time_upper_estimate(const MdpModel& model,
                               int policy_budget = kDefaultPolicyBudget,
                               int ceiling = kDefaultMixingCeiling);

/// || (I - P + 1 nu^T)^{-1} ||_inf, the max absolute row sum of the inverse
/// fundamental-style matrix. Used only for bound verification.
double fundamental_inverse_norm(const Mat& chain, const Vec& nu);

} // namespace fairmdp
