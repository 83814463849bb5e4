#pragma once

#include "fair_amdp/lp.hpp"
#include "fair_amdp/mdp.hpp"
#include "fair_amdp/sampling.hpp"

#include <vector>

namespace fairmdp {

/// Exact x-space gradient of the saddle objective, (Gamma - I_hat) lambda - r.
Vec exact_grad_x(const MdpModel& model, const Vec& lambda);

/// Exact lambda-space gradient, (I_hat - Gamma)^T x.
Vec exact_grad_lambda(const MdpModel& model, const Vec& x);

/// Bilinear saddle objective f(x, lambda) = r^T x + lambda^T (I_hat - Gamma)^T x.
double saddle_objective(const MdpModel& model, const Vec& x, const Vec& lambda);

/**
 * Exact duality-gap surrogate
 *   Gap(x, lambda) = max_{x' in fair simplex} f(x', lambda)
 *                  - min_{||lambda'||_inf <= 2M} f(x, lambda').
 *
 * Both inner problems are closed form: with c = r + (I_hat - Gamma) lambda
 * the max allocates the mandatory mass rho_s to each state's best action
 * and the residual 1 - sum(rho) to the globally best pair (ties broken by
 * lowest flat index); the min is r^T x - 2M ||(I_hat - Gamma)^T x||_1.
 */
struct GapReport {
    double gap_value;
    double inner_max_value;
    double inner_min_value;
    std::vector<int> best_action_per_state;
    int best_pair;
};

GapReport gap(const MdpModel& model, const FairnessSpec& fairness, double M,
              const Vec& x, const Vec& lambda);

/**
 * Simultaneous-approximation metrics of a policy against a reference
 * optimum v_star: eps1 is the reward shortfall v_star - r^T (Pi nu), eps2
 * the worst relative fairness violation max_s (1 - nu_s / rho_s) over
 * states with rho_s > 0 (zero when no state is constrained). Either may be
 * negative.
 */
struct ApproximationReport {
    double eps1;
    double eps2;
};

ApproximationReport approximation_metrics(const MdpModel& model, const Policy& policy,
                                          const FairnessSpec& fairness, double v_star);

/**
 * Numerical audit of the dual-certificate bounds on a fair-action-augmented
 * model with all rho_s < 1/n:
 *  - mu_s* <= n rho_s / (1 - n rho_s) for every state;
 *  - ||lambda*||_inf <= 2 t (1 + d_rho) after recentering lambda* orthogonal
 *    to the optimal policy's stationary distribution, where t is the larger
 *    of the deterministic-policy mixing-time estimate and the optimal
 *    policy's own mixing time;
 *  - ||(I - P + 1 nu^T)^{-1}||_inf <= 2 t_P for the optimal policy's chain
 *    and `random_policy_checks` random policies.
 */
struct DualBoundAudit {
    bool mu_bound_holds;
    bool lambda_bound_holds;
    bool inverse_bound_holds;
    double mu_worst_slack;      // min over states of bound - mu_s
    double lambda_slack;        // bound - ||recentered lambda*||_inf
    double inverse_worst_slack; // min over checked chains of 2 t - norm
    int t_mix_estimate;
    double fair_value;
    bool all_hold() const {
        return mu_bound_holds && lambda_bound_holds && inverse_bound_holds;
    }
};

DualBoundAudit dual_bound_audit(const MdpModel& model, const FairnessSpec& fairness,
                                   RngStream& rng, int random_policy_checks = 10);

} // namespace fairmdp
