#pragma once

#include "fair_amdp/mdp.hpp"
#include "fair_amdp/sampling.hpp"

#include <optional>
#include <vector>

namespace fairmdp {

enum class SmdMode { schedule, manual };

/**
 * Saddle-point solver configuration. In schedule mode the step sizes
 * and horizon satisfy eta_x <= eps / (8 l (24 M^2 + 1)), eta_lambda <=
 * eps / 16 and T >= max(8 log l / (eta_x eps), 32 M^2 n / (eta_lambda eps));
 * manual mode accepts any positive values (the experiment settings use
 * M = 100, eta = 0.01).
 */
struct SmdConfig {
    SmdMode mode = SmdMode::manual;
    double epsilon = 0.0; // meaningful in schedule mode
    double M = 0.0;       // dual box radius base; the box is [-2M, 2M]
    double eta_x = 0.0;
    double eta_lambda = 0.0;
    long long T = 0;
    uint64_t seed = 0;
    long long record_every = 100;
};

/// d_rho = max_s n / (1 - n rho_s). Throws when some rho_s >= 1/n.
double rho_conditioning(const FairnessSpec& fairness);

/// M = 2 t_mix (1 + d_rho).
double dual_radius_base(const FairnessSpec& fairness, int t_mix);

/**
 * Schedule-mode parameters for target accuracy epsilon, with the step-size
 * bounds taken with equality and T the smallest admissible horizon. M comes
 * from the override when provided, otherwise from t_mix via
 * dual_radius_base (which requires all rho_s < 1/n).
 */
SmdConfig compute_parameters(const MdpModel& model, const FairnessSpec& fairness,
                             double epsilon, std::optional<double> M_override,
                             std::optional<int> t_mix);

/// Single-nonzero gradient estimate for the x-space:
/// value l (lambda_{s'} - lambda_s - r_{s,a}) at flat index (s,a), with
/// (s,a) uniform and s' sampled from the oracle.
struct SparseGradX {
    int pair;
    double coeff;
};

/// Gradient estimate e_s - e_{s'} for the lambda-space, with (s,a) ~ x.
/// Zero vector when the draw self-loops.
struct SparseGradLambda {
    int s;
    int s_next;
};

SparseGradX estimate_grad_x(const GenerativeOracle& oracle, const Vec& lambda,
                            RngStream& rng);
SparseGradLambda estimate_grad_lambda(const GenerativeOracle& oracle, const Vec& x,
                                      RngStream& rng);

/**
 * Exact KL (I-projection) of y onto the fair simplex: the unique minimizer
 * of KL(x || y / sum y) over {x in simplex : sum_a x_{s,a} >= rho_s}.
 *
 * Group clamping: scale every free state group by a common factor sigma;
 * any group whose scaled mass falls below its floor is clamped to mass
 * exactly rho_s (within-group proportions preserved) and removed from the
 * free pool. Clamped groups stay clamped as sigma shrinks, so the loop
 * finishes in at most n passes.
 *
 * Requires y strictly positive and sum(rho) <= 1.
 */
Vec kl_project_fair_simplex(const Vec& y, const FairnessSpec& fairness);

/// Entropic mirror step x <- project(x . exp(-eta g)) over the fair simplex.
Vec mirror_step_x(const Vec& x, const SparseGradX& grad, double eta,
                  const FairnessSpec& fairness);

/// Euclidean prox over the box: componentwise clip of lambda - eta g.
Vec euclidean_step_lambda(const Vec& lambda, const SparseGradLambda& grad,
                          double eta, double M);

struct SaddleSnapshot {
    long long t;
    Vec x;
    Vec lambda;
    Vec x_avg;      // (1/t) sum_{i<=t} x_i
    Vec lambda_avg; // (1/t) sum_{i<=t} lambda_i
};

struct SmdResult {
    std::vector<SaddleSnapshot> trajectory;
    Vec x_avg;      // x^eps
    Vec lambda_avg; // lambda^eps
    Policy policy;  // pi^eps = policy_from_occupancy(x^eps)
    long long step_bound_violations = 0;
};

/**
 * Runs the averaged stochastic-mirror-descent saddle solver for T
 * iterations against the generative oracle. x_1 is the uniform vector
 * projected onto the fair simplex, lambda_1 = 0; each iteration draws the
 * lambda estimate, then the x estimate, from separate child streams, and
 * applies both updates simultaneously.
 *
 * step_bound_violations counts iterations where ||eta_x g~x||_inf exceeded
 * 1.79, the admissible range of the entropic step (manual-mode settings can
 * breach it; the derived schedule keeps it at or below 1/2).
 */
SmdResult run_smd(const GenerativeOracle& oracle, const FairnessSpec& fairness,
                  const SmdConfig& config);

} // namespace fairmdp
