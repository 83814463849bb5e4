#include "fair_amdp/evaluation.hpp"

#include "fair_amdp/smd.hpp"

#include <cmath>
#include <limits>

namespace fairmdp {

Vec exact_grad_x(const MdpModel& model, const Vec& lambda) {
    const int l = model.pair_count();
    Vec g(l);
    for (int idx = 0; idx < l; ++idx)
        g[idx] = model.transitions.row(idx).dot(lambda) -
                 lambda[model.pair_state(idx)] - model.rewards[idx];
    return g;
}

Vec exact_grad_lambda(const MdpModel& model, const Vec& x) {
    const int n = model.n_states;
    Vec g = Vec::Zero(n);
    for (int idx = 0; idx < model.pair_count(); ++idx) {
        g[model.pair_state(idx)] += x[idx];
        g -= x[idx] * model.transitions.row(idx).transpose();
    }
    return g;
}

double saddle_objective(const MdpModel& model, const Vec& x, const Vec& lambda) {
    return model.rewards.dot(x) + lambda.dot(exact_grad_lambda(model, x));
}

GapReport gap(const MdpModel& model, const FairnessSpec& fairness, double M,
              const Vec& x, const Vec& lambda) {
    const int n = model.n_states;
    const int m = model.n_actions;
    if (x.size() != model.pair_count() || lambda.size() != n ||
        fairness.rho.size() != n)
        throw std::invalid_argument("gap: dimension mismatch");
    if (x.minCoeff() < -1e-8 || std::abs(x.sum() - 1.0) > 1e-8)
        throw std::domain_error("gap: x is not on the simplex");
    for (int s = 0; s < n; ++s)
        if (x.segment(s * m, m).sum() < fairness.rho[s] - 1e-8)
            throw std::domain_error("gap: x violates the fairness floor of state " +
                                    std::to_string(s));
    if (lambda.cwiseAbs().maxCoeff() > 2.0 * M + 1e-8)
        throw std::domain_error("gap: lambda is outside the box");

    // c = r + (I_hat - Gamma) lambda = -exact_grad_x
    const Vec c = -exact_grad_x(model, lambda);

    GapReport report;
    report.best_action_per_state.resize(n);
    double inner_max = 0.0;
    for (int s = 0; s < n; ++s) {
        int best = 0;
        for (int a = 1; a < m; ++a)
            if (c[model.pair_index(s, a)] > c[model.pair_index(s, best)]) best = a;
        report.best_action_per_state[s] = best;
        inner_max += fairness.rho[s] * c[model.pair_index(s, best)];
    }
    int best_pair = 0;
    for (int idx = 1; idx < model.pair_count(); ++idx)
        if (c[idx] > c[best_pair]) best_pair = idx;
    report.best_pair = best_pair;
    inner_max += (1.0 - fairness.sum()) * c[best_pair];

    const double inner_min =
        model.rewards.dot(x) - 2.0 * M * exact_grad_lambda(model, x).cwiseAbs().sum();

    report.inner_max_value = inner_max;
    report.inner_min_value = inner_min;
    report.gap_value = inner_max - inner_min;
    return report;
}

ApproximationReport approximation_metrics(const MdpModel& model, const Policy& policy,
                                          const FairnessSpec& fairness, double v_star) {
    if (fairness.rho.size() != model.n_states)
        throw std::invalid_argument("approximation_metrics: fairness length mismatch");
    const OccupancyMeasure x = occupancy_from_policy(model, policy);
    ApproximationReport report;
    report.eps1 = v_star - model.rewards.dot(x.mass);
    report.eps2 = 0.0;
    bool any = false;
    for (int s = 0; s < model.n_states; ++s) {
        if (fairness.rho[s] <= 0.0) continue;
        const double nu_s = x.mass.segment(s * model.n_actions, model.n_actions).sum();
        const double violation = 1.0 - nu_s / fairness.rho[s];
        report.eps2 = any ? std::max(report.eps2, violation) : violation;
        any = true;
    }
    return report;
}

DualBoundAudit dual_bound_audit(const MdpModel& model, const FairnessSpec& fairness,
                                   RngStream& rng, int random_policy_checks) {
    const int n = model.n_states;
    const int m = model.n_actions;
    if (!fairness.strictly_below_uniform())
        throw std::invalid_argument("dual_bound_audit requires all rho_s < 1/n");

    const FairOptimal opt = fair_optimal(model, fairness);
    if (opt.status != LpStatus::optimal)
        throw std::runtime_error(std::string("dual_bound_audit: Fair-LP is ") +
                                 to_string(opt.status));

    DualBoundAudit report;
    report.fair_value = opt.value;

    double mu_slack = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n; ++s) {
        const double bound = n * fairness.rho[s] / (1.0 - n * fairness.rho[s]);
        mu_slack = std::min(mu_slack, bound - opt.mu[s]);
    }
    report.mu_worst_slack = mu_slack;
    report.mu_bound_holds = mu_slack >= -1e-8;

    const Mat chain = induced_chain(model, opt.policy);
    const Vec nu = stationary_distribution(chain).mass;
    const int t_opt = mixing_time_of_policy(chain);
    const int t_enum = mixing_time_upper_estimate(model);
    report.t_mix_estimate = std::max(t_opt, t_enum);

    const Vec lambda_centered = opt.lambda - Vec::Constant(n, opt.lambda.dot(nu));
    const double lambda_bound =
        2.0 * report.t_mix_estimate * (1.0 + rho_conditioning(fairness));
    report.lambda_slack = lambda_bound - lambda_centered.cwiseAbs().maxCoeff();
    report.lambda_bound_holds = report.lambda_slack >= -1e-8;

    double inv_slack = 2.0 * t_opt - fundamental_inverse_norm(chain, nu);
    for (int k = 0; k < random_policy_checks; ++k) {
        Policy policy{Mat(n, m)};
        for (int s = 0; s < n; ++s) {
            Vec row(m);
            for (int a = 0; a < m; ++a) row[a] = 0.05 + rng.next_uniform();
            policy.probs.row(s) = row.transpose() / row.sum();
        }
        const Mat pc = induced_chain(model, policy);
        const Vec pnu = stationary_distribution(pc).mass;
        inv_slack = std::min(inv_slack, 2.0 * mixing_time_of_policy(pc) -
                                            fundamental_inverse_norm(pc, pnu));
    }
    report.inverse_worst_slack = inv_slack;
    report.inverse_bound_holds = inv_slack >= -1e-8;
    return report;
}

} // namespace fairmdp
