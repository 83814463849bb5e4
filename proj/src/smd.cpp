#include "fair_amdp/smd.hpp"

#include <cmath>
#include <iostream>

namespace fairmdp {

double rho_conditioning(const FairnessSpec& fairness) {
    const int n = static_cast<int>(fairness.rho.size());
    double worst = 0.0;
    for (int s = 0; s < n; ++s) {
        const double margin = 1.0 - n * fairness.rho[s];
        if (margin <= 0.0)
            throw std::invalid_argument(
                "rho_" + std::to_string(s) +
                " >= 1/n: d_rho is undefined, supply the dual radius M manually");
        worst = std::max(worst, n / margin);
    }
    return worst;
}

double dual_radius_base(const FairnessSpec& fairness, int t_mix) {
    return 2.0 * t_mix * (1.0 + rho_conditioning(fairness));
}

SmdConfig compute_parameters(const MdpModel& model, const FairnessSpec& fairness,
                             double epsilon, std::optional<double> M_override,
                             std::optional<int> t_mix) {
    if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
    const int n = model.n_states;
    const int l = model.pair_count();
    SmdConfig config;
    config.mode = SmdMode::schedule;
    config.epsilon = epsilon;
    if (M_override) {
        config.M = *M_override;
    } else if (t_mix) {
        config.M = dual_radius_base(fairness, *t_mix);
    } else {
        throw std::invalid_argument("either M or t_mix is required");
    }
    const double M2 = config.M * config.M;
    config.eta_x = epsilon / (8.0 * l * (24.0 * M2 + 1.0));
    config.eta_lambda = epsilon / 16.0;
    const double horizon = std::max(8.0 * std::log(static_cast<double>(l)) /
                                        (config.eta_x * epsilon),
                                    32.0 * M2 * n / (config.eta_lambda * epsilon));
    config.T = static_cast<long long>(std::ceil(horizon));
    return config;
}

SparseGradX estimate_grad_x(const GenerativeOracle& oracle, const Vec& lambda,
                            RngStream& rng) {
    const int l = oracle.pair_count();
    const int pair = sample_pair_uniform(l, rng);
    const int s = pair / oracle.n_actions();
    const SampleOutcome outcome = oracle.sample_pair(pair, rng);
    const double coeff = l * (lambda[outcome.next_state] - lambda[s] - outcome.reward);
    return SparseGradX{pair, coeff};
}

SparseGradLambda estimate_grad_lambda(const GenerativeOracle& oracle, const Vec& x,
                                      RngStream& rng) {
    const int pair = sample_pair_from(x, rng);
    const int s = pair / oracle.n_actions();
    const SampleOutcome outcome = oracle.sample_pair(pair, rng);
    return SparseGradLambda{s, outcome.next_state};
}

Vec kl_project_fair_simplex(const Vec& y, const FairnessSpec& fairness) {
    const int n = static_cast<int>(fairness.rho.size());
    const int l = static_cast<int>(y.size());
    if (n <= 0 || l % n != 0)
        throw std::invalid_argument("y length must be a multiple of the state count");
    if (y.minCoeff() <= 0.0)
        throw std::invalid_argument("projection input must be strictly positive");
    if (fairness.sum() > 1.0 + 1e-12)
        throw std::invalid_argument("fairness floors sum to more than 1");
    const int m = l / n;

    Vec p = y / y.sum();
    Vec group(n);
    for (int s = 0; s < n; ++s) group[s] = p.segment(s * m, m).sum();

    std::vector<char> clamped(n, 0);
    while (true) {
        double free_rho = 0.0, free_mass = 0.0;
        int n_free = 0;
        for (int s = 0; s < n; ++s) {
            if (clamped[s]) continue;
            free_rho += fairness.rho[s];
            free_mass += group[s];
            ++n_free;
        }
        if (n_free == 0) break;
        double clamped_rho = 0.0;
        for (int s = 0; s < n; ++s)
            if (clamped[s]) clamped_rho += fairness.rho[s];
        const double sigma = (1.0 - clamped_rho) / free_mass;
        bool changed = false;
        for (int s = 0; s < n; ++s) {
            if (clamped[s]) continue;
            if (sigma * group[s] < fairness.rho[s]) {
                clamped[s] = 1;
                changed = true;
            }
        }
        if (!changed) {
            for (int s = 0; s < n; ++s)
                if (!clamped[s]) p.segment(s * m, m) *= sigma;
            break;
        }
    }
    for (int s = 0; s < n; ++s)
        if (clamped[s]) p.segment(s * m, m) *= fairness.rho[s] / group[s];
    // keep iterates strictly positive for the next multiplicative update
    return p.cwiseMax(1e-300);
}

Vec mirror_step_x(const Vec& x, const SparseGradX& grad, double eta,
                  const FairnessSpec& fairness) {
    Vec y = x;
    y[grad.pair] = std::max(x[grad.pair] * std::exp(-eta * grad.coeff), 1e-300);
    return kl_project_fair_simplex(y, fairness);
}

Vec euclidean_step_lambda(const Vec& lambda, const SparseGradLambda& grad,
                          double eta, double M) {
    Vec out = lambda;
    if (grad.s != grad.s_next) {
        out[grad.s] -= eta;
        out[grad.s_next] += eta;
    }
    return out.cwiseMax(-2.0 * M).cwiseMin(2.0 * M);
}

SmdResult run_smd(const GenerativeOracle& oracle, const FairnessSpec& fairness,
                  const SmdConfig& config) {
    if (config.T < 1) throw std::invalid_argument("iteration count T must be >= 1");
    if (config.eta_x <= 0.0 || config.eta_lambda <= 0.0 || config.M <= 0.0)
        throw std::invalid_argument("step sizes and M must be positive");
    const int n = oracle.n_states();
    const int l = oracle.pair_count();
    const long long stride = config.record_every > 0 ? config.record_every : config.T;

    RngStream root(config.seed);
    RngStream rng_x = root.fork("grad-x");
    RngStream rng_lambda = root.fork("grad-lambda");

    Vec x = kl_project_fair_simplex(Vec::Constant(l, 1.0 / l), fairness);
    Vec lambda = Vec::Zero(n);
    Vec x_sum = Vec::Zero(l);
    Vec lambda_sum = Vec::Zero(n);

    SmdResult result;
    for (long long t = 1; t <= config.T; ++t) {
        x_sum += x;
        lambda_sum += lambda;
        if (t == 1 || t % stride == 0 || t == config.T)
            result.trajectory.push_back(SaddleSnapshot{
                t, x, lambda, x_sum / static_cast<double>(t),
                lambda_sum / static_cast<double>(t)});

        const SparseGradLambda g_lambda = estimate_grad_lambda(oracle, x, rng_lambda);
        const SparseGradX g_x = estimate_grad_x(oracle, lambda, rng_x);
        if (std::abs(config.eta_x * g_x.coeff) > 1.79) {
            if (result.step_bound_violations == 0)
                std::cerr << "fair-amdp: warning: ||eta_x g~x||_inf = "
                          << std::abs(config.eta_x * g_x.coeff)
                          << " exceeds the entropic step range 1.79\n";
            ++result.step_bound_violations;
        }
        x = mirror_step_x(x, g_x, config.eta_x, fairness);
        lambda = euclidean_step_lambda(lambda, g_lambda, config.eta_lambda, config.M);
    }

    result.x_avg = x_sum / static_cast<double>(config.T);
    result.lambda_avg = lambda_sum / static_cast<double>(config.T);
    result.policy = policy_from_occupancy(result.x_avg, n, oracle.n_actions());
    return result;
}

} // namespace fairmdp
