#include "fair_amdp/mdp.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <cmath>
#include <cstdio>

namespace fairmdp {

namespace {

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, v);
    return buf;
}

// Strong connectivity of the support graph s -> s' (any action), by two
// BFS passes on the graph and its reverse.
bool support_strongly_connected(const MdpModel& model) {
    const int n = model.n_states;
    auto reachable = [&](bool reverse) {
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const int s = stack.back();
            stack.pop_back();
            for (int t = 0; t < n; ++t) {
                if (seen[t]) continue;
                bool edge = false;
                for (int a = 0; a < model.n_actions && !edge; ++a) {
                    const int from = reverse ? t : s;
                    const int to = reverse ? s : t;
                    edge = model.transitions(model.pair_index(from, a), to) > 0.0;
                }
                if (edge) {
                    seen[t] = 1;
                    stack.push_back(t);
                }
            }
        }
        for (int s = 0; s < n; ++s)
            if (!seen[s]) return false;
        return true;
    };
    return reachable(false) && reachable(true);
}

} // namespace

ValidationReport validate_model(const MdpModel& model) {
    ValidationReport report;
    const int n = model.n_states;
    const int m = model.n_actions;
    if (n <= 0 || m <= 0) {
        report.violations.push_back("state and action counts must be positive");
        return report;
    }
    const int l = n * m;
    if (model.transitions.rows() != l || model.transitions.cols() != n) {
        report.violations.push_back(
            "transitions must be " + std::to_string(l) + "x" + std::to_string(n) +
            ", got " + std::to_string(model.transitions.rows()) + "x" +
            std::to_string(model.transitions.cols()));
        return report;
    }
    if (model.rewards.size() != l) {
        report.violations.push_back("rewards must have length " + std::to_string(l) +
                                    ", got " + std::to_string(model.rewards.size()));
        return report;
    }
    for (int i = 0; i < l; ++i) {
        const auto row = model.transitions.row(i);
        const double sum = row.sum();
        if (std::abs(sum - 1.0) > 1e-12)
            report.violations.push_back("transition row " + std::to_string(i) +
                                        " sums to " + fmt("%.15g", sum));
        if (row.minCoeff() < 0.0)
            report.violations.push_back("transition row " + std::to_string(i) +
                                        " has negative entry " +
                                        fmt("%.15g", row.minCoeff()));
        const double r = model.rewards[i];
        if (r < 0.0 || r > 1.0)
            report.violations.push_back("reward at pair " + std::to_string(i) +
                                        " is " + fmt("%.15g", r) +
                                        ", outside [0, 1]");
    }
    if (model.initial_distribution.size() != 0 &&
        model.initial_distribution.size() != n)
        report.violations.push_back("initial_distribution must have length " +
                                    std::to_string(n));
    if (report.ok() && !support_strongly_connected(model))
        report.warnings.push_back(
            "support graph is not strongly connected; some policies may induce "
            "non-ergodic chains");
    return report;
}

Mat induced_chain(const MdpModel& model, const Policy& policy) {
    const int n = model.n_states;
    const int m = model.n_actions;
    if (policy.probs.rows() != n || policy.probs.cols() != m)
        throw std::invalid_argument("policy dimensions do not match model");
    Mat chain = Mat::Zero(n, n);
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a)
            chain.row(s) += policy.probs(s, a) * model.transitions.row(model.pair_index(s, a));
    return chain;
}

StateDistribution stationary_distribution(const Mat& chain) {
    const int n = static_cast<int>(chain.rows());
    if (chain.cols() != n || n == 0)
        throw std::invalid_argument("chain must be square and non-empty");

    // Stack the balance equations with the normalization row and solve the
    // overdetermined system in the least-squares sense; for an ergodic chain
    // the solution is exact.
    Mat stacked(n + 1, n);
    stacked.topRows(n) = (Mat::Identity(n, n) - chain).transpose();
    stacked.bottomRows(1).setOnes();
    Vec rhs = Vec::Zero(n + 1);
    rhs[n] = 1.0;

    Eigen::ColPivHouseholderQR<Mat> qr(stacked);
    qr.setThreshold(1e-10);
    if (qr.rank() < n)
        throw SingularChainError(
            "chain is not ergodic: stationary system is rank deficient");
    Vec nu = qr.solve(rhs);

    const double residual = ((chain.transpose() * nu) - nu).cwiseAbs().maxCoeff();
    if (residual > 1e-10)
        throw SingularChainError("stationary solve residual " + std::to_string(residual) +
                                 " exceeds 1e-10");
    if (nu.minCoeff() < -1e-10)
        throw SingularChainError("stationary solution has negative mass");
    nu = nu.cwiseMax(0.0);
    nu /= nu.sum();
    return StateDistribution{std::move(nu)};
}

OccupancyMeasure occupancy_from_policy(const MdpModel& model, const Policy& policy) {
    const StateDistribution nu = stationary_distribution(induced_chain(model, policy));
    Vec x(model.pair_count());
    for (int s = 0; s < model.n_states; ++s)
        for (int a = 0; a < model.n_actions; ++a)
            x[model.pair_index(s, a)] = nu.mass[s] * policy.probs(s, a);
    return OccupancyMeasure{std::move(x)};
}

double average_reward(const MdpModel& model, const Policy& policy) {
    return model.rewards.dot(occupancy_from_policy(model, policy).mass);
}

Policy policy_from_occupancy(const Vec& x, int n_states, int n_actions) {
    if (x.size() != n_states * n_actions)
        throw std::invalid_argument("occupancy length does not match dimensions");
    Mat probs(n_states, n_actions);
    for (int s = 0; s < n_states; ++s) {
        double group = 0.0;
        for (int a = 0; a < n_actions; ++a) group += x[s * n_actions + a];
        if (group <= 0.0) {
            probs.row(s).setConstant(1.0 / n_actions);
        } else {
            for (int a = 0; a < n_actions; ++a)
                probs(s, a) = x[s * n_actions + a] / group;
        }
    }
    return Policy{std::move(probs)};
}

MdpModel augment_fair_action(const MdpModel& model) {
    const int n = model.n_states;
    const int m = model.n_actions;
    MdpModel out;
    out.n_states = n;
    out.n_actions = m + 1;
    out.transitions = Mat(n * (m + 1), n);
    out.rewards = Vec(n * (m + 1));
    out.initial_distribution = model.initial_distribution;
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < m; ++a) {
            out.transitions.row(out.pair_index(s, a)) =
                model.transitions.row(model.pair_index(s, a));
            out.rewards[out.pair_index(s, a)] = model.rewards[model.pair_index(s, a)];
        }
        out.transitions.row(out.pair_index(s, m)).setConstant(1.0 / n);
        out.rewards[out.pair_index(s, m)] = 0.0;
    }
    return out;
}

int mixing_time_of_policy(const Mat& chain, int ceiling) {
    const Vec nu = stationary_distribution(chain).mass;
    const int n = static_cast<int>(chain.rows());
    Mat power = chain;
    for (int t = 1; t <= ceiling; ++t) {
        double worst = 0.0;
        for (int s = 0; s < n; ++s)
            worst = std::max(worst, (power.row(s).transpose() - nu).cwiseAbs().sum());
        if (worst <= 0.5) return t;
        power = power * chain;
    }
    throw LimitError("mixing time exceeds ceiling " + std::to_string(ceiling));
}

int mixing_time_upper_estimate(const MdpModel& model, int policy_budget, int ceiling) {
    const int n = model.n_states;
    const int m = model.n_actions;
    double count = 1.0;
    for (int s = 0; s < n; ++s) count *= m;
    if (count > policy_budget)
        throw LimitError("deterministic policy count " + std::to_string(count) +
                         " exceeds budget " + std::to_string(policy_budget) +
                         "; supply the dual radius M manually");

    std::vector<int> actions(n, 0);
    int worst = 0;
    while (true) {
        Mat chain(n, n);
        for (int s = 0; s < n; ++s)
            chain.row(s) = model.transitions.row(model.pair_index(s, actions[s]));
        worst = std::max(worst, mixing_time_of_policy(chain, ceiling));
        // odometer over action assignments
        int pos = 0;
        while (pos < n && ++actions[pos] == m) actions[pos++] = 0;
        if (pos == n) break;
    }
    return worst;
}

double fundamental_inverse_norm(const Mat& chain, const Vec& nu) {
    const int n = static_cast<int>(chain.rows());
    Mat base = Mat::Identity(n, n) - chain + Vec::Ones(n) * nu.transpose();
    Eigen::FullPivLU<Mat> lu(base);
    if (!lu.isInvertible())
        throw SingularChainError("I - P + 1 nu^T is singular; chain is not ergodic");
    Mat inverse = lu.inverse();
    return inverse.cwiseAbs().rowwise().sum().maxCoeff();
}

} // namespace fairmdp
