// Acceptance suite: runs every acceptance criterion end to end and prints
// one pass/fail line each. Criteria touching the command-line interface
// invoke the real binary (path in argv[2]); instance files come from the
// directory in argv[1].

#include "fair_amdp/evaluation.hpp"
#include "fair_amdp/experiment.hpp"
#include "fair_amdp/instance_io.hpp"
#include "fair_amdp/lp.hpp"
#include "fair_amdp/smd.hpp"
#include "fair_amdp/svg_plot.hpp"
#include "oracles.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace fairmdp;
using nlohmann::json;

namespace {

std::string g_instance_dir = "instances";
std::string g_cli = "./fair-amdp";

struct CriterionResult {
    bool pass;
    std::string detail;
};

int run_cli(const std::string& args, const std::string& stdout_path,
            bool ci_mode = false) {
    std::string command;
    if (ci_mode) command += "FAIR_AMDP_CI=1 ";
    command += "\"" + g_cli + "\" " + args + " > \"" + stdout_path + "\" 2>acceptance_stderr.log";
    const int raw = std::system(command.c_str());
    return WEXITSTATUS(raw);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string figure2_path() { return g_instance_dir + "/figure2.json"; }

char detail_buffer[512];
template <typename... Args>
std::string fmt(const char* pattern, Args... args) {
    std::snprintf(detail_buffer, sizeof(detail_buffer), pattern, args...);
    return detail_buffer;
}

// 1. unconstrained baseline through the CLI, also gates the instance file
CriterionResult criterion_unconstrained_baseline() {
    const int code =
        run_cli("solve-lp \"" + figure2_path() + "\" --rho 0", "acceptance_lp.json");
    if (code != 0) return {false, "solve-lp exit code " + std::to_string(code)};
    const json out = json::parse(slurp("acceptance_lp.json"));
    const double value = out["value"].get<double>();
    const std::vector<double> nu = out["nu"].get<std::vector<double>>();
    const auto policy = out["policy"].get<std::vector<std::vector<double>>>();
    const bool deterministic_opt = policy[0][0] > 1.0 - 1e-9 &&
                                   policy[1][1] > 1.0 - 1e-9 &&
                                   policy[2][0] > 1.0 - 1e-9;
    const bool ok = std::abs(value - 0.526) <= 1e-3 && deterministic_opt &&
                    std::abs(nu[0] - 0.474) <= 5e-4 && std::abs(nu[1] - 0.435) <= 5e-4 &&
                    std::abs(nu[2] - 0.091) <= 5e-4;
    return {ok, fmt("value=%.6f nu=(%.4f, %.4f, %.4f) policy=(a0,a1,a0)=%d", value,
                    nu[0], nu[1], nu[2], deterministic_opt)};
}

// 2. simplex optimum vs exhaustive policy grid at step 0.01
CriterionResult criterion_fair_lp_vs_bruteforce() {
    const Instance instance = load_instance(figure2_path());
    Vec rho(3);
    rho << 0.1, 0.1, 0.25;
    const FairOptimal opt = fair_optimal(instance.model, FairnessSpec{rho});
    if (opt.status != LpStatus::optimal) return {false, "LP not optimal"};
    const double grid = oracles::grid_search_fair_value(instance.model, rho, 0.01);
    const Vec nu =
        stationary_distribution(induced_chain(instance.model, opt.policy)).mass;
    const bool ok = std::abs(opt.value - grid) <= 5e-3 && opt.value >= grid - 1e-9 &&
                    std::abs(nu[2] - 0.25) <= 1e-6;
    return {ok, fmt("lp=%.6f grid=%.6f diff=%.2e nu_s2=%.8f", opt.value, grid,
                    std::abs(opt.value - grid), nu[2])};
}

// 3. experiment reproduction: 20 seeds, manual schedule, through the CLI
CriterionResult criterion_experiment_reproduction() {
    const int code = run_cli("smd \"" + figure2_path() +
                                 "\" --manual --M 100 --eta-x 0.01 --eta-lambda 0.01 "
                                 "--iters 20000 --runs 20 --seed 12345 --jobs 4 "
                                 "--record-every 1000 --out acceptance_smd.csv",
                             "acceptance_smd_summary.json", true);
    if (code != 0) return {false, "smd exit code " + std::to_string(code)};
    const std::string csv = slurp("acceptance_smd.csv");
    const PlotSeries nu2 = aggregate_metric(csv, "nu_2");
    const PlotSeries reward = aggregate_metric(csv, "reward_policy");
    const PlotSeries gap_series = aggregate_metric(csv, "gap");
    const json summary = json::parse(slurp("acceptance_smd_summary.json"));
    const double v_star = summary["v_star_fair"].get<double>();

    double gap_1000 = -1.0, gap_final = -1.0, nu2_final = -1.0, reward_final = -1.0;
    for (size_t i = 0; i < gap_series.t.size(); ++i) {
        if (gap_series.t[i] == 1000) gap_1000 = gap_series.mean[i];
        if (gap_series.t[i] == 20000) {
            gap_final = gap_series.mean[i];
            nu2_final = nu2.mean[i];
            reward_final = reward.mean[i];
        }
    }
    const bool ok = nu2_final >= 0.24 && std::abs(reward_final - v_star) <= 0.02 &&
                    gap_final <= gap_1000 / 3.0;
    return {ok, fmt("nu_s2=%.4f |reward-v*|=%.4f gap(T)/gap(1000)=%.3f", nu2_final,
                    std::abs(reward_final - v_star), gap_final / gap_1000)};
}

// 4. floor sweep: per-value fairness attainment and monotone exact optimum
CriterionResult criterion_floor_sweep() {
    const int code = run_cli("sweep-rho \"" + figure2_path() +
                                 "\" --state 2 --values 0.1,0.15,0.2,0.25,0.3 "
                                 "--manual --M 100 --eta-x 0.01 --eta-lambda 0.01 "
                                 "--iters 10000 --runs 10 --seed 777 --jobs 4 "
                                 "--record-every 10000 --out acceptance_sweep",
                             "acceptance_sweep.json", true);
    if (code != 0) return {false, "sweep-rho exit code " + std::to_string(code)};
    const json entries = json::parse(slurp("acceptance_sweep.json"));
    if (entries.size() != 5) return {false, "expected 5 sweep entries"};
    double previous = 1.0;
    bool ok = true;
    std::string detail;
    for (const json& entry : entries) {
        if (entry["status"] != "ok") return {false, "sweep entry not ok"};
        const double rho_value = entry["rho_value"].get<double>();
        const double v_star = entry["v_star_fair"].get<double>();
        const double nu2 =
            entry["summary"]["metrics_at_final_t"]["nu_2"]["mean"].get<double>();
        ok = ok && nu2 >= rho_value - 0.02 && v_star <= previous + 1e-12;
        previous = v_star;
        detail += fmt("%.2f:%.3f ", rho_value, nu2);
    }
    return {ok, "final nu_s2 per floor: " + detail};
}

// 5. estimator suite: unbiasedness within 3 standard errors, hard bounds
CriterionResult criterion_estimator_suite() {
    const Instance instance = load_instance(figure2_path());
    const MdpModel& model = instance.model;
    const GenerativeOracle oracle(model);
    Vec rho(3);
    rho << 0.1, 0.1, 0.25;
    const double M = 100.0;
    const long long draws = 1000000;
    RngStream point_rng(20250809);

    long long bound_violations = 0;
    int mean_failures = 0;
    for (int point = 0; point < 5; ++point) {
        const Vec x = oracles::random_fair_point(rho, 3, 2, point_rng);
        Vec lambda(3);
        for (int s = 0; s < 3; ++s)
            lambda[s] = (2.0 * point_rng.next_uniform() - 1.0) * 2.0 * M;
        const Vec exact_x = exact_grad_x(model, lambda);
        const Vec exact_l = exact_grad_lambda(model, x);

        RngStream rng_x = point_rng.fork("acc-grad-x");
        RngStream rng_l = point_rng.fork("acc-grad-lambda");
        Vec sum_x = Vec::Zero(6), sq_x = Vec::Zero(6);
        Mat sum_l = Mat::Zero(3, 2);
        for (long long i = 0; i < draws; ++i) {
            const SparseGradX gx = estimate_grad_x(oracle, lambda, rng_x);
            bound_violations += std::abs(gx.coeff) > (4.0 * M + 1.0) * 6.0;
            sum_x[gx.pair] += gx.coeff;
            sq_x[gx.pair] += gx.coeff * gx.coeff;

            const SparseGradLambda gl = estimate_grad_lambda(oracle, x, rng_l);
            Vec value = Vec::Zero(3);
            if (gl.s != gl.s_next) {
                value[gl.s] = 1.0;
                value[gl.s_next] = -1.0;
            }
            bound_violations += value.squaredNorm() > 2.0;
            for (int s = 0; s < 3; ++s) {
                sum_l(s, 0) += value[s];
                sum_l(s, 1) += value[s] * value[s];
            }
        }
        for (int i = 0; i < 6; ++i) {
            const double mean = sum_x[i] / draws;
            const double var = sq_x[i] / draws - mean * mean;
            const double se = std::sqrt(std::max(var, 1e-12) / draws);
            mean_failures += std::abs(mean - exact_x[i]) > 3.0 * se;
        }
        for (int s = 0; s < 3; ++s) {
            const double mean = sum_l(s, 0) / draws;
            const double var = sum_l(s, 1) / draws - mean * mean;
            const double se = std::sqrt(std::max(var, 1e-12) / draws);
            mean_failures += std::abs(mean - exact_l[s]) > 3.0 * se;
        }
    }
    const bool ok = bound_violations == 0 && mean_failures == 0;
    return {ok, fmt("bound violations=%lld, 3-sigma mean failures=%d of 45",
                    bound_violations, mean_failures)};
}

// 6. projection suite: feasibility, KKT residual, value vs PG reference
CriterionResult criterion_projection_suite() {
    RngStream rng(606060);
    double worst_kkt = 0.0, worst_excess = -1.0;
    int failures = 0;
    for (int k = 0; k < 1000; ++k) {
        const int n = 2 + static_cast<int>(rng.next_uniform() * 3);
        const int m = 1 + static_cast<int>(rng.next_uniform() * 3);
        Vec y(n * m);
        for (int i = 0; i < y.size(); ++i) y[i] = 0.02 + rng.next_uniform();
        Vec rho(n);
        for (int s = 0; s < n; ++s) rho[s] = rng.next_uniform() * 2.0 / n;
        if (rho.sum() > 0.9) rho *= 0.9 / rho.sum();
        const FairnessSpec fairness{rho};

        const Vec x = kl_project_fair_simplex(y, fairness);
        const Vec p = y / y.sum();

        bool feasible = std::abs(x.sum() - 1.0) <= 1e-10 && x.minCoeff() > 0.0;
        double sigma = -1.0;
        std::vector<double> ratio(n);
        for (int s = 0; s < n; ++s) {
            const double group_x = x.segment(s * m, m).sum();
            feasible = feasible && group_x >= rho[s] - 1e-10;
            ratio[s] = group_x / p.segment(s * m, m).sum();
            if (group_x > rho[s] + 1e-9) sigma = ratio[s];
        }
        double kkt = 0.0;
        if (sigma > 0.0) {
            for (int s = 0; s < n; ++s) {
                const double mu = std::log(ratio[s] / sigma);
                kkt = std::max(kkt,
                               std::abs(mu * (x.segment(s * m, m).sum() - rho[s])));
                kkt = std::max(kkt, std::max(0.0, -mu)); // dual feasibility
            }
        }
        const Vec reference = oracles::kl_projection_reference(y, rho, n, 1e-12, 4000);
        const double excess = oracles::kl_value(x, y) - oracles::kl_value(reference, y);
        worst_kkt = std::max(worst_kkt, kkt);
        worst_excess = std::max(worst_excess, excess);
        failures += !feasible || kkt > 1e-9 || excess > 1e-6;
    }
    return {failures == 0, fmt("failures=%d worst KKT=%.2e worst value excess=%.2e",
                               failures, worst_kkt, worst_excess)};
}

// 7. dual-bound audit via the CLI on figure-2 and on 100 random instances
CriterionResult criterion_dual_bound_audit() {
    const int code = run_cli("audit \"" + figure2_path() +
                                 "\" --augment-fair-action --seed 4",
                             "acceptance_audit.json");
    if (code != 0) return {false, "audit exit code " + std::to_string(code)};

    RngStream rng(909090);
    int violations = 0;
    for (int k = 0; k < 100; ++k) {
        const int n = 2 + static_cast<int>(rng.next_uniform() * 5);  // n <= 6
        const int m = 1 + static_cast<int>(rng.next_uniform() * 3);  // m <= 3
        RngStream instance_rng = rng.fork(static_cast<uint64_t>(k));
        const MdpModel aug =
            augment_fair_action(random_ergodic_model(n, m, instance_rng));
        const FairnessSpec fairness = random_fairness(n, 0.8, instance_rng);
        const DualBoundAudit report = dual_bound_audit(aug, fairness, instance_rng);
        violations += !report.all_hold();
    }
    return {violations == 0,
            fmt("cli audit pass, random-instance violations=%d of 100", violations)};
}

// 8. policy -> occupancy -> policy round trip and flow balance
CriterionResult criterion_round_trip() {
    double worst_round_trip = 0.0, worst_flow = 0.0;
    RngStream rng(112358);
    const MdpModel figure2 = oracles::figure2();
    for (int k = 0; k < 200; ++k) {
        const MdpModel model =
            k < 100 ? figure2
                    : random_ergodic_model(2 + static_cast<int>(rng.next_uniform() * 5),
                                           1 + static_cast<int>(rng.next_uniform() * 3),
                                           rng);
        Policy policy{Mat(model.n_states, model.n_actions)};
        for (int s = 0; s < model.n_states; ++s) {
            Vec row(model.n_actions);
            for (int a = 0; a < model.n_actions; ++a) row[a] = 0.02 + rng.next_uniform();
            policy.probs.row(s) = row.transpose() / row.sum();
        }
        const OccupancyMeasure occ = occupancy_from_policy(model, policy);
        const Policy back =
            policy_from_occupancy(occ, model.n_states, model.n_actions);
        worst_round_trip = std::max(
            worst_round_trip, (back.probs - policy.probs).cwiseAbs().maxCoeff());
        worst_flow = std::max(
            worst_flow, exact_grad_lambda(model, occ.mass).cwiseAbs().maxCoeff());
    }
    const bool ok = worst_round_trip <= 1e-12 && worst_flow <= 1e-9;
    return {ok, fmt("worst round trip=%.2e worst flow residual=%.2e", worst_round_trip,
                    worst_flow)};
}

// 9. byte-identical CSV for one seed regardless of the worker count
CriterionResult criterion_determinism() {
    const std::string base_args = "smd \"" + figure2_path() +
                                  "\" --manual --M 100 --eta-x 0.01 --eta-lambda 0.01 "
                                  "--iters 3000 --runs 6 --seed 7 --record-every 500 ";
    int code = run_cli(base_args + "--jobs 1 --out acceptance_det_a.csv",
                       "acceptance_det_a.json", true);
    if (code != 0) return {false, "jobs=1 exit code " + std::to_string(code)};
    code = run_cli(base_args + "--jobs 4 --out acceptance_det_b.csv",
                   "acceptance_det_b.json", true);
    if (code != 0) return {false, "jobs=4 exit code " + std::to_string(code)};
    const std::string a = slurp("acceptance_det_a.csv");
    const std::string b = slurp("acceptance_det_b.csv");
    const bool ok = !a.empty() && a == b;
    return {ok, fmt("csv bytes=%zu identical=%d", a.size(), a == b)};
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_instance_dir = argv[1];
    if (argc > 2) g_cli = argv[2];

    struct Entry {
        const char* name;
        double time_limit_s;
        std::function<CriterionResult()> run;
    };
    const std::vector<Entry> criteria{
        {"1. unconstrained baseline (LP, figure-2 gate)", 1.0,
         criterion_unconstrained_baseline},
        {"2. fair LP vs policy-grid brute force", 120.0,
         criterion_fair_lp_vs_bruteforce},
        {"3. experiment reproduction (20 seeds)", 600.0,
         criterion_experiment_reproduction},
        {"4. floor sweep (5 values x 10 runs)", 1200.0, criterion_floor_sweep},
        {"5. estimator suite (10^6 draws x 5 points)", 0.0,
         criterion_estimator_suite},
        {"6. projection suite (1000 instances)", 0.0, criterion_projection_suite},
        {"7. dual-bound audit (figure-2 + 100 random)", 0.0, criterion_dual_bound_audit},
        {"8. occupancy round trip (200 policies)", 0.0, criterion_round_trip},
        {"9. deterministic CSV across worker counts", 0.0, criterion_determinism},
    };

    int failed = 0;
    for (const Entry& entry : criteria) {
        const auto start = std::chrono::steady_clock::now();
        CriterionResult result;
        try {
            result = entry.run();
        } catch (const std::exception& e) {
            result = {false, std::string("exception: ") + e.what()};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        if (entry.time_limit_s > 0.0 && seconds > entry.time_limit_s) {
            result.pass = false;
            result.detail += fmt(" [over time limit %.0fs]", entry.time_limit_s);
        }
        failed += !result.pass;
        std::printf("[%s] %s (%.2fs) %s\n", result.pass ? "PASS" : "FAIL", entry.name,
                    seconds, result.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu acceptance criteria passed\n",
                static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
