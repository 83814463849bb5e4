#include "fair_amdp/evaluation.hpp"
#include "fair_amdp/experiment.hpp"
#include "fair_amdp/instance_io.hpp"
#include "fair_amdp/lp.hpp"
#include "fair_amdp/smd.hpp"
#include "fair_amdp/svg_plot.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace fairmdp;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUser = 2;

bool ci_mode() {
    const char* value = std::getenv("FAIR_AMDP_CI");
    return value != nullptr && std::string(value) == "1";
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::istringstream in(text);
    std::string token;
    while (std::getline(in, token, ',')) {
        if (token.empty()) continue;
        size_t used = 0;
        values.push_back(std::stod(token, &used));
        if (used != token.size())
            throw std::invalid_argument("not a number: " + token);
    }
    if (values.empty()) throw std::invalid_argument("empty number list");
    return values;
}

// "--rho 0.3" broadcasts, "--rho 0.1,0.1,0.25" is per state
FairnessSpec resolve_fairness(const Instance& instance, const std::string& rho_flag) {
    const int n = instance.model.n_states;
    if (!rho_flag.empty()) {
        std::vector<double> values = parse_double_list(rho_flag);
        if (values.size() == 1) values.assign(n, values[0]);
        if (static_cast<int>(values.size()) != n)
            throw std::invalid_argument("--rho needs 1 or n values");
        Vec rho(n);
        for (int s = 0; s < n; ++s) rho[s] = values[s];
        return FairnessSpec{std::move(rho)};
    }
    if (instance.rho) return *instance.rho;
    return FairnessSpec::zero(n);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

json policy_json(const Policy& policy) {
    json rows = json::array();
    for (int s = 0; s < policy.probs.rows(); ++s) {
        json row = json::array();
        for (int a = 0; a < policy.probs.cols(); ++a) row.push_back(policy.probs(s, a));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vec_json(const Vec& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

int cmd_solve_lp(const std::string& instance_path, const std::string& rho_flag,
                 bool augment) {
    Instance instance = load_instance(instance_path);
    FairnessSpec fairness = resolve_fairness(instance, rho_flag);
    MdpModel model = instance.model;
    if (augment) model = augment_fair_action(model);

    const FairOptimal opt = fair_optimal(model, fairness);
    json out;
    out["status"] = to_string(opt.status);
    if (opt.status == LpStatus::optimal) {
        out["value"] = opt.value;
        out["x"] = vec_json(opt.occupancy.mass);
        out["policy"] = policy_json(opt.policy);
        const Vec nu = stationary_distribution(induced_chain(model, opt.policy)).mass;
        out["nu"] = vec_json(nu);
        out["lambda"] = vec_json(opt.lambda);
        out["mu"] = vec_json(opt.mu);
        out["beta"] = opt.beta;
    }
    std::cout << out.dump(2) << "\n";
    return opt.status == LpStatus::optimal ? kExitOk : kExitUser;
}

struct SmdFlags {
    std::string rho;
    bool augment = false;
    double epsilon = 0.0;
    bool manual = false;
    double M = 0.0;
    double eta_x = 0.0;
    double eta_lambda = 0.0;
    long long iters = 0;
    uint64_t seed = 0;
    bool seed_given = false;
    int runs = 1;
    int jobs = 1;
    long long record_every = 100;
    std::string out = "smd_runs.csv";
};

SmdConfig make_smd_config(const MdpModel& model, const FairnessSpec& fairness,
                          const SmdFlags& flags) {
    if (flags.manual && flags.epsilon > 0.0)
        throw std::invalid_argument("--epsilon and --manual are mutually exclusive");
    if (flags.manual) {
        if (flags.M <= 0.0 || flags.eta_x <= 0.0 || flags.eta_lambda <= 0.0 ||
            flags.iters < 1)
            throw std::invalid_argument(
                "--manual requires positive --M, --eta-x, --eta-lambda, --iters");
        SmdConfig config;
        config.mode = SmdMode::manual;
        config.M = flags.M;
        config.eta_x = flags.eta_x;
        config.eta_lambda = flags.eta_lambda;
        config.T = flags.iters;
        config.record_every = flags.record_every;
        return config;
    }
    if (flags.epsilon <= 0.0)
        throw std::invalid_argument("exactly one of --epsilon or --manual is required");
    std::optional<double> M_override;
    if (flags.M > 0.0) M_override = flags.M;
    std::optional<int> t_mix;
    if (!M_override) t_mix = mixing_time_upper_estimate(model);
    SmdConfig config =
        compute_parameters(model, fairness, flags.epsilon, M_override, t_mix);
    config.record_every = flags.record_every;
    return config;
}

int cmd_smd(const std::string& instance_path, const SmdFlags& flags) {
    if (ci_mode() && !flags.seed_given)
        throw std::invalid_argument("FAIR_AMDP_CI=1 requires an explicit --seed");
    Instance instance = load_instance(instance_path);
    FairnessSpec fairness = resolve_fairness(instance, flags.rho);
    MdpModel model = instance.model;
    if (flags.augment) model = augment_fair_action(model);

    ExperimentConfig config;
    config.smd = make_smd_config(model, fairness, flags);
    config.base_seed = flags.seed;
    config.runs = flags.runs;
    config.jobs = flags.jobs;
    config.zero_wall_ms = ci_mode();

    const ExperimentOutput output = run_experiment(model, fairness, config);
    write_file(flags.out, output.csv);
    std::cout << output.summary_json;
    return kExitOk;
}

int cmd_sweep_rho(const std::string& instance_path, const SmdFlags& flags,
                  int state_index, const std::string& values_flag,
                  bool allow_near_boundary) {
    if (ci_mode() && !flags.seed_given)
        throw std::invalid_argument("FAIR_AMDP_CI=1 requires an explicit --seed");
    Instance instance = load_instance(instance_path);
    FairnessSpec fairness = resolve_fairness(instance, flags.rho);
    MdpModel model = instance.model;
    if (flags.augment) model = augment_fair_action(model);

    const std::vector<double> values = parse_double_list(values_flag);
    ExperimentConfig config;
    config.smd = make_smd_config(model, fairness, flags);
    config.base_seed = flags.seed;
    config.runs = flags.runs;
    config.jobs = flags.jobs;
    config.zero_wall_ms = ci_mode();

    const std::vector<SweepEntry> entries =
        run_sweep(model, fairness, state_index, values, config, allow_near_boundary);

    std::string base = flags.out;
    if (base.size() > 4 && base.substr(base.size() - 4) == ".csv")
        base = base.substr(0, base.size() - 4);
    char buf[32];
    for (const SweepEntry& entry : entries) {
        if (entry.skipped) {
            std::cerr << "fair-amdp: warning: rho value " << entry.rho_value
                      << " is >= 1/n, skipped (use --allow-near-boundary)\n";
            continue;
        }
        if (!entry.feasible) {
            std::cerr << "fair-amdp: rho value " << entry.rho_value << " is infeasible\n";
            continue;
        }
        std::snprintf(buf, sizeof(buf), "%g", entry.rho_value);
        write_file(base + "_rho_" + buf + ".csv", entry.output.csv);
    }
    const std::string summary = sweep_summary_json(entries);
    write_file(base + "_summary.json", summary);
    std::cout << summary;
    return kExitOk;
}

int cmd_plot(const std::string& csv_path, const std::string& metrics,
             const std::string& out_path) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open CSV file: " + csv_path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::vector<PlotSeries> series;
    std::istringstream names(metrics);
    std::string name;
    while (std::getline(names, name, ','))
        if (!name.empty()) series.push_back(aggregate_metric(buffer.str(), name));
    if (series.empty()) throw std::invalid_argument("no metric given");
    write_file(out_path, render_line_chart(series));
    return kExitOk;
}

struct RandomSpec {
    int n = 0;
    int m = 0;
    int count = 1;
};

RandomSpec parse_random_tokens(const std::vector<std::string>& tokens) {
    RandomSpec spec;
    for (const std::string& token : tokens) {
        const size_t eq = token.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--random expects key=value tokens, got " + token);
        const std::string key = token.substr(0, eq);
        const int value = std::stoi(token.substr(eq + 1));
        if (key == "n")
            spec.n = value;
        else if (key == "m")
            spec.m = value;
        else if (key == "count")
            spec.count = value;
        else
            throw std::invalid_argument("--random: unknown key " + key);
    }
    if (spec.n < 2 || spec.m < 1 || spec.count < 1)
        throw std::invalid_argument("--random needs n>=2, m>=1, count>=1");
    return spec;
}

// occupancy round-trip consistency checks plus the dual-bound audit
json audit_one(const MdpModel& model, const FairnessSpec& fairness, RngStream& rng) {
    json report;
    const ValidationReport validation = validate_model(model);
    report["validation_violations"] = validation.violations;
    report["validation_warnings"] = validation.warnings;
    bool ok = validation.ok();

    double round_trip_err = 0.0, flow_err = 0.0;
    const int n = model.n_states, m = model.n_actions;
    for (int k = 0; k < 20; ++k) {
        Policy policy{Mat(n, m)};
        for (int s = 0; s < n; ++s) {
            Vec row(m);
            for (int a = 0; a < m; ++a) row[a] = 0.05 + rng.next_uniform();
            policy.probs.row(s) = row.transpose() / row.sum();
        }
        const OccupancyMeasure occ = occupancy_from_policy(model, policy);
        const Policy back = policy_from_occupancy(occ, n, m);
        round_trip_err =
            std::max(round_trip_err, (back.probs - policy.probs).cwiseAbs().maxCoeff());
        flow_err = std::max(
            flow_err, exact_grad_lambda(model, occ.mass).cwiseAbs().maxCoeff());
    }
    report["policy_round_trip_max_err"] = round_trip_err;
    report["flow_balance_max_err"] = flow_err;
    ok = ok && round_trip_err <= 1e-12 && flow_err <= 1e-9;

    const DualBoundAudit audit = dual_bound_audit(model, fairness, rng);
    report["mu_bound_holds"] = audit.mu_bound_holds;
    report["lambda_bound_holds"] = audit.lambda_bound_holds;
    report["inverse_bound_holds"] = audit.inverse_bound_holds;
    report["mu_worst_slack"] = audit.mu_worst_slack;
    report["lambda_slack"] = audit.lambda_slack;
    report["inverse_worst_slack"] = audit.inverse_worst_slack;
    report["t_mix_estimate"] = audit.t_mix_estimate;
    report["fair_value"] = audit.fair_value;
    ok = ok && audit.all_hold();
    report["ok"] = ok;
    return report;
}

int cmd_audit(const std::string& instance_path, const std::string& rho_flag,
              bool augment, const std::vector<std::string>& random_tokens,
              uint64_t seed, bool seed_given) {
    // the audit draws random policies even on a fixed instance
    if (ci_mode() && !seed_given)
        throw std::invalid_argument("FAIR_AMDP_CI=1 requires an explicit --seed");
    RngStream rng(seed);
    json reports = json::array();
    bool all_ok = true;

    if (!random_tokens.empty()) {
        const RandomSpec spec = parse_random_tokens(random_tokens);
        for (int i = 0; i < spec.count; ++i) {
            RngStream instance_rng = rng.fork(static_cast<uint64_t>(i));
            const MdpModel model = random_ergodic_model(spec.n, spec.m, instance_rng);
            const FairnessSpec fairness =
                random_fairness(spec.n, 0.8, instance_rng);
            const json report =
                audit_one(augment_fair_action(model), fairness, instance_rng);
            all_ok = all_ok && report["ok"].get<bool>();
            reports.push_back(report);
        }
    } else {
        if (instance_path.empty())
            throw std::invalid_argument("audit needs an instance file or --random");
        Instance instance = load_instance(instance_path);
        FairnessSpec fairness = resolve_fairness(instance, rho_flag);
        MdpModel model = instance.model;
        if (augment) model = augment_fair_action(model);
        const json report = audit_one(model, fairness, rng);
        all_ok = report["ok"].get<bool>();
        reports.push_back(report);
    }

    json out;
    out["audits"] = std::move(reports);
    out["all_ok"] = all_ok;
    std::cout << out.dump(2) << "\n";
    return all_ok ? kExitOk : kExitInternal;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fair-AMDP: average-reward MDPs under state-visitation floors"};
    app.require_subcommand(1);

    std::string instance_path, rho_flag, values_flag, metric, csv_path;
    std::string plot_out = "plot.svg";
    bool augment = false, allow_near_boundary = false;
    int state_index = 0;
    std::vector<std::string> random_tokens;
    SmdFlags flags;

    CLI::App* solve = app.add_subcommand("solve-lp", "exact Fair-LP solve");
    solve->add_option("instance", instance_path)->required();
    solve->add_option("--rho", rho_flag, "fairness floors (scalar or comma list)");
    solve->add_flag("--augment-fair-action", augment);

    auto add_smd_flags = [&](CLI::App* cmd) {
        cmd->add_option("instance", instance_path)->required();
        cmd->add_option("--rho", flags.rho);
        cmd->add_flag("--augment-fair-action", flags.augment);
        cmd->add_option("--epsilon", flags.epsilon, "schedule-mode target accuracy");
        cmd->add_flag("--manual", flags.manual, "use explicit step sizes and horizon");
        cmd->add_option("--M", flags.M, "dual box radius base");
        cmd->add_option("--eta-x", flags.eta_x);
        cmd->add_option("--eta-lambda", flags.eta_lambda);
        cmd->add_option("--iters", flags.iters);
        cmd->add_option("--seed", flags.seed)->each([&](const std::string&) {
            flags.seed_given = true;
        });
        cmd->add_option("--runs", flags.runs);
        cmd->add_option("--jobs", flags.jobs);
        cmd->add_option("--record-every", flags.record_every);
        cmd->add_option("--out", flags.out);
    };

    CLI::App* smd = app.add_subcommand("smd", "stochastic mirror descent runs");
    add_smd_flags(smd);

    CLI::App* sweep = app.add_subcommand("sweep-rho", "re-run over a floor sweep");
    add_smd_flags(sweep);
    sweep->add_option("--state", state_index, "state whose floor is swept")->required();
    sweep->add_option("--values", values_flag, "comma list of floor values")->required();
    sweep->add_flag("--allow-near-boundary", allow_near_boundary);

    CLI::App* plot = app.add_subcommand("plot", "render a metric as an SVG chart");
    plot->add_option("csv", csv_path)->required();
    plot->add_option("--metric", metric)->required();
    plot->add_option("--out", plot_out);

    CLI::App* audit = app.add_subcommand("audit", "dual-bound and round-trip audit");
    audit->add_option("instance", instance_path);
    audit->add_option("--rho", rho_flag);
    audit->add_flag("--augment-fair-action", augment);
    audit->add_option("--random", random_tokens,
                      "generate instances: n=<states> m=<actions> count=<k>");
    audit->add_option("--seed", flags.seed)->each([&](const std::string&) {
        flags.seed_given = true;
    });

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve_lp(instance_path, rho_flag, augment);
        if (smd->parsed()) return cmd_smd(instance_path, flags);
        if (sweep->parsed())
            return cmd_sweep_rho(instance_path, flags, state_index, values_flag,
                                 allow_near_boundary);
        if (plot->parsed()) return cmd_plot(csv_path, metric, plot_out);
        if (audit->parsed())
            return cmd_audit(instance_path, rho_flag, augment, random_tokens,
                             flags.seed, flags.seed_given);
    } catch (const ParseError& e) {
        std::cerr << "fair-amdp: " << e.what() << "\n";
        return kExitUser;
    } catch (const std::invalid_argument& e) {
        std::cerr << "fair-amdp: " << e.what() << "\n";
        return kExitUser;
    } catch (const std::domain_error& e) {
        std::cerr << "fair-amdp: " << e.what() << "\n";
        return kExitUser;
    } catch (const LimitError& e) {
        std::cerr << "fair-amdp: " << e.what() << "\n";
        return kExitUser;
    } catch (const std::exception& e) {
        std::cerr << "fair-amdp: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUser;
}
