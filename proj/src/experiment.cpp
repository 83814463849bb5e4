#include "fair_amdp/experiment.hpp"

#include "fair_amdp/lp.hpp"

#include <json.hpp>

#include <atomic>
#include <mutex>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

namespace fairmdp {

using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct Row {
    uint64_t seed;
    long long t;
    double reward_policy;
    double reward_xbar;
    Vec nu;
    double gap_value;
    double eps1;
    double eps2;
    long long wall_ms;
};

std::string format_row(const Row& row) {
    std::string out = std::to_string(row.seed) + "," + std::to_string(row.t) + "," +
                      num(row.reward_policy) + "," + num(row.reward_xbar);
    for (int s = 0; s < row.nu.size(); ++s) out += "," + num(row.nu[s]);
    out += "," + num(row.gap_value) + "," + num(row.eps1) + "," + num(row.eps2) + "," +
           std::to_string(row.wall_ms) + "\n";
    return out;
}

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;
};

Stats stats_of(const std::vector<double>& values) {
    Stats s;
    if (values.empty()) return s;
    for (const double v : values) s.mean += v;
    s.mean /= values.size();
    double var = 0.0;
    for (const double v : values) var += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(var / values.size());
    return s;
}

json config_json(const SmdConfig& config) {
    json j;
    j["mode"] = config.mode == SmdMode::schedule ? "schedule" : "manual";
    if (config.mode == SmdMode::schedule) j["epsilon"] = config.epsilon;
    j["M"] = config.M;
    j["eta_x"] = config.eta_x;
    j["eta_lambda"] = config.eta_lambda;
    j["iters"] = config.T;
    j["record_every"] = config.record_every;
    return j;
}

} // namespace

std::string run_record_header(int n_states) {
    std::string header = "seed,t,reward_policy,reward_xbar";
    for (int s = 0; s < n_states; ++s) header += ",nu_" + std::to_string(s);
    header += ",gap,eps1,eps2,wall_ms\n";
    return header;
}

uint64_t run_seed(uint64_t base_seed, int run_index) {
    return RngStream(base_seed).fork(static_cast<uint64_t>(run_index)).seed();
}

ExperimentOutput run_experiment(const MdpModel& model, const FairnessSpec& fairness,
                                const ExperimentConfig& config) {
    const FairOptimal opt = fair_optimal(model, fairness);
    if (opt.status != LpStatus::optimal)
        throw std::runtime_error(std::string("Fair-LP is ") + to_string(opt.status) +
                                 "; exact reference value is unavailable");
    const double v_star = opt.value;
    const int n = model.n_states;
    const GenerativeOracle oracle(model);

    std::vector<std::vector<Row>> per_run(config.runs);

    auto run_one = [&](int run) {
        const auto started = std::chrono::steady_clock::now();
        SmdConfig smd = config.smd;
        smd.seed = run_seed(config.base_seed, run);
        const SmdResult result = run_smd(oracle, fairness, smd);
        std::vector<Row>& rows = per_run[run];
        rows.reserve(result.trajectory.size());
        for (const SaddleSnapshot& snap : result.trajectory) {
            Row row;
            row.seed = smd.seed;
            row.t = snap.t;
            const Policy policy = policy_from_occupancy(snap.x_avg, n, model.n_actions);
            const OccupancyMeasure occ = occupancy_from_policy(model, policy);
            row.reward_policy = model.rewards.dot(occ.mass);
            row.reward_xbar = model.rewards.dot(snap.x_avg);
            row.nu = Vec(n);
            for (int s = 0; s < n; ++s)
                row.nu[s] = occ.mass.segment(s * model.n_actions, model.n_actions).sum();
            row.gap_value =
                gap(model, fairness, config.smd.M, snap.x_avg, snap.lambda_avg).gap_value;
            row.eps1 = v_star - row.reward_policy;
            row.eps2 = 0.0;
            bool any = false;
            for (int s = 0; s < n; ++s) {
                if (fairness.rho[s] <= 0.0) continue;
                const double violation = 1.0 - row.nu[s] / fairness.rho[s];
                row.eps2 = any ? std::max(row.eps2, violation) : violation;
                any = true;
            }
            row.wall_ms = config.zero_wall_ms
                              ? 0
                              : std::chrono::duration_cast<std::chrono::milliseconds>(
                                    std::chrono::steady_clock::now() - started)
                                    .count();
            rows.push_back(std::move(row));
        }
    };

    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        while (true) {
            const int run = next.fetch_add(1);
            if (run >= config.runs) return;
            try {
                run_one(run);
            } catch (...) {
                const std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const int n_workers = std::max(1, std::min(config.jobs, config.runs));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    ExperimentOutput output;
    output.csv = run_record_header(n);
    for (const auto& rows : per_run)
        for (const Row& row : rows) output.csv += format_row(row);

    // summary over the final row of each run
    std::vector<std::string> names{"reward_policy", "reward_xbar"};
    for (int s = 0; s < n; ++s) names.push_back("nu_" + std::to_string(s));
    names.insert(names.end(), {"gap", "eps1", "eps2"});
    std::vector<std::vector<double>> columns(names.size());
    for (const auto& rows : per_run) {
        const Row& last = rows.back();
        size_t c = 0;
        columns[c++].push_back(last.reward_policy);
        columns[c++].push_back(last.reward_xbar);
        for (int s = 0; s < n; ++s) columns[c++].push_back(last.nu[s]);
        columns[c++].push_back(last.gap_value);
        columns[c++].push_back(last.eps1);
        columns[c++].push_back(last.eps2);
    }

    json summary;
    summary["runs"] = config.runs;
    summary["base_seed"] = config.base_seed;
    summary["final_t"] = config.smd.T;
    summary["v_star_fair"] = v_star;
    summary["config"] = config_json(config.smd);
    json metrics;
    for (size_t c = 0; c < names.size(); ++c) {
        const Stats s = stats_of(columns[c]);
        metrics[names[c]] = {{"mean", s.mean}, {"std", s.stddev}};
    }
    summary["metrics_at_final_t"] = std::move(metrics);
    output.summary_json = summary.dump(2) + "\n";
    return output;
}

std::vector<SweepEntry> run_sweep(const MdpModel& model, const FairnessSpec& base,
                                  int state_index, const std::vector<double>& values,
                                  const ExperimentConfig& config,
                                  bool allow_near_boundary) {
    if (state_index < 0 || state_index >= model.n_states)
        throw std::invalid_argument("sweep state index out of range");
    std::vector<SweepEntry> entries;
    for (const double value : values) {
        SweepEntry entry;
        entry.rho_value = value;
        if (value >= 1.0 / model.n_states && !allow_near_boundary) {
            entry.skipped = true;
            entries.push_back(std::move(entry));
            continue;
        }
        FairnessSpec fairness = base;
        fairness.rho[state_index] = value;
        const FairOptimal opt = fair_optimal(model, fairness);
        if (opt.status != LpStatus::optimal) {
            entry.feasible = false;
            entries.push_back(std::move(entry));
            continue;
        }
        entry.feasible = true;
        entry.v_star = opt.value;
        entry.output = run_experiment(model, fairness, config);
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::string sweep_summary_json(const std::vector<SweepEntry>& entries) {
    json summary = json::array();
    for (const SweepEntry& entry : entries) {
        json e;
        e["rho_value"] = entry.rho_value;
        if (entry.skipped) {
            e["status"] = "skipped";
        } else if (!entry.feasible) {
            e["status"] = "infeasible";
        } else {
            e["status"] = "ok";
            e["v_star_fair"] = entry.v_star;
            e["summary"] = json::parse(entry.output.summary_json);
        }
        summary.push_back(std::move(e));
    }
    return summary.dump(2) + "\n";
}

} // namespace fairmdp
