#include "fair_amdp/instance_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace fairmdp {

using nlohmann::json;

namespace {

int require_positive_int(const json& doc, const char* key) {
    if (!doc.contains(key)) throw ParseError(std::string(key) + ": missing field");
    const json& v = doc.at(key);
    if (!v.is_number_integer() || v.get<long long>() <= 0)
        throw ParseError(std::string(key) + ": must be a positive integer");
    return v.get<int>();
}

Vec parse_vector(const json& arr, int expected, const std::string& field) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != expected)
        throw ParseError(field + ": expected array of length " +
                         std::to_string(expected));
    Vec out(expected);
    for (int i = 0; i < expected; ++i) {
        const json& v = arr[i];
        if (!v.is_number())
            throw ParseError(field + "[" + std::to_string(i) + "]: not a number");
        out[i] = v.get<double>();
    }
    return out;
}

} // namespace

Instance parse_instance(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("top level: expected a JSON object");

    Instance instance;
    MdpModel& model = instance.model;
    model.n_states = require_positive_int(doc, "n");
    model.n_actions = require_positive_int(doc, "m");
    const int n = model.n_states;
    const int l = model.pair_count();

    if (!doc.contains("transitions") || !doc.at("transitions").is_array() ||
        static_cast<int>(doc.at("transitions").size()) != l)
        throw ParseError("transitions: expected array of " + std::to_string(l) +
                         " rows (flat pair order)");
    model.transitions = Mat(l, n);
    for (int i = 0; i < l; ++i)
        model.transitions.row(i) =
            parse_vector(doc.at("transitions")[i], n,
                         "transitions[" + std::to_string(i) + "]")
                .transpose();

    if (!doc.contains("rewards")) throw ParseError("rewards: missing field");
    model.rewards = parse_vector(doc.at("rewards"), l, "rewards");

    if (doc.contains("initial_distribution"))
        model.initial_distribution =
            parse_vector(doc.at("initial_distribution"), n, "initial_distribution");

    if (doc.contains("rho")) {
        FairnessSpec spec{parse_vector(doc.at("rho"), n, "rho")};
        for (int s = 0; s < n; ++s)
            if (spec.rho[s] < 0.0 || spec.rho[s] >= 1.0)
                throw ParseError("rho[" + std::to_string(s) +
                                 "]: must lie in [0, 1)");
        if (spec.sum() > 1.0 + 1e-12)
            throw ParseError("rho: entries sum to more than 1");
        instance.rho = std::move(spec);
    }

    const ValidationReport report = validate_model(model);
    if (!report.ok()) throw ParseError("model: " + report.violations.front());
    return instance;
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open instance file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_instance(buffer.str());
}

std::string serialize_instance(const Instance& instance) {
    const MdpModel& model = instance.model;
    json doc;
    doc["n"] = model.n_states;
    doc["m"] = model.n_actions;
    json rows = json::array();
    for (int i = 0; i < model.pair_count(); ++i) {
        json row = json::array();
        for (int s = 0; s < model.n_states; ++s) row.push_back(model.transitions(i, s));
        rows.push_back(std::move(row));
    }
    doc["transitions"] = std::move(rows);
    json rewards = json::array();
    for (int i = 0; i < model.pair_count(); ++i) rewards.push_back(model.rewards[i]);
    doc["rewards"] = std::move(rewards);
    if (model.initial_distribution.size() > 0) {
        json u = json::array();
        for (int s = 0; s < model.n_states; ++s)
            u.push_back(model.initial_distribution[s]);
        doc["initial_distribution"] = std::move(u);
    }
    if (instance.rho) {
        json rho = json::array();
        for (int s = 0; s < model.n_states; ++s) rho.push_back(instance.rho->rho[s]);
        doc["rho"] = std::move(rho);
    }
    return doc.dump(2) + "\n";
}

void save_instance(const Instance& instance, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write instance file: " + path);
    out << serialize_instance(instance);
}

MdpModel random_ergodic_model(int n_states, int n_actions, RngStream& rng) {
    MdpModel model;
    model.n_states = n_states;
    model.n_actions = n_actions;
    model.transitions = Mat(model.pair_count(), n_states);
    model.rewards = Vec(model.pair_count());
    for (int i = 0; i < model.pair_count(); ++i) {
        Vec row(n_states);
        for (int s = 0; s < n_states; ++s) row[s] = 0.05 + rng.next_uniform();
        model.transitions.row(i) = row.transpose() / row.sum();
        model.rewards[i] = rng.next_uniform();
    }
    return model;
}

FairnessSpec random_fairness(int n_states, double max_fraction, RngStream& rng) {
    Vec rho(n_states);
    for (int s = 0; s < n_states; ++s)
        rho[s] = rng.next_uniform() * max_fraction / n_states;
    return FairnessSpec{std::move(rho)};
}

} // namespace fairmdp
