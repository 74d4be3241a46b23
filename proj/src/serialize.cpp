#include "mim/serialize.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace mim {

namespace {

using nlohmann::json;

// json's default object is backed by std::map, so key order (and therefore
// the serialized bytes) is a pure function of the content.

json echo_json(const ConfigEcho& echo) {
    json j = json::object();
    for (const auto& [key, value] : echo) j[key] = value;
    return j;
}

json params_json(const ModelParams& params) {
    json j;
    j["n"] = std::to_string(params.n);
    j["p"] = number17(params.p);
    j["c"] = number17(params.c);
    j["q"] = number17(params.q);
    j["epsilon"] = number17(params.epsilon);
    j["epsilon0"] = number17(params.epsilon0);
    j["k"] = std::to_string(params.k);
    return j;
}

json matching_json(const Matching& m) {
    json pairs = json::array();
    for (const Edge& e : m.pairs) {
        pairs.push_back(json::array({std::to_string(e.first), std::to_string(e.second)}));
    }
    return pairs;
}

json experiment_config_json(const ExperimentConfig& config) {
    json j;
    json ns = json::array();
    for (std::int64_t n : config.ns) ns.push_back(std::to_string(n));
    json ps = json::array();
    for (double p : config.ps) ps.push_back(number17(p));
    j["ns"] = ns;
    j["ps"] = ps;
    j["epsilon0"] = number17(config.epsilon0);
    j["samples"] = std::to_string(config.samples);
    j["solver"] = solver_name(config.solver);
    j["time_budget_ms"] = std::to_string(config.time_budget.count());
    j["master_seed"] = std::to_string(config.master_seed);
    j["local_search_rounds"] = std::to_string(config.local_search_rounds);
    // parallelism is deliberately absent: worker count must not be
    // observable in report bytes.
    return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string number17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string graph_to_json(const Graph& g, const ConfigEcho& echo) {
    json j;
    j["kind"] = "graph";
    j["config"] = echo_json(echo);
    j["n"] = std::to_string(g.n());
    j["m"] = std::to_string(g.m());
    json edges = json::array();
    for (const Edge& e : g.edges()) {
        edges.push_back(json::array({std::to_string(e.first), std::to_string(e.second)}));
    }
    j["edges"] = edges;
    return dump(j);
}

std::string solve_to_json(const SolveResult& result, const ConfigEcho& echo) {
    json j;
    j["kind"] = "solve";
    j["config"] = echo_json(echo);
    j["size"] = std::to_string(result.size);
    j["optimal"] = result.optimal;
    j["nodes_explored"] = std::to_string(result.nodes_explored);
    j["witness"] = matching_json(result.witness);
    return dump(j);
}

std::string moment_table_to_json(const MomentTable& table, const ConfigEcho& echo) {
    json j;
    j["kind"] = "moment_table";
    j["config"] = echo_json(echo);
    j["params"] = params_json(table.params);
    j["full_grid"] = table.full_grid;
    j["ratio_log"] = number17(table.ratio.log());
    j["ratio"] = number17(table.ratio.value());
    j["pz_lower_bound"] = number17(std::exp(-table.ratio.log()));
    json entries = json::array();
    for (const MomentEntry& e : table.entries) {
        json row;
        row["l"] = std::to_string(e.l);
        row["s"] = std::to_string(e.s);
        row["log_a"] = number17(e.a.log());
        row["log_b"] = number17(e.b.log());
        entries.push_back(row);
    }
    j["entries"] = entries;
    return dump(j);
}

std::string check_report_to_json(const CheckReport& report, const ConfigEcho& echo) {
    json j;
    j["kind"] = "check_report";
    j["config"] = echo_json(echo);
    j["check"] = report.check_name;
    j["holds"] = report.holds;
    j["margin_log"] = number17(report.margin.log());
    j["params"] = params_json(report.params);
    json subs = json::array();
    for (const SubCheck& sc : report.subchecks) {
        json s;
        s["name"] = sc.name;
        s["holds"] = sc.holds;
        s["margin"] = number17(sc.margin);
        s["advisory"] = sc.advisory;
        if (!sc.note.empty()) s["note"] = sc.note;
        subs.push_back(s);
    }
    j["subchecks"] = subs;
    json wits = json::array();
    for (const CheckWitness& w : report.witnesses) {
        json x;
        x["l"] = std::to_string(w.l);
        x["s"] = std::to_string(w.s);
        x["value_log"] = number17(w.value_log);
        x["bound_log"] = number17(w.bound_log);
        x["margin_log"] = number17(w.margin_log);
        if (!w.note.empty()) x["note"] = w.note;
        wits.push_back(x);
    }
    j["witnesses"] = wits;
    json details = json::object();
    for (const auto& [key, value] : report.details) details[key] = number17(value);
    j["details"] = details;
    return dump(j);
}

std::string experiment_report_to_json(const ExperimentReport& report, const ConfigEcho& echo) {
    json j;
    j["kind"] = "experiment_report";
    j["experiment"] = report.kind;
    j["config"] = echo_json(echo);
    j["experiment_config"] = experiment_config_json(report.config);
    json cells = json::array();
    for (const CellResult& c : report.cells) {
        json x;
        x["n"] = std::to_string(c.n);
        x["p"] = number17(c.p);
        x["theorem_range"] = c.theorem_range;
        x["refused"] = c.refused;
        x["log_q_np"] = number17(c.log_q_np);
        x["window_lo"] = number17(c.window_lo);
        x["window_hi"] = number17(c.window_hi);
        json sizes = json::array();
        for (int v : c.sizes) sizes.push_back(std::to_string(v));
        x["sizes"] = sizes;
        x["median"] = number17(c.median);
        x["mean"] = number17(c.mean);
        x["stddev"] = number17(c.stddev);
        x["fraction_in_window"] = number17(c.fraction_in_window);
        x["solver_optimal_fraction"] = number17(c.solver_optimal_fraction);
        cells.push_back(x);
    }
    j["cells"] = cells;
    j["passed"] = report.passed;
    j["verdict"] = report.verdict;
    json details = json::object();
    for (const auto& [key, value] : report.details) details[key] = number17(value);
    j["details"] = details;
    // Per-sample rows carry wall-clock times and stay CSV-only so this
    // document is byte-stable for identical configs.
    return dump(j);
}

std::string scalar_report_to_json(const std::string& kind,
                                  const std::vector<std::pair<std::string, std::string>>& fields,
                                  const ConfigEcho& echo) {
    json j;
    j["kind"] = kind;
    j["config"] = echo_json(echo);
    for (const auto& [key, value] : fields) j[key] = value;
    return dump(j);
}

}  // namespace mim
