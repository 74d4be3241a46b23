// indmatch: command-line front end for the induced-matching toolkit.
// Subcommands cover sampling (gen), solving (solve), moment tables
// (moments, ratio), inequality checks (check) and the Monte Carlo harness
// (experiment, property). Exit codes: 0 success (including checks that
// report holds=false), 1 usage or input error, 2 resource refusal.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "mim/bounds.hpp"
#include "mim/errors.hpp"
#include "mim/experiments.hpp"
#include "mim/graph.hpp"
#include "mim/moments.hpp"
#include "mim/rng.hpp"
#include "mim/serialize.hpp"
#include "mim/solver.hpp"

namespace {

using mim::ConfigEcho;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open --out path '" + out_path + "'");
    out << text;
    if (!out.good()) throw std::runtime_error("failed writing '" + out_path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Flat key=value lines, '#' comments. Returned in file order.
std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw std::runtime_error("config file '" + path + "' line " +
                                     std::to_string(lineno) + ": expected key=value");
        }
        pairs.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
    return pairs;
}

// Splices config-file entries in as flags right after the subcommand token.
// Keys the command line already carries are skipped, so explicit flags win.
std::vector<std::string> build_args(int argc, char** argv) {
    std::vector<std::string> raw(argv + 1, argv + argc);
    std::string cfg_path;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == "--config" && i + 1 < raw.size()) {
            cfg_path = raw[i + 1];
        } else if (raw[i].rfind("--config=", 0) == 0) {
            cfg_path = raw[i].substr(std::string("--config=").size());
        }
    }
    std::vector<std::string> args;
    args.push_back(argv[0]);
    if (cfg_path.empty()) {
        args.insert(args.end(), raw.begin(), raw.end());
        return args;
    }

    const auto pairs = parse_config_file(cfg_path);
    const auto user_has = [&raw](const std::string& key) {
        const std::string flag = "--" + key;
        const std::string flag_eq = flag + "=";
        for (const std::string& tok : raw) {
            if (tok == flag || tok.rfind(flag_eq, 0) == 0) return true;
        }
        return false;
    };

    std::size_t sub_pos = raw.size();
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!raw[i].empty() && raw[i][0] != '-') {
            sub_pos = i;
            break;
        }
    }
    for (std::size_t i = 0; i <= sub_pos && i < raw.size(); ++i) args.push_back(raw[i]);
    for (const auto& [key, value] : pairs) {
        if (key == "config" || user_has(key)) continue;
        args.push_back("--" + key);
        args.push_back(value);
    }
    for (std::size_t i = sub_pos + 1; i < raw.size(); ++i) args.push_back(raw[i]);
    return args;
}

std::string join_ints(const std::vector<std::int64_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += mim::number17(v[i]);
    }
    return out;
}

// ---------------------------------------------------------------- gen

struct GenOpts {
    std::int64_t n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    std::string format = "text";
    std::string out;
    std::string config;
};

void run_gen(const GenOpts& o) {
    const mim::Graph g = mim::sample_gnp(static_cast<int>(o.n), o.p, o.seed);
    if (o.format == "text") {
        emit(mim::write_graph(g), o.out);
        return;
    }
    ConfigEcho echo{{"subcommand", "gen"},
                    {"n", std::to_string(o.n)},
                    {"p", mim::number17(o.p)},
                    {"seed", std::to_string(o.seed)},
                    {"format", o.format}};
    emit(mim::graph_to_json(g, echo), o.out);
}

void setup_gen(CLI::App& app, GenOpts& o) {
    CLI::App* sub = app.add_subcommand("gen", "Sample one G(n,p) graph");
    sub->add_option("--n", o.n, "vertex count")->required()->check(CLI::PositiveNumber);
    sub->add_option("--p", o.p, "edge probability")->required()->check(CLI::Range(0.0, 1.0));
    sub->add_option("--seed", o.seed, "graph seed (default 0)");
    sub->add_option("--format", o.format, "text|json (default text)")
        ->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--out", o.out, "output path (default stdout)");
    sub->add_option("--config", o.config, "key=value config file; flags win");
    sub->callback([&o] { run_gen(o); });
}

// ---------------------------------------------------------------- solve

struct SolveOpts {
    std::int64_t n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    std::string in;
    std::string solver = "exact";
    std::int64_t time_budget_ms = 0;
    int rounds = 200;
    std::string format = "json";
    std::string out;
    std::string config;
};

void run_solve(const SolveOpts& o) {
    const mim::Graph g = o.in.empty()
                             ? mim::sample_gnp(static_cast<int>(o.n), o.p, o.seed)
                             : mim::read_graph(read_file(o.in));
    const mim::SolverKind kind = mim::solver_from_name(o.solver);

    mim::SolveResult result;
    switch (kind) {
        case mim::SolverKind::Exact:
            result = mim::mim_exact(g, std::chrono::milliseconds(o.time_budget_ms));
            break;
        case mim::SolverKind::Greedy:
            result = mim::mim_greedy(g, mim::derive_seed(o.seed, 1, 0));
            break;
        case mim::SolverKind::GreedyLocalSearch: {
            const mim::SolveResult start = mim::mim_greedy(g, mim::derive_seed(o.seed, 1, 0));
            result = mim::mim_local_search(g, start, o.rounds, mim::derive_seed(o.seed, 2, 0));
            break;
        }
    }

    if (o.format == "text") {
        std::ostringstream text;
        text << "size = " << result.size << "\n"
             << "optimal = " << (result.optimal ? "true" : "false") << "\n"
             << "nodes_explored = " << result.nodes_explored << "\n"
             << "witness =";
        for (const mim::Edge& e : result.witness.pairs) {
            text << " (" << e.first << "," << e.second << ")";
        }
        text << "\n";
        emit(text.str(), o.out);
        return;
    }
    ConfigEcho echo{{"subcommand", "solve"}};
    if (o.in.empty()) {
        echo.emplace_back("n", std::to_string(o.n));
        echo.emplace_back("p", mim::number17(o.p));
        echo.emplace_back("seed", std::to_string(o.seed));
    } else {
        echo.emplace_back("in", o.in);
    }
    echo.emplace_back("solver", mim::solver_name(kind));
    echo.emplace_back("time_budget_ms", std::to_string(o.time_budget_ms));
    echo.emplace_back("rounds", std::to_string(o.rounds));
    echo.emplace_back("format", o.format);
    emit(mim::solve_to_json(result, echo), o.out);
}

void setup_solve(CLI::App& app, SolveOpts& o) {
    CLI::App* sub = app.add_subcommand("solve", "Find a maximum induced matching");
    CLI::Option* n_opt = sub->add_option("--n", o.n, "vertex count")->check(CLI::PositiveNumber);
    CLI::Option* p_opt = sub->add_option("--p", o.p, "edge probability")->check(CLI::Range(0.0, 1.0));
    CLI::Option* seed_opt = sub->add_option("--seed", o.seed, "graph seed (default 0)");
    CLI::Option* in_opt = sub->add_option("--in", o.in, "read graph from file instead of sampling");
    in_opt->excludes(n_opt)->excludes(p_opt)->excludes(seed_opt);
    n_opt->needs(p_opt);
    sub->add_option("--solver", o.solver, "exact|greedy|greedy+local_search (default exact)");
    sub->add_option("--time-budget", o.time_budget_ms, "exact-solver budget in ms, 0 = none")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--rounds", o.rounds, "local search rounds (default 200)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--format", o.format, "json|text (default json)")
        ->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--out", o.out, "output path (default stdout)");
    sub->add_option("--config", o.config, "key=value config file; flags win");
    sub->callback([&o, n_opt, in_opt] {
        if (n_opt->count() == 0 && in_opt->count() == 0) {
            throw std::invalid_argument("solve: needs either --n/--p or --in");
        }
        run_solve(o);
    });
}

// ---------------------------------------------------------------- params plumbing

struct ParamOpts {
    std::int64_t n = 0;
    std::optional<double> p;
    std::optional<double> c;
    std::optional<double> epsilon;
    std::optional<double> epsilon0;
    std::optional<std::int64_t> k;
};

// Resolves the epsilon pair (default 1/3) and the p/c alternative into a
// validated ModelParams.
mim::ModelParams resolve_params(const ParamOpts& o) {
    double eps = 1.0 / 3.0;
    if (o.epsilon && o.epsilon0) {
        throw std::invalid_argument("pass --epsilon or --epsilon0, not both");
    }
    if (o.epsilon) eps = *o.epsilon;
    if (o.epsilon0) eps = *o.epsilon0 / 3.0;
    if (o.p && o.c) throw std::invalid_argument("pass --p or --c, not both");
    if (!o.p && !o.c) throw std::invalid_argument("needs --p or --c");
    if (o.c) return mim::make_params_c(o.n, *o.c, eps, o.k);
    return mim::make_params(o.n, *o.p, eps, o.k);
}

void add_param_options(CLI::App* sub, ParamOpts& o, bool n_required = true) {
    CLI::Option* n_opt = sub->add_option("--n", o.n, "vertex count")->check(CLI::PositiveNumber);
    if (n_required) n_opt->required();
    sub->add_option("--p", o.p, "edge probability");
    sub->add_option("--c", o.c, "mean degree c = p*n (alternative to --p)");
    sub->add_option("--epsilon", o.epsilon, "epsilon (default 1/3)");
    sub->add_option("--epsilon0", o.epsilon0, "theorem epsilon0 = 3*epsilon");
    sub->add_option("--k", o.k, "matching size k (default: floor((1-eps) ln(c) n/c))");
}

void echo_params(ConfigEcho& echo, const mim::ModelParams& params) {
    echo.emplace_back("n", std::to_string(params.n));
    echo.emplace_back("p", mim::number17(params.p));
    echo.emplace_back("c", mim::number17(params.c));
    echo.emplace_back("epsilon", mim::number17(params.epsilon));
    echo.emplace_back("k", std::to_string(params.k));
}

// ---------------------------------------------------------------- moments

struct MomentsOpts {
    ParamOpts params;
    std::string format = "json";
    std::string out;
    std::string config;
};

void run_moments(const MomentsOpts& o) {
    const mim::ModelParams params = resolve_params(o.params);
    const std::int64_t cells = (params.k + 1) * (params.k + 2) / 2;
    if (cells > 2'000'000) {
        throw mim::refusal_error("moment table would hold " + std::to_string(cells) +
                                 " cells; use the check subcommand at this scale");
    }
    const mim::MomentTable table = mim::build_moment_table(params);
    if (o.format == "csv") {
        emit(table.to_csv(), o.out);
        return;
    }
    ConfigEcho echo{{"subcommand", "moments"}};
    echo_params(echo, params);
    echo.emplace_back("format", o.format);
    if (o.format == "text") {
        std::ostringstream text;
        text << "second_moment_ratio = " << mim::number17(table.ratio.value()) << "\n"
             << "pz_lower_bound = " << mim::number17(std::exp(-table.ratio.log())) << "\n"
             << table.to_csv();
        emit(text.str(), o.out);
        return;
    }
    emit(mim::moment_table_to_json(table, echo), o.out);
}

void setup_moments(CLI::App& app, MomentsOpts& o) {
    CLI::App* sub = app.add_subcommand("moments", "a/b moment table, ratio and PZ bound");
    add_param_options(sub, o.params);
    sub->add_option("--format", o.format, "json|csv|text (default json)")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option("--out", o.out, "output path (default stdout)");
    sub->add_option("--config", o.config, "key=value config file; flags win");
    sub->callback([&o] { run_moments(o); });
}

// ---------------------------------------------------------------- ratio

struct RatioOpts {
    std::int64_t n = 0;
    std::int64_t k = 0;
    double p = 0.0;
    std::string format = "text";
    std::string out;
    std::string config;
};

void run_ratio(const RatioOpts& o) {
    const mim::ModelParams params = mim::make_params(o.n, o.p, 1.0 / 3.0, o.k);
    const mim::LogValue ratio = mim::second_moment_ratio(params);
    const mim::LogValue pz = mim::pz_lower_bound(params);
    if (o.format == "text") {
        std::ostringstream text;
        text << "second_moment_ratio = " << mim::number17(ratio.value()) << "\n"
             << "pz_lower_bound = " << mim::number17(pz.value()) << "\n";
        emit(text.str(), o.out);
        return;
    }
    ConfigEcho echo{{"subcommand", "ratio"},
                    {"n", std::to_string(o.n)},
                    {"k", std::to_string(o.k)},
                    {"p", mim::number17(o.p)}};
    emit(mim::scalar_report_to_json("second_moment_ratio",
                                    {{"ratio", mim::number17(ratio.value())},
                                     {"ratio_log", mim::number17(ratio.log())},
                                     {"pz_lower_bound", mim::number17(pz.value())},
                                     {"pz_log", mim::number17(pz.log())}},
                                    echo),
         o.out);
}

void setup_ratio(CLI::App& app, RatioOpts& o) {
    CLI::App* sub = app.add_subcommand("ratio", "Second-moment ratio E[Y^2]/E[Y]^2");
    sub->add_option("--n", o.n, "vertex count")->required()->check(CLI::PositiveNumber);
    sub->add_option("--k", o.k, "matching size")->required()->check(CLI::NonNegativeNumber);
    sub->add_option("--p", o.p, "edge probability")->required();
    sub->add_option("--format", o.format, "text|json (default text)")
        ->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--out", o.out, "output path (default stdout)");
    sub->add_option("--config", o.config, "key=value config file; flags win");
    sub->callback([&o] { run_ratio(o); });
}

// ---------------------------------------------------------------- check

struct CheckOpts {
    std::string name;
    ParamOpts params;
    std::string grid = "lattice";
    bool lattice = false;
    std::int64_t step_l = 0;
    std::int64_t step_s = 0;
    int worst = 5;
    std::string format = "json";
    std::string out;
    std::string config;
};

void run_check(const CheckOpts& o) {
    mim::CheckReport report;
    ConfigEcho echo{{"subcommand", "check"}, {"check-name", o.name}};

    if (o.name == "talagrand" || o.name == "talagrand_arithmetic") {
        double c = 0.0;
        if (o.params.c) {
            c = *o.params.c;
        } else if (o.params.p) {
            c = *o.params.p * static_cast<double>(o.params.n);
        } else {
            throw std::invalid_argument("check talagrand: needs --c (or --p)");
        }
        double eps = 1.0 / 3.0;
        if (o.params.epsilon) eps = *o.params.epsilon;
        if (o.params.epsilon0) eps = *o.params.epsilon0 / 3.0;
        report = mim::check_talagrand_arithmetic(o.params.n, c, eps);
        echo.emplace_back("n", std::to_string(o.params.n));
        echo.emplace_back("c", mim::number17(c));
        echo.emplace_back("epsilon", mim::number17(eps));
    } else {
        mim::CheckConfig config;
        config.params = resolve_params(o.params);
        config.grid = (o.grid == "full" && !o.lattice) ? mim::GridKind::Full
                                                       : mim::GridKind::Lattice;
        config.step_l = o.step_l;
        config.step_s = o.step_s;
        config.report_worst = o.worst;

        if (o.name == "interior" || o.name == "interior_bound") {
            report = mim::check_interior_bound(config);
        } else if (o.name == "global" || o.name == "global_bound") {
            report = mim::check_global_bound(config);
        } else if (o.name == "boundary" || o.name == "boundary_ratios") {
            report = mim::check_boundary_ratios(config);
        } else if (o.name == "dense" || o.name == "dense_regime") {
            report = mim::check_dense_regime(config);
        } else if (o.name == "assembly" || o.name == "final_assembly") {
            report = mim::check_final_assembly(config);
        } else {
            throw std::invalid_argument(
                "unknown --check-name '" + o.name +
                "' (interior_bound | global_bound | boundary_ratios | dense_regime | "
                "talagrand | final_assembly)");
        }
        echo_params(echo, config.params);
        echo.emplace_back("grid", o.grid);
        echo.emplace_back("step-l", std::to_string(o.step_l));
        echo.emplace_back("step-s", std::to_string(o.step_s));
    }
    echo.emplace_back("format", o.format);

    if (o.format == "text") {
        emit(report.to_table(), o.out);
    } else {
        emit(mim::check_report_to_json(report, echo), o.out);
    }
    std::cerr << "check " << report.check_name << ": holds="
              << (report.holds ? "true" : "false") << "\n";
}

void setup_check(CLI::App& app, CheckOpts& o) {
    CLI::App* sub = app.add_subcommand("check", "Run one named inequality check");
    sub->add_option("--check-name", o.name,
                    "interior_bound|global_bound|boundary_ratios|dense_regime|talagrand|"
                    "final_assembly")
        ->required();
    add_param_options(sub, o.params);
    sub->add_option("--grid", o.grid, "lattice|full (default lattice)")
        ->check(CLI::IsMember({"lattice", "full"}));
    sub->add_flag("--lattice", o.lattice, "shorthand for --grid lattice");
    sub->add_option("--step-l", o.step_l, "lattice stride in l (0 = auto, <= 200 values)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--step-s", o.step_s, "lattice stride in s (0 = auto)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--worst", o.worst, "witnesses to keep (default 5)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--format", o.format, "json|text (default json)")
        ->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--out", o.out, "output path (default stdout)");
    sub->add_option("--config", o.config, "key=value config file; flags win");
    sub->callback([&o] { run_check(o); });
}

// ---------------------------------------------------------------- experiment

struct ExperimentOpts {
    std::string kind = "distribution";
    std::vector<std::int64_t> ns;
    std::vector<double> ps;
    double epsilon0 = 0.35;
    int samples = 50;
    std::string solver = "exact";
    std::int64_t time_budget_ms = 0;
    std::uint64_t seed = 0;
    int parallelism = 1;
    int rounds = 200;
    std::string format = "json";
    std::string out;
    std::string config;
};

void run_experiment(const ExperimentOpts& o) {
    mim::ExperimentConfig config;
    config.ns = o.ns;
    config.ps = o.ps;
    config.epsilon0 = o.epsilon0;
    config.samples = o.samples;
    config.solver = mim::solver_from_name(o.solver);
    config.time_budget = std::chrono::milliseconds(o.time_budget_ms);
    config.master_seed = o.seed;
    config.parallelism = o.parallelism;
    config.local_search_rounds = o.rounds;

    std::cerr << "experiment " << o.kind << ": " << config.ns.size() * config.ps.size()
              << " cells x " << config.samples << " samples, parallelism " << o.parallelism
              << "\n";

    mim::ExperimentReport report;
    if (o.kind == "distribution") {
        report = mim::run_matching_distribution(config);
    } else if (o.kind == "upper_bound") {
        report = mim::run_upper_bound_check(config);
    } else if (o.kind == "concentration") {
        report = mim::run_concentration_stats(config);
    } else {
        throw std::invalid_argument("unknown --kind '" + o.kind +
                                    "' (distribution | upper_bound | concentration)");
    }

    for (const mim::CellResult& cell : report.cells) {
        std::cerr << "cell n=" << cell.n << " p=" << cell.p
                  << (cell.refused ? ": refused (exact cap)" : ": median=") ;
        if (!cell.refused) std::cerr << cell.median << " mean=" << cell.mean;
        std::cerr << "\n";
    }

    if (o.format == "csv") {
        emit(report.to_csv(), o.out);
        return;
    }
    ConfigEcho echo{{"subcommand", "experiment"},
                    {"kind", o.kind},
                    {"n", join_ints(o.ns)},
                    {"p", join_doubles(o.ps)},
                    {"epsilon0", mim::number17(o.epsilon0)},
                    {"samples", std::to_string(o.samples)},
                    {"solver", mim::solver_name(config.solver)},
                    {"time-budget", std::to_string(o.time_budget_ms)},
                    {"seed", std::to_string(o.seed)},
                    {"rounds", std::to_string(o.rounds)},
                    {"format", o.format}};
    emit(mim::experiment_report_to_json(report, echo), o.out);
}

void setup_experiment(CLI::App& app, ExperimentOpts& o) {
    CLI::App* sub = app.add_subcommand("experiment", "Monte Carlo harness over (n, p) cells");
    sub->add_option("--kind", o.kind, "distribution|upper_bound|concentration");
    sub->add_option("--n", o.ns, "vertex counts (repeat or comma-separate)")
        ->required()
        ->delimiter(',');
    sub->add_option("--p", o.ps, "edge probabilities (repeat or comma-separate)")
        ->required()
        ->delimiter(',');
    sub->add_option("--epsilon0", o.epsilon0, "window half-width (default 0.35)");
    sub->add_option("--samples", o.samples, "samples per cell (default 50)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--solver", o.solver, "exact|greedy|greedy+local_search (default exact)");
    sub->add_option("--time-budget", o.time_budget_ms, "per-solve budget in ms, 0 = none")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", o.seed, "master seed (default 0)");
    sub->add_option("--parallelism", o.parallelism, "worker threads (default 1)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--rounds", o.rounds, "local search rounds (default 200)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--format", o.format, "json|csv (default json)")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", o.out, "output path (default stdout)");
    sub->add_option("--config", o.config, "key=value config file; flags win");
    sub->callback([&o] { run_experiment(o); });
}

// ---------------------------------------------------------------- property

struct PropertyOpts {
    std::string kind;
    std::int64_t n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    std::optional<std::int64_t> r;
    int samples = 10000;
    int trials = 500;
    std::string format = "json";
    std::string out;
    std::string config;
};

void run_property(const PropertyOpts& o) {
    mim::ExperimentReport report;
    ConfigEcho echo{{"subcommand", "property"},
                    {"kind", o.kind},
                    {"n", std::to_string(o.n)},
                    {"p", mim::number17(o.p)},
                    {"seed", std::to_string(o.seed)}};
    if (o.kind == "first_moment") {
        if (!o.r) throw std::invalid_argument("property first_moment: needs --r");
        report = mim::run_first_moment_mc(o.n, o.p, *o.r, o.samples, o.seed);
        echo.emplace_back("r", std::to_string(*o.r));
        echo.emplace_back("samples", std::to_string(o.samples));
    } else if (o.kind == "lipschitz") {
        report = mim::run_lipschitz_property(o.trials, o.n, o.p, o.seed);
        echo.emplace_back("trials", std::to_string(o.trials));
    } else if (o.kind == "certificate") {
        report = mim::run_certificate_property(o.trials, o.n, o.p, o.seed);
        echo.emplace_back("trials", std::to_string(o.trials));
    } else {
        throw std::invalid_argument("unknown --kind '" + o.kind +
                                    "' (first_moment | lipschitz | certificate)");
    }
    echo.emplace_back("format", o.format);
    std::cerr << "property " << o.kind << ": " << report.verdict << "\n";

    if (o.format == "text") {
        std::ostringstream text;
        text << report.kind << ": " << report.verdict << "\n";
        for (const auto& [key, value] : report.details) {
            text << "  " << key << " = " << mim::number17(value) << "\n";
        }
        emit(text.str(), o.out);
        return;
    }
    emit(mim::experiment_report_to_json(report, echo), o.out);
}

void setup_property(CLI::App& app, PropertyOpts& o) {
    CLI::App* sub = app.add_subcommand("property", "First-moment and concentration trials");
    sub->add_option("--kind", o.kind, "first_moment|lipschitz|certificate")->required();
    sub->add_option("--n", o.n, "vertex count")->required()->check(CLI::PositiveNumber);
    sub->add_option("--p", o.p, "edge probability")->required()->check(CLI::Range(0.0, 1.0));
    sub->add_option("--seed", o.seed, "master seed (default 0)");
    sub->add_option("--r", o.r, "matching size for first_moment");
    sub->add_option("--samples", o.samples, "samples for first_moment (default 10000)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--trials", o.trials, "trials for lipschitz/certificate (default 500)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", o.format, "json|text (default json)")
        ->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--out", o.out, "output path (default stdout)");
    sub->add_option("--config", o.config, "key=value config file; flags win");
    sub->callback([&o] { run_property(o); });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"induced matchings in G(n,p): samplers, solvers, moments, bound checks"};
    app.require_subcommand(1);

    GenOpts gen_opts;
    SolveOpts solve_opts;
    MomentsOpts moments_opts;
    RatioOpts ratio_opts;
    CheckOpts check_opts;
    ExperimentOpts experiment_opts;
    PropertyOpts property_opts;
    setup_gen(app, gen_opts);
    setup_solve(app, solve_opts);
    setup_moments(app, moments_opts);
    setup_ratio(app, ratio_opts);
    setup_check(app, check_opts);
    setup_experiment(app, experiment_opts);
    setup_property(app, property_opts);

    try {
        const std::vector<std::string> args = build_args(argc, argv);
        std::vector<const char*> ptrs;
        ptrs.reserve(args.size());
        for (const std::string& a : args) ptrs.push_back(a.c_str());
        app.parse(static_cast<int>(ptrs.size()), ptrs.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const mim::refusal_error& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
