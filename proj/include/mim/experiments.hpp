#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mim/graph.hpp"
#include "mim/solver.hpp"

namespace mim {

enum class SolverKind { Exact, Greedy, GreedyLocalSearch };

// "exact", "greedy", "greedy+local_search" (the CLI spelling).
std::string solver_name(SolverKind kind);
SolverKind solver_from_name(const std::string& name);

// Shared configuration of the Monte Carlo runners. The cell grid is the
// cross product ns x ps in row-major order; cell_index numbers it. Worker
// count never influences results: seeds are derived per (cell, sample) and
// aggregation is slot-addressed, so the report is a pure function of the
// scientific fields.
struct ExperimentConfig {
    std::vector<std::int64_t> ns;
    std::vector<double> ps;
    double epsilon0 = 1.0;
    int samples = 100;
    SolverKind solver = SolverKind::Exact;
    std::chrono::milliseconds time_budget{0};  // per solve; 0 = no limit
    std::uint64_t master_seed = 0;
    int parallelism = 1;
    int local_search_rounds = 200;
};

// Aggregated outcome of one (n, p) cell. log_q_np and the window are
// reported only inside the theorem range 0 < p <= 0.99 with np > 1; outside
// it they are NaN and fraction_in_window follows suit. A refused cell (exact
// solver above its n cap) carries no samples.
struct CellResult {
    std::int64_t n = 0;
    double p = 0.0;
    bool theorem_range = false;
    bool refused = false;
    double log_q_np = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::vector<int> sizes;  // per-sample M, sample order
    double median = 0.0;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation
    double fraction_in_window = 0.0;
    double solver_optimal_fraction = 0.0;
};

// One solve, one CSV row.
struct SampleRow {
    std::int64_t n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;  // graph seed
    int size = 0;
    bool optimal = false;
    std::string solver;
    std::int64_t millis = 0;
};

// Outcome of a runner. The JSON serialization of this struct is
// byte-deterministic in the config; wall-clock times therefore live only in
// the CSV rows (to_csv), never in the JSON.
struct ExperimentReport {
    std::string kind;
    ExperimentConfig config;
    std::vector<CellResult> cells;
    std::vector<SampleRow> rows;
    bool passed = true;
    std::string verdict;
    std::map<std::string, double> details;

    // Header n,p,seed,size,optimal,solver,millis then one row per sample.
    std::string to_csv() const;
};

// Samples and solves every cell, aggregating the distribution of M against
// the window (1 +- epsilon0) log_q(np). Observational: the report never
// fails on window misses. Exact solving is refused per cell above n = 60.
ExperimentReport run_matching_distribution(const ExperimentConfig& config);

// Markov upper bound: no sample may reach ceil((1+epsilon0) log_q(np)) + 1
// edges. Counts violations per cell (passed iff none anywhere) and evaluates
// log E[Y_r] at r = ceil((1+epsilon0) log_q(np)) alongside.
ExperimentReport run_upper_bound_check(const ExperimentConfig& config);

// Empirical mean of Y_r (the number of induced r-matchings, counted by
// enumeration, hence n <= 16) against the closed-form expectation; passes
// iff the z-score stays within 4 standard errors.
ExperimentReport run_first_moment_mc(std::int64_t n, double p, std::int64_t r, int samples,
                                     std::uint64_t seed);

// Resamples all edges at one uniformly chosen vertex and requires
// |M(g') - M(g)| <= 1, exactly solved; n <= 14. Passes iff zero violations.
ExperimentReport run_lipschitz_property(int trials, std::int64_t n, double p,
                                        std::uint64_t seed);

// Solves g exactly, freezes every pair inside the witness vertex set S,
// resamples every other pair, and requires M(g') >= |S|/2; n <= 14. Passes
// iff zero violations.
ExperimentReport run_certificate_property(int trials, std::int64_t n, double p,
                                          std::uint64_t seed);

// Tail product P(M <= a) P(M >= b) at the offsets a = floor((1-2 eps) L),
// b = ceil((1-eps) L), L = log_q(np), eps = epsilon0/3, plus the empirical
// stddev of M. Purely observational.
ExperimentReport run_concentration_stats(const ExperimentConfig& config);

}  // namespace mim
