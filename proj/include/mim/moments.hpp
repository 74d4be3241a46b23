#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mim/logvalue.hpp"

namespace mim {

// Parameter bundle for the G(n,p) moment formulas. Always construct through
// the make_params* builders below, which enforce the coupled invariants
// c = p*n, q = 1/(1-p), epsilon = epsilon0/3, and default k to target_size.
struct ModelParams {
    std::int64_t n = 0;
    double p = 0.0;
    double c = 0.0;  // p * n
    double q = 0.0;  // 1 / (1 - p)
    double epsilon = 0.0;
    double epsilon0 = 0.0;  // 3 * epsilon
    std::int64_t k = 0;
};

// floor((1 - epsilon) * ln(c) * n / c) with c = p*n. Requires c > 1 so the
// log is positive; throws std::domain_error otherwise.
std::int64_t target_size(std::int64_t n, double p, double epsilon);

// Builders. epsilon variants: make_params takes epsilon directly (epsilon0
// becomes 3*epsilon); make_params_eps0 takes the theorem-facing epsilon0.
// k defaults to target_size(n, p, epsilon), which needs c > 1; tiny test
// instances must pass k explicitly.
ModelParams make_params(std::int64_t n, double p, double epsilon,
                        std::optional<std::int64_t> k = std::nullopt);
ModelParams make_params_eps0(std::int64_t n, double p, double epsilon0,
                             std::optional<std::int64_t> k = std::nullopt);
// Same, parameterized by mean degree c (p = c/n).
ModelParams make_params_c(std::int64_t n, double c, double epsilon,
                          std::optional<std::int64_t> k = std::nullopt);

// E[Y_r] = C(n,2r) * (2r)!/(r! 2^r) * p^r * (1-p)^(C(2r,2)-r):
// the expected number of induced r-matchings.
LogValue log_expected_matchings(std::int64_t n, double p, std::int64_t r);

// |I(l,s)|: number of size-k matchings compatible with a fixed M_1 that share
// exactly l pairs with it and have exactly s pairs with one endpoint inside
// V(M_1). Zero when l+s > k. A cell whose placement is impossible because
// n - 4k + 2l + s < 0 is a domain error on direct calls; grid sums treat it
// as zero via grid_cell_feasible.
LogValue count_compatible(std::int64_t n, std::int64_t k, std::int64_t l, std::int64_t s);

// True iff the (l,s) cell admits any placement: l,s >= 0, l+s <= k and
// n - 4k + 2l + s >= 0. Infeasible cells contribute zero to every grid sum.
bool grid_cell_feasible(std::int64_t n, std::int64_t k, std::int64_t l, std::int64_t s);

// E[X_i | X_1 = 1] for i in I(l,s):
// p^(k-l) * (1-p)^(C(2k,2) - k - (C(2l+s,2) - l)).
// The p^(k-l) convention replaces the printed (k/((1-eps) ln c))^l factor;
// the two coincide when k is the default target_size value, and p^(k-l)
// stays meaningful for arbitrary test k.
LogValue conditional_expectation(const ModelParams& params, std::int64_t l, std::int64_t s);

// a_{l,s} = count_compatible * conditional_expectation. Summed over the grid
// this equals E[Y_k^2] / E[Y_k].
LogValue a_term(const ModelParams& params, std::int64_t l, std::int64_t s);

// b_{l,s} = 2^(l+2s) * (k!)^2 / (l! s! ((k-l-s)!)^2)
//         * ((n-2k)!)^2 / (n! (n-4k+2l+s)!)
//         * p^(-l) * (1-p)^(-(C(2l+s,2) - l)),
// evaluated directly (not as a_term / E[Y_k]; that identity is a test).
LogValue b_term(const ModelParams& params, std::int64_t l, std::int64_t s);

// Sum of b_{l,s} over the full grid {l,s >= 0, l+s <= k} = E[Y_k^2]/E[Y_k]^2.
// Accumulated l-outer s-inner by running log-sum-exp.
LogValue second_moment_ratio(const ModelParams& params);

// Paley-Zygmund: P(Y_k > 0) >= 1 / second_moment_ratio.
LogValue pz_lower_bound(const ModelParams& params);

// Oracle: exact E[Y_k^2]/E[Y_k]^2 by enumerating every ordered pair of size-k
// matchings and summing analytic joint probabilities. Refuses n > 10 or
// k > 3.
double brute_force_second_moment(std::int64_t n, std::int64_t k, double p);

struct MomentEntry {
    std::int64_t l = 0;
    std::int64_t s = 0;
    LogValue a;
    LogValue b;
};

// Grid of (a, b) values plus their b-sum. entries are ordered l outer,
// s inner. Infeasible cells carry zero entries so a full-grid table covers
// exactly {(l,s): l,s >= 0, l+s <= k}. ratio equals second_moment_ratio
// when the table holds the full grid, otherwise the sum over the sub-grid.
struct MomentTable {
    ModelParams params;
    std::vector<MomentEntry> entries;
    LogValue ratio;
    bool full_grid = true;

    // CSV with header "l,s,log_a,log_b"; natural logs, 17 significant
    // digits, "-inf" for zero entries.
    std::string to_csv() const;
};

MomentTable build_moment_table(const ModelParams& params);
MomentTable build_moment_table(const ModelParams& params,
                               const std::vector<std::pair<std::int64_t, std::int64_t>>& cells);

}  // namespace mim
