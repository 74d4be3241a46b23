#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mim/logvalue.hpp"
#include "mim/moments.hpp"

namespace mim {

// Grid selection for the inequality sweeps. Full enumerates every cell
// (refused when that exceeds ~2e7 cells); Lattice takes strided interior
// points, at most ~200 values per axis when the steps are 0 (auto), always
// joined by the complete boundary slices; Explicit evaluates exactly the
// given points.
enum class GridKind { Full, Lattice, Explicit };

struct CheckConfig {
    ModelParams params;
    GridKind grid = GridKind::Lattice;
    std::int64_t step_l = 0;  // 0 = auto
    std::int64_t step_s = 0;  // 0 = auto
    std::vector<std::pair<std::int64_t, std::int64_t>> points;  // for Explicit
    int report_worst = 5;
};

// One evaluated point, kept for the worst offenders of a sweep.
struct CheckWitness {
    std::int64_t l = -1;
    std::int64_t s = -1;
    double value_log = 0.0;
    double bound_log = 0.0;
    double margin_log = 0.0;  // bound minus value, log space
    std::string note;
};

// Named component of a check. Advisory subchecks are diagnostics: they are
// reported but excluded from the aggregate verdict.
struct SubCheck {
    std::string name;
    bool holds = false;
    double margin = 0.0;  // minimal margin seen (log space where applicable)
    bool advisory = false;
    std::string note;
};

// Outcome of one named check. holds is the conjunction of the non-advisory
// subchecks; margin is the worst bound/value ratio seen across the swept
// points (log of it can be negative exactly when a pointwise bound failed).
// Inequality failures are never thrown; they land here as holds=false with
// witnesses.
struct CheckReport {
    std::string check_name;
    bool holds = false;
    LogValue margin = LogValue::one();
    std::vector<CheckWitness> witnesses;
    ModelParams params;
    std::vector<SubCheck> subchecks;
    std::map<std::string, double> details;

    std::string to_table() const;
};

struct FTerms {
    double F = 0.0;
    double F1 = 0.0;
    double F2 = 0.0;
};

// The exponent decomposition on the interior region 1 <= l, 1 <= s,
// l+s <= k-1:
//   F  = l ln(k/l) + s ln(k/s) + s + 2s ln2
//        + (c/n)(1+eps/2)(2l+s)^2/2 - ln((n-2k)/k)(2l+s)
//   F1 = l ln(k/l) + (c/n)(1+eps/2)(2l^2+2ls) - 2l ln((n-2k)/k)
//   F2 = s ln(k/s) + s + 2s ln2 + (c/n)(1+eps/2)s^2/2 - s ln((n-2k)/k)
// F = F1 + F2 identically since (2l+s)^2 = 4l^2 + 4ls + s^2.
// Boundary points (l=0, s=0 or l+s >= k) are a domain error; the boundary is
// covered by check_boundary_ratios.
FTerms f_terms(const ModelParams& params, std::int64_t l, std::int64_t s);

// Interior points selected by the config (see GridKind).
std::vector<std::pair<std::int64_t, std::int64_t>> interior_points(const CheckConfig& config);

// The complete boundary: (l,0) for l in 1..k, (0,s) for s in 1..k, and the
// diagonal (l, k-l) for l in 1..k-1. (0,0) is not included.
std::vector<std::pair<std::int64_t, std::int64_t>> boundary_points(const ModelParams& params);

// b_{l,s} <= exp(n/(3c)) on interior points, with Case I/II classification
// at the threshold 2l+s >= k/sqrt(ln c), the F = F1+F2 identity, and the
// advisory F-margin diagnostic (max F vs (n/(3c))/ln c).
CheckReport check_interior_bound(const CheckConfig& config);

// b_{l,s} <= exp(n/(2c)) on interior plus boundary plus (0,0), the
// arithmetic implication 9 ln n + n/(3c) <= n/(2c), and b_{0,0} <= 1.
CheckReport check_global_bound(const CheckConfig& config);

// The five boundary ratio inequalities over their full index ranges, the
// closed ratio forms against mechanical term-by-term quotients of the b
// definition (relative error 1e-9), and the concatenation argument: every
// boundary point reaches an interior point within three moves at total cost
// <= n^9, including the worked chain b_{k-1,1} <= n^5 b_{k-2,1}.
CheckReport check_boundary_ratios(const CheckConfig& config);

// Dense-regime bounds (requires c >= n/(ln n)^3):
//   (a) 2^(l+2s)/(l! s!) <= 22 with exact maximum 64/3,
//   (b) b_{l,s} <= n^(-eps(l+s)) for l+s > 0,
//   (c) b_{0,0} within [1-delta, 1+delta], delta = 10 k^2/n,
//   (d) sum of b <= 1 + 3 n^(-eps), equivalently a Chebyshev variance ratio
//       of at most 3 n^(-eps).
CheckReport check_dense_regime(const CheckConfig& config);

// Pure exponent arithmetic of the concentration step, in the real-valued
// k = (1-eps) ln(c) n / c (no flooring, no p-range constraint: the
// interesting regime c = e^100 has c/n far above any probability):
// lambda sqrt(2k) = eps (ln c / c) n exactly, lambda^2/4 =
// eps^2 ln(c) n / (8(1-eps) c), and the closing inequality, which holds iff
// ln c >= 16(1-eps)/eps^2 (the reported threshold).
CheckReport check_talagrand_arithmetic(std::int64_t n, double c, double epsilon);

// Closing arithmetic of the sparse regime (requires c <= n/(ln n)^3):
// 2 ln n + n/(2c) <= n/c, the chain margin exp(-2n/c)/exp(-n/c) = exp(-n/c)
// reported in log space, and Paley-Zygmund from the grid sum: an upper bound
// for log sum(b) via max + cell count must stay below n/c, giving
// P(Y_k > 0) >= exp(-n/c).
CheckReport check_final_assembly(const CheckConfig& config);

// Mechanical one-step quotients of the b definition, each factor contributing
// its own ratio (factorial steps as explicit small products, no hand
// simplification). These are the "direct quotients" the closed forms are
// verified against, and they stay exact to ~1e-14 where lgamma differences
// would drown in rounding at n ~ 1e8.
double log_b_ratio_l_up(const ModelParams& params, std::int64_t l, std::int64_t s);
double log_b_ratio_s_up(const ModelParams& params, std::int64_t l, std::int64_t s);

// Hand-derived closed forms of the five boundary ratios, in log space.
double closed_ratio_l0_over_l1(const ModelParams& params, std::int64_t l);
double closed_ratio_0s_over_1s(const ModelParams& params, std::int64_t s);
double closed_ratio_diag(const ModelParams& params, std::int64_t l);
double closed_ratio_k0_over_km1(const ModelParams& params);
double closed_ratio_km1_over_km2(const ModelParams& params);

}  // namespace mim
