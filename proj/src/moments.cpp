#include "mim/moments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mim/errors.hpp"

namespace mim {

namespace {

double ln_factorial(std::int64_t x) {
    if (x < 0) throw std::domain_error("negative factorial argument");
    return std::lgamma(static_cast<double>(x) + 1.0);
}

// ln(1-p) without cancellation for small p.
double ln_1mp(double p) { return std::log1p(-p); }

// C(x, 2) as a double-safe product.
double choose2(std::int64_t x) { return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1); }

void require_probability(double p, const char* who) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::domain_error(std::string(who) + ": p must lie strictly in (0,1)");
    }
}

void require_grid_args(std::int64_t k, std::int64_t l, std::int64_t s) {
    if (k < 0 || l < 0 || s < 0) throw std::domain_error("grid indices must be nonnegative");
}

std::string fmt17(double v) {
    if (v == -std::numeric_limits<double>::infinity()) return "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::int64_t target_size(std::int64_t n, double p, double epsilon) {
    if (n < 1) throw std::domain_error("target_size: n must be positive");
    if (epsilon < 0.0 || epsilon > 1.0) {
        throw std::domain_error("target_size: epsilon outside [0,1]");
    }
    const double c = p * static_cast<double>(n);
    if (!(c > 1.0)) throw std::domain_error("target_size: requires c = p*n > 1");
    return static_cast<std::int64_t>(
        std::floor((1.0 - epsilon) * std::log(c) * static_cast<double>(n) / c));
}

namespace {

ModelParams assemble(std::int64_t n, double p, double epsilon,
                     std::optional<std::int64_t> k_override) {
    if (n < 1) throw std::domain_error("ModelParams: n must be positive");
    require_probability(p, "ModelParams");
    if (epsilon < 0.0 || epsilon > 1.0) {
        throw std::domain_error("ModelParams: epsilon outside [0,1]");
    }
    ModelParams mp;
    mp.n = n;
    mp.p = p;
    mp.c = p * static_cast<double>(n);
    mp.q = 1.0 / (1.0 - p);
    mp.epsilon = epsilon;
    mp.epsilon0 = 3.0 * epsilon;
    mp.k = k_override ? *k_override : target_size(n, p, epsilon);
    if (mp.k < 0) throw std::domain_error("ModelParams: k must be nonnegative");
    if (2 * mp.k > n) throw std::domain_error("ModelParams: requires 2k <= n");
    return mp;
}

}  // namespace

ModelParams make_params(std::int64_t n, double p, double epsilon,
                        std::optional<std::int64_t> k) {
    return assemble(n, p, epsilon, k);
}

ModelParams make_params_eps0(std::int64_t n, double p, double epsilon0,
                             std::optional<std::int64_t> k) {
    if (epsilon0 < 0.0 || epsilon0 > 3.0) {
        throw std::domain_error("ModelParams: epsilon0 outside [0,3]");
    }
    return assemble(n, p, epsilon0 / 3.0, k);
}

ModelParams make_params_c(std::int64_t n, double c, double epsilon,
                          std::optional<std::int64_t> k) {
    if (n < 1) throw std::domain_error("ModelParams: n must be positive");
    return assemble(n, c / static_cast<double>(n), epsilon, k);
}

LogValue log_expected_matchings(std::int64_t n, double p, std::int64_t r) {
    if (r < 0 || 2 * r > n) throw std::domain_error("log_expected_matchings: needs 0 <= 2r <= n");
    if (r == 0) return LogValue::one();
    require_probability(p, "log_expected_matchings");
    // C(n,2r) * (2r)!/(r! 2^r) = n! / ((n-2r)! r! 2^r)
    const double log_count = ln_factorial(n) - ln_factorial(n - 2 * r) - ln_factorial(r) -
                             static_cast<double>(r) * std::numbers::ln2;
    const double log_prob = static_cast<double>(r) * std::log(p) +
                            (choose2(2 * r) - static_cast<double>(r)) * ln_1mp(p);
    return LogValue::from_log(log_count + log_prob);
}

bool grid_cell_feasible(std::int64_t n, std::int64_t k, std::int64_t l, std::int64_t s) {
    return l >= 0 && s >= 0 && l + s <= k && n - 4 * k + 2 * l + s >= 0;
}

LogValue count_compatible(std::int64_t n, std::int64_t k, std::int64_t l, std::int64_t s) {
    require_grid_args(k, l, s);
    if (l + s > k) return LogValue::zero();
    if (n < 2 * k || n - 4 * k + 2 * l + s < 0) {
        throw std::domain_error("count_compatible: negative factorial argument");
    }
    const double log_count =
        static_cast<double>(l + 2 * s - k) * std::numbers::ln2 + ln_factorial(k) -
        ln_factorial(l) - ln_factorial(s) - 2.0 * ln_factorial(k - l - s) +
        ln_factorial(n - 2 * k) - ln_factorial(n - 4 * k + 2 * l + s);
    return LogValue::from_log(log_count);
}

LogValue conditional_expectation(const ModelParams& params, std::int64_t l, std::int64_t s) {
    require_grid_args(params.k, l, s);
    if (l + s > params.k) throw std::domain_error("conditional_expectation: l+s > k");
    const double log_p = std::log(params.p);
    const double exponent_1mp =
        choose2(2 * params.k) - static_cast<double>(params.k) - (choose2(2 * l + s) - static_cast<double>(l));
    return LogValue::from_log(static_cast<double>(params.k - l) * log_p +
                              exponent_1mp * ln_1mp(params.p));
}

LogValue a_term(const ModelParams& params, std::int64_t l, std::int64_t s) {
    return count_compatible(params.n, params.k, l, s) * conditional_expectation(params, l, s);
}

LogValue b_term(const ModelParams& params, std::int64_t l, std::int64_t s) {
    const std::int64_t n = params.n;
    const std::int64_t k = params.k;
    require_grid_args(k, l, s);
    if (l + s > k) return LogValue::zero();
    if (n < 2 * k || n - 4 * k + 2 * l + s < 0) {
        throw std::domain_error("b_term: negative factorial argument");
    }
    const double log_b =
        static_cast<double>(l + 2 * s) * std::numbers::ln2 + 2.0 * ln_factorial(k) -
        ln_factorial(l) - ln_factorial(s) - 2.0 * ln_factorial(k - l - s) +
        2.0 * ln_factorial(n - 2 * k) - ln_factorial(n) - ln_factorial(n - 4 * k + 2 * l + s) -
        static_cast<double>(l) * std::log(params.p) -
        (choose2(2 * l + s) - static_cast<double>(l)) * ln_1mp(params.p);
    return LogValue::from_log(log_b);
}

LogValue second_moment_ratio(const ModelParams& params) {
    LogValue acc = LogValue::zero();
    for (std::int64_t l = 0; l <= params.k; ++l) {
        for (std::int64_t s = 0; s + l <= params.k; ++s) {
            if (!grid_cell_feasible(params.n, params.k, l, s)) continue;
            acc += b_term(params, l, s);
        }
    }
    return acc;
}

LogValue pz_lower_bound(const ModelParams& params) {
    return LogValue::one() / second_moment_ratio(params);
}

namespace {

// Canonical index of pair (u,v), u < v, in the lexicographic list of all
// pairs on n vertices.
int pair_index(int n, int u, int v) {
    return u * n - u * (u + 1) / 2 + (v - u - 1);
}

struct MaskedMatching {
    std::uint64_t edge_mask = 0;     // pairs that must be edges
    std::uint64_t nonedge_mask = 0;  // pairs inside the vertex set that must not
};

}  // namespace

double brute_force_second_moment(std::int64_t n, std::int64_t k, double p) {
    if (n > 10 || k > 3) {
        throw refusal_error("brute_force_second_moment: caps are n <= 10, k <= 3");
    }
    if (k < 0 || 2 * k > n) throw std::domain_error("brute_force_second_moment: needs 2k <= n");
    require_probability(p, "brute_force_second_moment");

    const int ni = static_cast<int>(n);
    const int ki = static_cast<int>(k);

    // All size-k matchings as bitmasks over the pair universe.
    std::vector<MaskedMatching> ms;
    std::vector<std::vector<int>> raw;
    // Simple combination walk: choose 2k vertices implicitly by recursion on
    // pairs (u = lowest unmatched in the chosen support).
    struct Rec {
        int n, k;
        std::vector<std::vector<int>>& out;
        std::vector<int> flat;
        void go(int min_u) {
            if (static_cast<int>(flat.size()) == 2 * k) {
                out.push_back(flat);
                return;
            }
            for (int u = min_u; u < n; ++u) {
                bool used_u = false;
                for (int x : flat) used_u = used_u || (x == u);
                if (used_u) continue;
                for (int v = u + 1; v < n; ++v) {
                    bool used_v = false;
                    for (int x : flat) used_v = used_v || (x == v);
                    if (used_v) continue;
                    flat.push_back(u);
                    flat.push_back(v);
                    go(u + 1);
                    flat.pop_back();
                    flat.pop_back();
                }
            }
        }
    } rec{ni, ki, raw, {}};
    rec.go(0);

    for (const auto& flat : raw) {
        MaskedMatching mm;
        for (std::size_t i = 0; i < flat.size(); i += 2) {
            mm.edge_mask |= 1ULL << pair_index(ni, flat[i], flat[i + 1]);
        }
        std::vector<int> vs = flat;
        std::sort(vs.begin(), vs.end());
        for (std::size_t a = 0; a < vs.size(); ++a) {
            for (std::size_t b = a + 1; b < vs.size(); ++b) {
                const std::uint64_t bit = 1ULL << pair_index(ni, vs[a], vs[b]);
                if (!(mm.edge_mask & bit)) mm.nonedge_mask |= bit;
            }
        }
        ms.push_back(mm);
    }

    // Power tables over the at most C(10,2)=45 pair indices.
    double powp[64];
    double pow1mp[64];
    powp[0] = pow1mp[0] = 1.0;
    for (int i = 1; i < 64; ++i) {
        powp[i] = powp[i - 1] * p;
        pow1mp[i] = pow1mp[i - 1] * (1.0 - p);
    }

    double ey2 = 0.0;
    for (const auto& A : ms) {
        for (const auto& B : ms) {
            const std::uint64_t edges = A.edge_mask | B.edge_mask;
            const std::uint64_t nonedges = A.nonedge_mask | B.nonedge_mask;
            if (edges & nonedges) continue;  // contradictory requirements
            ey2 += powp[std::popcount(edges)] * pow1mp[std::popcount(nonedges)];
        }
    }
    const double ey = static_cast<double>(ms.size()) * powp[ki] *
                      pow1mp[static_cast<int>(choose2(2 * k)) - ki];
    return ey2 / (ey * ey);
}

std::string MomentTable::to_csv() const {
    std::string out = "l,s,log_a,log_b\n";
    for (const auto& e : entries) {
        out += std::to_string(e.l);
        out += ',';
        out += std::to_string(e.s);
        out += ',';
        out += fmt17(e.a.log());
        out += ',';
        out += fmt17(e.b.log());
        out += '\n';
    }
    return out;
}

namespace {

MomentTable build_table_impl(const ModelParams& params,
                             const std::vector<std::pair<std::int64_t, std::int64_t>>* cells) {
    MomentTable t;
    t.params = params;
    t.full_grid = (cells == nullptr);
    LogValue acc = LogValue::zero();
    auto add_cell = [&](std::int64_t l, std::int64_t s) {
        MomentEntry e;
        e.l = l;
        e.s = s;
        if (grid_cell_feasible(params.n, params.k, l, s)) {
            e.a = a_term(params, l, s);
            e.b = b_term(params, l, s);
        }
        acc += e.b;
        t.entries.push_back(e);
    };
    if (cells == nullptr) {
        for (std::int64_t l = 0; l <= params.k; ++l) {
            for (std::int64_t s = 0; s + l <= params.k; ++s) add_cell(l, s);
        }
    } else {
        for (const auto& [l, s] : *cells) {
            if (l < 0 || s < 0 || l + s > params.k) {
                throw std::domain_error("build_moment_table: cell outside the grid");
            }
            add_cell(l, s);
        }
    }
    t.ratio = acc;
    return t;
}

}  // namespace

MomentTable build_moment_table(const ModelParams& params) {
    return build_table_impl(params, nullptr);
}

MomentTable build_moment_table(
    const ModelParams& params,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& cells) {
    return build_table_impl(params, &cells);
}

}  // namespace mim
