#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "mim/errors.hpp"
#include "mim/exact.hpp"
#include "mim/graph.hpp"
#include "mim/moments.hpp"

using mim::LogValue;
using mim::ModelParams;

namespace {

using PairList = std::vector<std::pair<int, int>>;

// All matchings of exactly k disjoint pairs on vertex set {0..n-1}, each
// emitted once (pairs ordered by lower endpoint, endpoints ascending).
void enumerate_matchings(int n, int k, PairList& current, std::vector<PairList>& out,
                         int min_u) {
    if (static_cast<int>(current.size()) == k) {
        out.push_back(current);
        return;
    }
    for (int u = min_u; u < n; ++u) {
        bool used_u = false;
        for (const auto& [a, b] : current) used_u = used_u || a == u || b == u;
        if (used_u) continue;
        for (int v = u + 1; v < n; ++v) {
            bool used_v = false;
            for (const auto& [a, b] : current) used_v = used_v || a == v || b == v;
            if (used_v) continue;
            current.emplace_back(u, v);
            enumerate_matchings(n, k, current, out, u + 1);
            current.pop_back();
        }
    }
}

std::vector<PairList> all_matchings(int n, int k) {
    std::vector<PairList> out;
    PairList current;
    enumerate_matchings(n, k, current, out, 0);
    return out;
}

// Classification oracle against the canonical M1 = {(0,1),(2,3),...}:
// a matching is compatible iff neither matching contains a pair whose
// endpoints lie in two different pairs of the other. Compatible matchings
// are keyed by (l, s) = (#shared pairs, #pairs with exactly one endpoint in
// V(M1)).
std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> classify_against_m1(int n,
                                                                                  int k) {
    const int boundary = 2 * k;  // V(M1) = {0..2k-1}, pair of v is v/2
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> cells;
    for (const PairList& m : all_matchings(n, k)) {
        bool compatible = true;
        std::int64_t shared = 0;
        std::int64_t half = 0;

        // Pairs of M spanning two different pairs of M1.
        for (const auto& [a, b] : m) {
            const bool a_in = a < boundary;
            const bool b_in = b < boundary;
            if (a_in && b_in) {
                if (a / 2 != b / 2) {
                    compatible = false;
                    break;
                }
                ++shared;
            } else if (a_in != b_in) {
                ++half;
            }
        }
        if (!compatible) continue;

        // Pairs of M1 spanning two different pairs of M. owner[v] = index of
        // the pair of M containing v, or -1.
        std::vector<int> owner(static_cast<std::size_t>(n), -1);
        for (std::size_t i = 0; i < m.size(); ++i) {
            owner[static_cast<std::size_t>(m[i].first)] = static_cast<int>(i);
            owner[static_cast<std::size_t>(m[i].second)] = static_cast<int>(i);
        }
        for (int pair = 0; pair < k && compatible; ++pair) {
            const int oa = owner[static_cast<std::size_t>(2 * pair)];
            const int ob = owner[static_cast<std::size_t>(2 * pair + 1)];
            if (oa != -1 && ob != -1 && oa != ob) compatible = false;
        }
        if (!compatible) continue;

        ++cells[{shared, half}];
    }
    return cells;
}

// E[Y_r] oracle: average the induced-r-matching count over all 2^C(n,2)
// graphs, each weighted by its probability. Tractable for n = 4.
double expected_matchings_oracle(int n, double p, int r) {
    const int pairs = n * (n - 1) / 2;
    REQUIRE(pairs <= 10);
    const std::vector<PairList> candidates = all_matchings(n, r);
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << pairs); ++mask) {
        mim::Graph g(n);
        int idx = 0;
        for (int u = 0; u < n; ++u) {
            for (int v = u + 1; v < n; ++v, ++idx) {
                if ((mask >> idx) & 1) g.add_edge(u, v);
            }
        }
        int count = 0;
        for (const PairList& m : candidates) {
            mim::Matching mm;
            for (const auto& [a, b] : m) mm.pairs.emplace_back(a, b);
            if (mim::is_induced_matching(g, mm)) ++count;
        }
        const int edges = g.m();
        total += static_cast<double>(count) * std::pow(p, edges) *
                 std::pow(1.0 - p, pairs - edges);
    }
    return total;
}

}  // namespace

TEST_CASE("target_size") {
    CHECK(mim::target_size(1000, 0.1, 0.1) == 41);
    CHECK(mim::target_size(100, std::exp(1.0) / 100.0, 0.0) == 36);
    CHECK(mim::target_size(50, 0.9, 1.0) == 0);
    CHECK_THROWS_AS(mim::target_size(10, 0.05, 0.1), std::domain_error);  // c <= 1
}

TEST_CASE("make_params invariants") {
    const ModelParams mp = mim::make_params(1000, 0.1, 0.1);
    CHECK(mp.c == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(mp.q == doctest::Approx(1.0 / 0.9).epsilon(1e-15));
    CHECK(mp.epsilon0 == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(mp.k == 41);

    const ModelParams over = mim::make_params(1000, 0.1, 0.1, 7);
    CHECK(over.k == 7);

    const ModelParams eps0 = mim::make_params_eps0(1000, 0.1, 0.3);
    CHECK(eps0.epsilon == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(eps0.k == 41);

    const ModelParams by_c = mim::make_params_c(1000, 100.0, 0.1);
    CHECK(by_c.p == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(by_c.k == 41);

    CHECK_THROWS_AS(mim::make_params(10, 0.5, 0.1, 6), std::domain_error);  // 2k > n
    CHECK_THROWS_AS(mim::make_params(10, 0.0, 0.1, 1), std::domain_error);
    CHECK_THROWS_AS(mim::make_params(10, 1.0, 0.1, 1), std::domain_error);
}

TEST_CASE("log_expected_matchings closed form") {
    CHECK(mim::log_expected_matchings(4, 0.5, 1).value() ==
          doctest::Approx(3.0).epsilon(1e-12));
    CHECK(mim::log_expected_matchings(4, 0.5, 2).value() ==
          doctest::Approx(0.046875).epsilon(1e-12));
    CHECK(mim::log_expected_matchings(12, 0.3, 0).value() == 1.0);
    CHECK_THROWS_AS(mim::log_expected_matchings(4, 0.5, 3), std::domain_error);

    SUBCASE("agrees with the all-graphs oracle at n=4") {
        for (const double p : {0.3, 0.5, 0.8}) {
            for (const int r : {1, 2}) {
                CHECK(mim::log_expected_matchings(4, p, r).value() ==
                      doctest::Approx(expected_matchings_oracle(4, p, r)).epsilon(1e-10));
            }
        }
    }

    SUBCASE("agrees with the exact rational path") {
        for (const std::int64_t n : {6, 12, 30, 64}) {
            for (const std::int64_t r : {1, 2, 5}) {
                if (2 * r > n) continue;
                const double via_log = mim::log_expected_matchings(n, 0.37, r).log();
                const double via_exact =
                    mim::exact::log_of(mim::exact::expected_matchings(n, 0.37, r));
                CHECK(via_log == doctest::Approx(via_exact).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("count_compatible documented cells") {
    CHECK(mim::count_compatible(8, 2, 2, 0).value() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mim::count_compatible(8, 2, 0, 0).value() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(mim::count_compatible(8, 2, 0, 1).value() == doctest::Approx(48.0).epsilon(1e-12));
    CHECK(mim::count_compatible(8, 2, 3, 0).is_zero());  // l+s > k
    CHECK_THROWS_AS(mim::count_compatible(4, 2, 1, 1), std::domain_error);
    CHECK_THROWS_AS(mim::count_compatible(8, 2, -1, 0), std::domain_error);
}

TEST_CASE("count_compatible equals the classification oracle") {
    // Full classification of every size-k matching against M1, including the
    // zero count at infeasible cells. (10,2) reruns inside the acceptance
    // gate; (8,2) keeps the unit suite fast.
    const int n = 8;
    const int k = 2;
    const auto cells = classify_against_m1(n, k);
    for (std::int64_t l = 0; l <= k; ++l) {
        for (std::int64_t s = 0; l + s <= k; ++s) {
            const auto it = cells.find({l, s});
            const std::int64_t observed = it == cells.end() ? 0 : it->second;
            if (!mim::grid_cell_feasible(n, k, l, s)) {
                CHECK(observed == 0);
                continue;
            }
            const mim::exact::BigRat exact = mim::exact::count_compatible(n, k, l, s);
            CHECK(exact == mim::exact::BigRat(observed));
            CHECK(mim::count_compatible(n, k, l, s).value() ==
                  doctest::Approx(static_cast<double>(observed)).epsilon(1e-9));
        }
    }
    // The compatible matchings partition: total count equals the grid sum.
    std::int64_t total = 0;
    for (const auto& [key, count] : cells) total += count;
    std::int64_t grid = 0;
    for (std::int64_t l = 0; l <= k; ++l) {
        for (std::int64_t s = 0; l + s <= k; ++s) {
            if (!mim::grid_cell_feasible(n, k, l, s)) continue;
            grid += static_cast<std::int64_t>(
                std::llround(mim::count_compatible(n, k, l, s).value()));
        }
    }
    CHECK(total == grid);
}

TEST_CASE("conditional_expectation") {
    const ModelParams mp = mim::make_params(8, 0.3, 1.0 / 3.0, 2);
    CHECK(mim::conditional_expectation(mp, 2, 0).value() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mim::conditional_expectation(mp, 0, 0).value() ==
          doctest::Approx(0.021609).epsilon(1e-9));
    CHECK_THROWS_AS(mim::conditional_expectation(mp, 2, 1), std::domain_error);

    // l = k always conditions on the event itself, for any params.
    const ModelParams big = mim::make_params(40, 0.5, 1.0 / 3.0, 5);
    CHECK(mim::conditional_expectation(big, 5, 0).log() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("a_term documented cells and grid sum") {
    const ModelParams mp = mim::make_params(8, 0.3, 1.0 / 3.0, 2);
    CHECK(mim::a_term(mp, 2, 0).value() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mim::a_term(mp, 0, 0).value() == doctest::Approx(0.064827).epsilon(1e-9));

    // At (n=6, k=1, p=0.5): Y_1 counts edges, so E[Y^2]/E[Y] = 1 + 14p = 8
    // and the three cells are a(0,0)=3, a(0,1)=4, a(1,0)=1.
    const ModelParams edge = mim::make_params(6, 0.5, 1.0 / 3.0, 1);
    CHECK(mim::a_term(edge, 0, 0).value() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(mim::a_term(edge, 0, 1).value() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(mim::a_term(edge, 1, 0).value() == doctest::Approx(1.0).epsilon(1e-12));
    LogValue sum = LogValue::zero();
    for (std::int64_t l = 0; l <= 1; ++l) {
        for (std::int64_t s = 0; l + s <= 1; ++s) sum += mim::a_term(edge, l, s);
    }
    CHECK(sum.value() == doctest::Approx(8.0).epsilon(1e-12));

    // Same sum from first principles: E[Y^2]/E[Y] with Y ~ Bi(15, p).
    const double ey = 15.0 * 0.5;
    const double ey2 = 15.0 * 0.5 * 0.5 + ey * ey;  // var + mean^2
    CHECK(sum.value() == doctest::Approx(ey2 / ey).epsilon(1e-12));
}

TEST_CASE("b_term closed cells and normalization identity") {
    const ModelParams mp = mim::make_params(8, 0.3, 1.0 / 3.0, 2);
    CHECK(mim::b_term(mp, 0, 0).value() == doctest::Approx(1.0 / 70.0).epsilon(1e-12));
    const ModelParams mp2 = mim::make_params(8, 0.7, 1.0 / 3.0, 2);
    CHECK(mim::b_term(mp2, 0, 0).value() == doctest::Approx(1.0 / 70.0).epsilon(1e-12));

    const ModelParams edge = mim::make_params(6, 0.5, 1.0 / 3.0, 1);
    CHECK(mim::b_term(edge, 0, 0).value() == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(mim::b_term(edge, 0, 1).value() == doctest::Approx(8.0 / 15.0).epsilon(1e-12));
    CHECK(mim::b_term(edge, 1, 0).value() == doctest::Approx(2.0 / 15.0).epsilon(1e-12));

    // b = a / E[Y_k] cell by cell.
    const ModelParams ten = mim::make_params(10, 0.3, 1.0 / 3.0, 2);
    const LogValue ey = mim::log_expected_matchings(10, 0.3, 2);
    for (std::int64_t l = 0; l <= 2; ++l) {
        for (std::int64_t s = 0; l + s <= 2; ++s) {
            if (!mim::grid_cell_feasible(10, 2, l, s)) continue;
            const LogValue lhs = mim::b_term(ten, l, s);
            const LogValue rhs = mim::a_term(ten, l, s) / ey;
            CHECK(lhs.log() == doctest::Approx(rhs.log()).epsilon(1e-9));
        }
    }
}

TEST_CASE("second_moment_ratio closed forms") {
    // Y_1 on 6 vertices counts Bi(15,p) edges: ratio = 14/15 + 1/(15p).
    const ModelParams half = mim::make_params(6, 0.5, 1.0 / 3.0, 1);
    CHECK(mim::second_moment_ratio(half).value() ==
          doctest::Approx(16.0 / 15.0).epsilon(1e-12));
    const ModelParams quarter = mim::make_params(6, 0.25, 1.0 / 3.0, 1);
    CHECK(mim::second_moment_ratio(quarter).value() == doctest::Approx(1.2).epsilon(1e-12));
    for (const double p : {0.1, 0.37, 0.62, 0.9}) {
        const ModelParams mp = mim::make_params(6, p, 1.0 / 3.0, 1);
        CHECK(mim::second_moment_ratio(mp).value() ==
              doctest::Approx(14.0 / 15.0 + 1.0 / (15.0 * p)).epsilon(1e-11));
    }

    // k=2 on 4 vertices: only the (2,0) cell is feasible, and the ratio
    // collapses to 1/(3 p^2 (1-p)^4).
    const ModelParams k4 = mim::make_params(4, 0.5, 1.0 / 3.0, 2);
    CHECK(mim::second_moment_ratio(k4).value() ==
          doctest::Approx(1.0 / (3.0 * 0.25 * 0.0625)).epsilon(1e-11));
}

TEST_CASE("second_moment_ratio equals the pair-enumeration oracle") {
    // The acceptance gate runs the full 18-cell matrix; a 6-cell slice keeps
    // the unit suite quick.
    for (const std::int64_t n : {6, 8, 10}) {
        for (const double p : {0.3, 0.5}) {
            const std::int64_t k = 2;
            if (n < 2 * k) continue;
            const ModelParams mp = mim::make_params(n, p, 1.0 / 3.0, k);
            const double brute = mim::brute_force_second_moment(n, k, p);
            const double fast = mim::second_moment_ratio(mp).value();
            CHECK(std::fabs(fast - brute) <= 1e-9 * brute);
        }
    }
    CHECK_THROWS_AS(mim::brute_force_second_moment(12, 2, 0.5), mim::refusal_error);
    CHECK_THROWS_AS(mim::brute_force_second_moment(10, 4, 0.5), mim::refusal_error);
}

TEST_CASE("pz_lower_bound") {
    const ModelParams edge = mim::make_params(6, 0.5, 1.0 / 3.0, 1);
    CHECK(mim::pz_lower_bound(edge).value() == doctest::Approx(15.0 / 16.0).epsilon(1e-12));
    // True P(Y_1 > 0) = 1 - 2^-15 respects the bound.
    CHECK(1.0 - std::pow(2.0, -15.0) >= mim::pz_lower_bound(edge).value());

    const ModelParams trivial = mim::make_params(6, 0.5, 1.0 / 3.0, 0);
    CHECK(mim::pz_lower_bound(trivial).value() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("moment table layout and ratio consistency") {
    const ModelParams mp = mim::make_params(10, 0.3, 1.0 / 3.0, 2);
    const mim::MomentTable table = mim::build_moment_table(mp);
    CHECK(table.full_grid);
    CHECK(table.entries.size() == 6);  // (k+1)(k+2)/2
    CHECK(table.ratio.log() ==
          doctest::Approx(mim::second_moment_ratio(mp).log()).epsilon(1e-12));

    // l-outer, s-inner ordering.
    CHECK(table.entries[0].l == 0);
    CHECK(table.entries[0].s == 0);
    CHECK(table.entries[1].s == 1);
    CHECK(table.entries.back().l == 2);

    const std::string csv = table.to_csv();
    CHECK(csv.rfind("l,s,log_a,log_b\n", 0) == 0);

    // Sub-grid table: ratio sums only the requested cells.
    const mim::MomentTable sub = mim::build_moment_table(mp, {{0, 0}, {1, 0}});
    CHECK_FALSE(sub.full_grid);
    CHECK(sub.entries.size() == 2);
    const LogValue expect = mim::b_term(mp, 0, 0) + mim::b_term(mp, 1, 0);
    CHECK(sub.ratio.log() == doctest::Approx(expect.log()).epsilon(1e-12));

    CHECK_THROWS_AS(mim::build_moment_table(mp, {{0, 3}}), std::domain_error);
}

TEST_CASE("log path against exact rational path across operations") {
    // One mid-sized parameter set per operation; n=64 exercises the largest
    // instance the exact path accepts.
    const ModelParams mp = mim::make_params(64, 0.41, 1.0 / 3.0, 7);
    for (std::int64_t l = 0; l <= 7; ++l) {
        for (std::int64_t s = 0; l + s <= 7; ++s) {
            if (!mim::grid_cell_feasible(64, 7, l, s)) continue;
            CHECK(mim::count_compatible(64, 7, l, s).log() ==
                  doctest::Approx(mim::exact::log_of(mim::exact::count_compatible(64, 7, l, s)))
                      .epsilon(1e-9));
            CHECK(mim::conditional_expectation(mp, l, s).log() ==
                  doctest::Approx(
                      mim::exact::log_of(mim::exact::conditional_expectation(mp, l, s)))
                      .epsilon(1e-9));
            CHECK(mim::a_term(mp, l, s).log() ==
                  doctest::Approx(mim::exact::log_of(mim::exact::a_term(mp, l, s)))
                      .epsilon(1e-9));
            CHECK(mim::b_term(mp, l, s).log() ==
                  doctest::Approx(mim::exact::log_of(mim::exact::b_term(mp, l, s)))
                      .epsilon(1e-9));
        }
    }
    CHECK(mim::second_moment_ratio(mp).log() ==
          doctest::Approx(mim::exact::log_of(mim::exact::second_moment_ratio(mp)))
              .epsilon(1e-9));
    CHECK(mim::pz_lower_bound(mp).log() ==
          doctest::Approx(mim::exact::log_of(mim::exact::pz_lower_bound(mp))).epsilon(1e-9));

    CHECK_THROWS_AS(mim::exact::expected_matchings(65, 0.5, 1), mim::refusal_error);
}
