#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "doctest.h"

#include "mim/bounds.hpp"
#include "mim/errors.hpp"
#include "mim/exact.hpp"
#include "mim/moments.hpp"

using mim::CheckConfig;
using mim::CheckReport;
using mim::ModelParams;

namespace {

// The pinned large-parameter point used throughout: n=1e8, c=1e4, eps=0.3.
ModelParams pinned_scale() { return mim::make_params_c(100'000'000, 10'000.0, 0.3); }

const mim::SubCheck& find_subcheck(const CheckReport& report, const std::string& name) {
    for (const mim::SubCheck& sc : report.subchecks) {
        if (sc.name == name) return sc;
    }
    REQUIRE_MESSAGE(false, "missing subcheck ", name);
    static mim::SubCheck dummy;
    return dummy;
}

double log_b_diff(const ModelParams& mp, std::int64_t l1, std::int64_t s1, std::int64_t l2,
                  std::int64_t s2) {
    return mim::b_term(mp, l1, s1).log() - mim::b_term(mp, l2, s2).log();
}

}  // namespace

TEST_CASE("f_terms splits exactly and rejects the boundary") {
    const ModelParams mp = mim::make_params_c(200, 20.0, 0.3);
    REQUIRE(mp.k == 20);
    for (std::int64_t l = 1; l <= mp.k - 2; l += 3) {
        for (std::int64_t s = 1; l + s <= mp.k - 1; s += 2) {
            const mim::FTerms t = mim::f_terms(mp, l, s);
            CHECK(std::fabs(t.F - (t.F1 + t.F2)) <=
                  1e-12 * std::max(1.0, std::fabs(t.F1) + std::fabs(t.F2)));
        }
    }
    CHECK_THROWS_AS(mim::f_terms(mp, 0, 1), std::domain_error);
    CHECK_THROWS_AS(mim::f_terms(mp, 1, 0), std::domain_error);
    CHECK_THROWS_AS(mim::f_terms(mp, 1, mp.k - 1), std::domain_error);

    const ModelParams tiny = mim::make_params(10, 0.4, 1.0 / 3.0, 2);
    CHECK_THROWS_AS(mim::f_terms(tiny, 1, 1), std::domain_error);
}

TEST_CASE("closed ratio forms match the b definition") {
    SUBCASE("documented instance at (n=20, k=3, p=0.2, l=1)") {
        const ModelParams mp = mim::make_params(20, 0.2, 1.0 / 3.0, 3);
        // (1/4) * (n-4k+2l+1)/(k-l)^2 * (1-p)^(2l) = 11/16 * 0.64 = 0.44.
        const double closed = mim::closed_ratio_l0_over_l1(mp, 1);
        CHECK(closed == doctest::Approx(std::log(0.44)).epsilon(1e-12));
        CHECK(closed == doctest::Approx(log_b_diff(mp, 1, 0, 1, 1)).epsilon(1e-9));
    }

    SUBCASE("all five families against b_term and the exact path") {
        for (const double p : {0.2, 0.5}) {
            const ModelParams mp = mim::make_params(30, p, 1.0 / 3.0, 4);
            const std::int64_t k = mp.k;
            for (std::int64_t l = 0; l <= k - 1; ++l) {
                CHECK(mim::closed_ratio_l0_over_l1(mp, l) ==
                      doctest::Approx(log_b_diff(mp, l, 0, l, 1)).epsilon(1e-9));
                CHECK(mim::closed_ratio_0s_over_1s(mp, l) ==
                      doctest::Approx(log_b_diff(mp, 0, l, 1, l)).epsilon(1e-9));
                CHECK(mim::closed_ratio_diag(mp, l) ==
                      doctest::Approx(log_b_diff(mp, l, k - l, l, k - l - 1)).epsilon(1e-9));
            }
            CHECK(mim::closed_ratio_k0_over_km1(mp) ==
                  doctest::Approx(log_b_diff(mp, k, 0, k - 1, 0)).epsilon(1e-9));
            CHECK(mim::closed_ratio_km1_over_km2(mp) ==
                  doctest::Approx(log_b_diff(mp, k - 1, 0, k - 2, 0)).epsilon(1e-9));

            // Same quotients out of the big-rational path.
            const auto exact_diff = [&](std::int64_t l1, std::int64_t s1, std::int64_t l2,
                                        std::int64_t s2) {
                return mim::exact::log_of(mim::exact::b_term(mp, l1, s1) /
                                          mim::exact::b_term(mp, l2, s2));
            };
            CHECK(mim::closed_ratio_k0_over_km1(mp) ==
                  doctest::Approx(exact_diff(k, 0, k - 1, 0)).epsilon(1e-9));
            CHECK(mim::closed_ratio_diag(mp, 1) ==
                  doctest::Approx(exact_diff(1, k - 1, 1, k - 2)).epsilon(1e-9));
        }
    }

    SUBCASE("one-step quotients telescope the b grid") {
        const ModelParams mp = mim::make_params(40, 0.3, 1.0 / 3.0, 5);
        for (std::int64_t l = 0; l <= 3; ++l) {
            for (std::int64_t s = 0; l + s <= 4; ++s) {
                CHECK(mim::log_b_ratio_l_up(mp, l, s) ==
                      doctest::Approx(log_b_diff(mp, l + 1, s, l, s)).epsilon(1e-9));
                CHECK(mim::log_b_ratio_s_up(mp, l, s) ==
                      doctest::Approx(log_b_diff(mp, l, s + 1, l, s)).epsilon(1e-9));
            }
        }
        CHECK_THROWS_AS(mim::log_b_ratio_l_up(mp, 3, 2), std::domain_error);
        CHECK_THROWS_AS(mim::log_b_ratio_s_up(mp, 0, 5), std::domain_error);
    }
}

TEST_CASE("interior and boundary point selection") {
    const ModelParams mp = mim::make_params_c(100, 10.0, 0.3);
    REQUIRE(mp.k == 16);

    CheckConfig full;
    full.params = mp;
    full.grid = mim::GridKind::Full;
    const auto full_pts = mim::interior_points(full);
    CHECK(full_pts.size() == 105);  // sum over l=1..14 of (15-l)

    CheckConfig lattice;
    lattice.params = mp;
    const auto lattice_pts = mim::interior_points(lattice);
    CHECK(lattice_pts == full_pts);  // k-2 <= 200: auto stride degenerates to 1

    CheckConfig coarse;
    coarse.params = mp;
    coarse.step_l = 6;
    coarse.step_s = 6;
    const auto coarse_pts = mim::interior_points(coarse);
    CHECK(coarse_pts.size() < full_pts.size());
    for (const auto& [l, s] : coarse_pts) {
        CHECK(l >= 1);
        CHECK(s >= 1);
        CHECK(l + s <= mp.k - 1);
    }

    CheckConfig explicit_cfg;
    explicit_cfg.params = mp;
    explicit_cfg.grid = mim::GridKind::Explicit;
    explicit_cfg.points = {{2, 3}, {1, 1}, {2, 3}};
    const auto explicit_pts = mim::interior_points(explicit_cfg);
    CHECK(explicit_pts == decltype(explicit_pts){{1, 1}, {2, 3}});
    explicit_cfg.points = {{0, 5}};
    CHECK_THROWS_AS(mim::interior_points(explicit_cfg), std::invalid_argument);

    CheckConfig huge;
    huge.params = pinned_scale();
    huge.grid = mim::GridKind::Full;
    CHECK_THROWS_AS(mim::interior_points(huge), mim::refusal_error);

    const ModelParams small_k = mim::make_params(30, 0.3, 1.0 / 3.0, 2);
    CheckConfig no_interior;
    no_interior.params = small_k;
    CHECK(mim::interior_points(no_interior).empty());

    const auto boundary = mim::boundary_points(mim::make_params(30, 0.3, 1.0 / 3.0, 3));
    // l-axis (1..3), s-axis (1..3), diagonal (1,2),(2,1); (0,0) excluded.
    CHECK(boundary.size() == 8);
    for (const auto& [l, s] : boundary) {
        CHECK((l == 0 || s == 0 || l + s == 3));
        CHECK(!(l == 0 && s == 0));
    }
}

TEST_CASE("interior bound at the pinned large parameters") {
    CheckConfig config;
    config.params = pinned_scale();
    const CheckReport report = mim::check_interior_bound(config);
    CHECK(report.check_name == "interior_bound");
    CHECK(report.holds);
    CHECK(find_subcheck(report, "b_below_exp_n_over_3c").holds);
    CHECK(find_subcheck(report, "f_split_identity").holds);
    CHECK(find_subcheck(report, "case_partition").holds);
    CHECK(find_subcheck(report, "alpha_stationary_point").holds);
    CHECK(find_subcheck(report, "alpha_stationary_point").advisory);
    CHECK(report.details.at("points_evaluated") > 100.0);
    CHECK(report.details.at("bound_log") ==
          doctest::Approx(100'000'000.0 / 30'000.0).epsilon(1e-12));
    CHECK(report.details.at("max_log_b") < report.details.at("bound_log"));
    CHECK(report.witnesses.size() <= 5);
    // Both cases of the threshold partition show up at this scale.
    CHECK(report.details.at("case_i_points") > 0.0);
    CHECK(report.details.at("case_ii_points") > 0.0);
}

TEST_CASE("interior bound report stays coherent at toy scale") {
    CheckConfig config;
    config.params = mim::make_params_c(100, 10.0, 0.3);
    config.report_worst = 2;
    const CheckReport report = mim::check_interior_bound(config);
    CHECK(report.subchecks.size() == 5);
    CHECK(report.witnesses.size() <= 2);
    // margin mirrors the weakest swept point whichever way the verdict went.
    CHECK(report.margin.log() ==
          doctest::Approx(report.details.at("bound_log") - report.details.at("max_log_b"))
              .epsilon(1e-12));
}

TEST_CASE("global bound at the pinned large parameters") {
    CheckConfig config;
    config.params = pinned_scale();
    const CheckReport report = mim::check_global_bound(config);
    CHECK(report.holds);
    CHECK(find_subcheck(report, "b_below_exp_n_over_2c").holds);
    CHECK(find_subcheck(report, "b00_at_most_one").holds);
    const mim::SubCheck& arith = find_subcheck(report, "arithmetic_implication");
    CHECK(arith.holds);
    // 9 ln n + n/(3c) vs n/(2c): margin is 5000 - 165.8... - 3333.3...
    CHECK(arith.margin == doctest::Approx(5000.0 - 9.0 * std::log(1e8) - 10000.0 / 3.0)
                              .epsilon(1e-9));
    CHECK(report.details.at("log_b00") < 0.0);
    CHECK(report.details.at("in_sparse_regime") == 1.0);
}

TEST_CASE("boundary ratios at the pinned large parameters") {
    CheckConfig config;
    config.params = pinned_scale();
    const CheckReport report = mim::check_boundary_ratios(config);
    CHECK(report.holds);
    for (const char* name : {"ratio_l0_le_n_l1", "ratio_0s_le_n3_1s", "ratio_diag_le_n2_step",
                             "ratio_k0_le_n2_km1", "ratio_km1_le_n2_km2"}) {
        CHECK(find_subcheck(report, name).holds);
    }
    CHECK(find_subcheck(report, "closed_forms_match_direct_quotients").holds);
    CHECK(report.details.at("max_quotient_rel_error") <= 1e-9);
    CHECK(find_subcheck(report, "boundary_chains_reach_interior").holds);
    CHECK(report.details.at("max_chain_cost_exponent") == 7.0);  // realized at (0,k)
    CHECK(find_subcheck(report, "worked_chain_km1_1_le_n5_km2_1").holds);
}

TEST_CASE("boundary ratios stay coherent at small k") {
    // k=3 exercises every chain branch: corners, axes and diagonal all lie
    // one or two moves from the single interior cell (1,1).
    CheckConfig config;
    config.params = mim::make_params(1000, 0.02, 1.0 / 3.0, 3);
    const CheckReport report = mim::check_boundary_ratios(config);
    CHECK(find_subcheck(report, "closed_forms_match_direct_quotients").holds);
    CHECK(find_subcheck(report, "boundary_chains_reach_interior").holds);
    CHECK(report.details.at("chains_checked") == 8.0);
}

TEST_CASE("dense regime checks") {
    SUBCASE("refuses outside its regime") {
        CheckConfig config;
        config.params = mim::make_params_c(1'000'000, 300.0, 1.0 / 3.0);
        CHECK_THROWS_AS(mim::check_dense_regime(config), mim::refusal_error);
    }

    SUBCASE("prefactor constant and report coherence at the pinned point") {
        CheckConfig config;
        config.params = mim::make_params_c(1'000'000, 5000.0, 1.0 / 3.0);
        const CheckReport report = mim::check_dense_regime(config);
        const mim::SubCheck& pref = find_subcheck(report, "prefactor_constant");
        CHECK(pref.holds);
        CHECK(report.details.at("prefactor_max") ==
              doctest::Approx(64.0 / 3.0).epsilon(1e-12));
        // The full-grid sum the check accumulated is the second moment ratio.
        CHECK(report.details.at("sum_b") ==
              doctest::Approx(mim::second_moment_ratio(config.params).value())
                  .epsilon(1e-9));
        CHECK(find_subcheck(report, "b00_within_delta").holds);
        CHECK(report.subchecks.size() == 4);
    }

    SUBCASE("all four bounds hold once k is genuinely small") {
        // The decay bounds need k^2/n tiny, the defining feature of the
        // asymptotic dense regime; pin k=3 explicitly to land inside it.
        CheckConfig config;
        config.params = mim::make_params_c(1'000'000, 5000.0, 1.0 / 3.0, 3);
        const CheckReport report = mim::check_dense_regime(config);
        CHECK(report.holds);
        CHECK(find_subcheck(report, "b_below_n_decay").holds);
        CHECK(find_subcheck(report, "b00_within_delta").holds);
        CHECK(find_subcheck(report, "sum_b_close_to_one").holds);
        CHECK(report.details.at("sum_b") == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("talagrand exponent arithmetic") {
    SUBCASE("holds at c = e^100, threshold 96 for eps = 1/3") {
        const CheckReport report =
            mim::check_talagrand_arithmetic(100'000'000, std::exp(100.0), 1.0 / 3.0);
        CHECK(report.holds);
        CHECK(find_subcheck(report, "deviation_identity").holds);
        CHECK(find_subcheck(report, "exponent_identity").holds);
        CHECK(find_subcheck(report, "final_inequality").holds);
        CHECK(report.details.at("threshold_ln_c") == doctest::Approx(96.0).epsilon(1e-12));
        CHECK(report.details.at("ln_c") == doctest::Approx(100.0).epsilon(1e-12));
    }

    SUBCASE("fails honestly below the threshold, identities intact") {
        const CheckReport report =
            mim::check_talagrand_arithmetic(100'000'000, std::exp(95.0), 1.0 / 3.0);
        CHECK_FALSE(report.holds);
        CHECK(find_subcheck(report, "deviation_identity").holds);
        CHECK(find_subcheck(report, "exponent_identity").holds);
        CHECK_FALSE(find_subcheck(report, "final_inequality").holds);
    }

    SUBCASE("threshold moves with epsilon") {
        // eps = 0.8: 16(1-eps)/eps^2 = 5, so c = e^6 clears it.
        const CheckReport report =
            mim::check_talagrand_arithmetic(1000, std::exp(6.0), 0.8);
        CHECK(report.holds);
        CHECK(report.details.at("threshold_ln_c") == doctest::Approx(5.0).epsilon(1e-12));
    }

    SUBCASE("input validation") {
        CHECK_THROWS_AS(mim::check_talagrand_arithmetic(0, 100.0, 0.3),
                        std::invalid_argument);
        CHECK_THROWS_AS(mim::check_talagrand_arithmetic(10, 0.5, 0.3),
                        std::invalid_argument);
        CHECK_THROWS_AS(mim::check_talagrand_arithmetic(10, 100.0, 0.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(mim::check_talagrand_arithmetic(10, 100.0, 1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("final assembly") {
    SUBCASE("holds at the pinned large parameters") {
        CheckConfig config;
        config.params = pinned_scale();
        const CheckReport report = mim::check_final_assembly(config);
        CHECK(report.holds);
        const mim::SubCheck& closing = find_subcheck(report, "closing_arithmetic");
        CHECK(closing.holds);
        CHECK(closing.margin ==
              doctest::Approx(10000.0 - 2.0 * std::log(1e8) - 5000.0).epsilon(1e-9));
        CHECK(find_subcheck(report, "grid_sum_below_exp_n_over_c").holds);
        CHECK(report.details.at("pz_floor_log") == doctest::Approx(-10000.0).epsilon(1e-12));
        CHECK(report.details.at("chain_margin_log") ==
              doctest::Approx(-10000.0).epsilon(1e-12));
        CHECK(report.details.at("sum_upper_log") <= 10000.0);
        // The swept partial sum can never exceed the counted upper bound.
        CHECK(report.details.at("swept_sum_log") <= report.details.at("sum_upper_log"));
        CHECK(report.witnesses.size() == 1);
    }

    SUBCASE("refuses the dense regime") {
        CheckConfig config;
        config.params = mim::make_params_c(1'000'000, 5000.0, 1.0 / 3.0);
        CHECK_THROWS_AS(mim::check_final_assembly(config), mim::refusal_error);
    }
}

TEST_CASE("report table rendering") {
    CheckConfig config;
    config.params = mim::make_params_c(100, 10.0, 0.3);
    const CheckReport report = mim::check_interior_bound(config);
    const std::string table = report.to_table();
    CHECK(table.find("check: interior_bound") != std::string::npos);
    CHECK(table.find("holds:") != std::string::npos);
    CHECK(table.find("subchecks:") != std::string::npos);
    CHECK(table.find("f_split_identity") != std::string::npos);
}
