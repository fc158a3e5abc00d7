#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ppa/experiments.hpp"
#include "ppa/mp1.hpp"
#include "ppa/rng.hpp"

using namespace ppa;

TEST_CASE("estimate_ratio exact endpoints") {
    // all demand fits: accept-all is clairvoyant
    const MarketParams roomy{6, 12, 0.5, 0.5};
    InitialSequence seq = build_instance("1,a,0,1,0,a,0,0,1,0,0,a");
    RatioEstimate est = estimate_ratio(policy_factory("accept-all"), seq, roomy, 1000, 3);
    CHECK(est.mean_ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.ci_half_width_95 == doctest::Approx(0.0));
    CHECK(est.opt_value == doctest::Approx(opt_offline(3, 3, 6, 0.5)));

    RatioEstimate zero = estimate_ratio(policy_factory("reject-all"), seq, roomy, 1000, 3);
    CHECK(zero.mean_ratio == 0.0);

    InitialSequence empty = build_all_empty(12);
    CHECK_THROWS_AS(estimate_ratio(policy_factory("ball"), empty, roomy, 1000, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_ratio(policy_factory("ball"), seq, roomy, 10, 3),
                    std::invalid_argument);
}

TEST_CASE("estimate_ratio is reproducible and thread-count independent") {
    const MarketParams params{40, 200, 0.5, 0.5};
    InitialSequence seq = table2_instance(40, 200);
    RatioEstimate one = estimate_ratio(policy_factory("alg1"), seq, params, 2000, 11, 1);
    RatioEstimate again = estimate_ratio(policy_factory("alg1"), seq, params, 2000, 11, 1);
    RatioEstimate many = estimate_ratio(policy_factory("alg1"), seq, params, 2000, 11, 4);
    CHECK(one.mean_ratio == again.mean_ratio);
    CHECK(one.mean_ratio == many.mean_ratio);
    CHECK(one.ci_half_width_95 == many.ci_half_width_95);
}

TEST_CASE("confidence width shrinks like the square root of trials") {
    const MarketParams params{20, 100, 0.5, 0.5};
    InitialSequence seq = table2_instance(20, 100);
    const double w1 =
        estimate_ratio(policy_factory("alg1"), seq, params, 1000, 5).ci_half_width_95;
    const double w4 =
        estimate_ratio(policy_factory("alg1"), seq, params, 4000, 5).ci_half_width_95;
    const double w16 =
        estimate_ratio(policy_factory("alg1"), seq, params, 16000, 5).ci_half_width_95;
    CHECK(w4 <= w1);
    CHECK(w16 <= w4);
    CHECK(w1 / w4 == doctest::Approx(2.0).epsilon(0.5));
    CHECK(w4 / w16 == doctest::Approx(2.0).epsilon(0.5));
}

TEST_CASE("impossibility pair construction") {
    const auto [v_seq, w_seq] = impossibility_pair(2, 6);
    CHECK(v_seq.slots() == parse_slots("a,a,0,0,0,0"));
    CHECK(w_seq.slots() == parse_slots("a,a,1,1,0,0"));
    CHECK(opt_offline(v_seq.n1(), v_seq.n2(), 2, 0.5) == doctest::Approx(0.5 * 2));
    CHECK(opt_offline(w_seq.n1(), w_seq.n2(), 2, 0.5) == doctest::Approx(2.0));
    for (int i = 1; i <= 2; ++i) CHECK(v_seq.slot(i) == w_seq.slot(i));
    CHECK_THROWS_AS(impossibility_pair(4, 6), std::invalid_argument);
}

TEST_CASE("upper bound check sanity at small scale") {
    const BoundCheck check =
        upper_bound_check(policy_factory("ball"), 5, 100, 0.5, 0.5, 2000, 9);
    CHECK(check.min_ratio <= check.bound + 2.0 * std::max(check.first.ci_half_width_95,
                                                          check.second.ci_half_width_95));
    CHECK(check.bound == doctest::Approx(0.5 + 0.5 / 1.5 + 3.0 * 0.5 * 25.0 / 100.0));
    // the fixed-threshold rule accepts floor(b/(2-a)) = 3 discounts on both
    CHECK(check.first.mean_ratio == doctest::Approx(3.0 * 0.5 / 2.5));
}

TEST_CASE("concentration violations are impossible on a vacuous instance") {
    InitialSequence seq = build_instance("1,a,0,1,a,0,1,a,0,1");
    CHECK(empirical_concentration_rate(seq, 0.5, 200, 4) == 0.0);
}

TEST_CASE("table3 reproduction rows") {
    const std::string csv = reproduce_table3({0.2, 0.9, 1.0});
    CHECK(csv.find("p,gamma_star,success\n") != std::string::npos);
    CHECK(csv.find("0.2,0.486") != std::string::npos);
    CHECK(csv.find("0.9,0.397") != std::string::npos);
    CHECK(csv.find("1,0.367879,0.367879") != std::string::npos);
}

TEST_CASE("figure2 driver emits one row per cell") {
    const std::string csv = reproduce_figure2({0.5}, {0.5}, {0.5}, 22);
    CHECK(csv.find("a,kappa,p,c_star,alg1_ratio\n") != std::string::npos);
    CHECK(csv.find("0.5,0.5,0.5,0.85") != std::string::npos);
    CHECK(csv.find(",0.833333\n") != std::string::npos);
}

TEST_CASE("non-adaptive rule lands in its analyzed band on the front-loaded instance") {
    // b = 400 is large enough for the error term to stay inside [0.78, 0.84]
    const MarketParams params{400, 10000, 0.5, 0.5};
    const InitialSequence seq = table2_instance(400, 10000);
    const RatioEstimate est = estimate_ratio(policy_factory("alg1"), seq, params, 2000, 31);
    CHECK(est.mean_ratio >= 0.78);
    CHECK(est.mean_ratio <= 0.84);
}

TEST_CASE("policy ordering on the front-loaded instance at small b/n") {
    // at b/n = 0.2 the four estimates separate cleanly:
    // uniform < mixture < alg1 < alg2, gaps beyond the combined intervals
    const int n = 2000, b = 400;
    const long trials = 2000;
    const MarketParams params{b, n, 0.5, 0.5};
    const InitialSequence seq = table2_instance(b, n);
    const double c_star = solve_mp1(Mp1Params::normalized(0.5, 0.5, 0.2), 40, 1e-4).c_star;

    const RatioEstimate uniform =
        estimate_ratio(policy_factory("uniform"), seq, params, trials, 41);
    const RatioEstimate mixture =
        estimate_ratio(policy_factory("mixture"), seq, params, trials, 42);
    const RatioEstimate alg1 = estimate_ratio(policy_factory("alg1"), seq, params, trials, 43);
    const RatioEstimate alg2 =
        estimate_ratio(policy_factory("alg2", std::min(c_star, 0.99)), seq, params, trials, 44);

    CHECK(uniform.mean_ratio + uniform.ci_half_width_95 <
          mixture.mean_ratio - mixture.ci_half_width_95);
    CHECK(mixture.mean_ratio + mixture.ci_half_width_95 <
          alg1.mean_ratio - alg1.ci_half_width_95);
    CHECK(alg1.mean_ratio + alg1.ci_half_width_95 < alg2.mean_ratio - alg2.ci_half_width_95);
}

TEST_CASE("drivers are byte-stable across repeat runs and thread counts") {
    const std::string once = reproduce_table2(0.5, 0.5, 30, 120, 1000, 21, 1);
    const std::string twice = reproduce_table2(0.5, 0.5, 30, 120, 1000, 21, 4);
    CHECK(once == twice);
    CHECK(once.find("policy,estimate,ci_half_width,analytic\n") != std::string::npos);
    // the fixed-threshold row is deterministic: floor(30/1.5)*0.5 / 15
    CHECK(once.find("ball,0.666667,") != std::string::npos);
    const std::string b1 = reproduce_bound61(0.5, 0.5, 400, 1000, 13, 1);
    const std::string b2 = reproduce_bound61(0.5, 0.5, 400, 1000, 13, 3);
    CHECK(b1 == b2);
}
