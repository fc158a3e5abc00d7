#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include "ppa/policies.hpp"
#include "ppa/rng.hpp"

using namespace ppa;

namespace {

// exhaustive oracle: try every acceptance subset under the capacity
double opt_brute_force(const std::vector<SlotKind>& slots, int b, double a) {
    std::vector<double> values;
    for (SlotKind k : slots) {
        if (k == SlotKind::Type1) values.push_back(1.0);
        if (k == SlotKind::Type2) values.push_back(a);
    }
    const int m = int(values.size());
    REQUIRE(m <= 20);
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        if (int(std::popcount(mask)) > b) continue;
        double revenue = 0.0;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) revenue += values[std::size_t(i)];
        best = std::max(best, revenue);
    }
    return best;
}

InitialSequence random_instance(Rng& rng, int n) {
    std::vector<SlotKind> slots;
    for (int i = 0; i < n; ++i) slots.push_back(SlotKind(rng.uniform_int(3)));
    return InitialSequence(std::move(slots));
}

// literal transcription of the adaptive pseudocode, kept independent of
// the production policy for cross-checking
std::vector<bool> adaptive_reference_trace(const Realization& r, const MarketParams& mp, double c) {
    const double phi = (1.0 - c) / (1.0 - mp.a);
    const double delta = phi * mp.b / mp.n;
    int q1 = 0, q2 = 0, inventory = mp.b;
    std::vector<bool> decisions;
    for (int i = 1; i <= mp.n; ++i) {
        const double lambda = double(i) / mp.n;
        const SlotKind v = r.arrival(i);
        if (v == SlotKind::Empty) {
            decisions.push_back(false);
            continue;
        }
        double u1, u12;
        if (lambda < delta) {
            u1 = u12 = mp.b;
        } else {
            const int o1 = r.o1(i), o2 = r.o2(i);
            u1 = std::min(o1 / (lambda * mp.p),
                          (o1 + (1 - lambda) * (1 - mp.p) * mp.n) / (1 - mp.p + lambda * mp.p));
            u12 = std::min((o1 + o2) / (lambda * mp.p),
                           (o1 + o2 + (1 - lambda) * (1 - mp.p) * mp.n) /
                               (1 - mp.p + lambda * mp.p));
        }
        bool accept = false;
        if (inventory > 0) {
            if (v == SlotKind::Type1) {
                accept = true;
                ++q1;
            } else if (u12 < mp.b) {
                accept = true;
                ++q2;
            } else if (q2 <= std::floor(phi * mp.b + c * std::max(double(mp.b) - u1, 0.0))) {
                accept = true;
                ++q2;
            }
        }
        if (accept) --inventory;
        decisions.push_back(accept);
    }
    return decisions;
}

std::vector<bool> run_trace(Policy& policy, const Realization& r, const MarketParams& mp) {
    std::vector<TrajectoryRow> rows;
    run_policy(policy, r, mp, &rows);
    std::vector<bool> decisions;
    for (const auto& row : rows) decisions.push_back(row.decision);
    return decisions;
}

struct GreedyViolator final : Policy {
    bool decide(int, SlotKind, int) override { return true; }  // ignores inventory
    Counters counters() const override { return {}; }
};

}  // namespace

TEST_CASE("opt_offline matches the subset brute force") {
    // the four-customer worked case
    CHECK(opt_offline(3, 5, 4, 0.5) == doctest::Approx(3.5));
    CHECK(opt_offline(0, 0, 7, 0.3) == 0.0);
    CHECK(opt_offline(4, 9, 4, 0.25) == doctest::Approx(4.0));

    Rng rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 3 + int(rng.uniform_int(8));
        InitialSequence seq = random_instance(rng, n);
        const int b = 1 + int(rng.uniform_int(std::uint64_t(n)));
        const double a = 0.05 + 0.9 * rng.uniform_double();
        CHECK(opt_offline(seq.n1(), seq.n2(), b, a) ==
              doctest::Approx(opt_brute_force(seq.slots(), b, a)).epsilon(1e-12));
    }
}

TEST_CASE("run_policy with accept-all and reject-all") {
    MarketParams mp{4, 8, 0.5, 0.5};
    InitialSequence seq = build_instance("1,a,0,1,0,a,0,0");  // n1 + n2 = 4 = b
    Realization r = sample_realization(seq, 0.5, 3);

    auto accept = make_accept_all(mp);
    AllocationOutcome out = run_policy(*accept, r, mp);
    CHECK(out.revenue == doctest::Approx(opt_offline(seq.n1(), seq.n2(), mp.b, mp.a)));
    CHECK(out.q1_final + out.q2_final == 4);

    auto reject = make_reject_all(mp);
    CHECK(run_policy(*reject, r, mp).revenue == 0.0);
}

TEST_CASE("run_policy fails loudly on a contract violation") {
    MarketParams mp{1, 4, 0.5, 0.5};
    InitialSequence seq = build_instance("1,1,1,1");
    Realization r = sample_realization(seq, 0.0, 1);
    GreedyViolator bad;
    CHECK_THROWS_AS(run_policy(bad, r, mp), PolicyContractViolation);
}

TEST_CASE("run_policy rejects a horizon mismatch") {
    MarketParams mp{2, 6, 0.5, 0.5};
    InitialSequence seq = build_instance("1,a,0,1");
    Realization r = sample_realization(seq, 0.0, 1);
    auto policy = make_accept_all(mp);
    CHECK_THROWS_AS(run_policy(*policy, r, mp), std::invalid_argument);
}

TEST_CASE("non-adaptive policy follows the hand trace") {
    // theta*b = 2/3 so the fixed quota is empty; only step 3 is accepted
    MarketParams mp{2, 4, 0.5, 0.5};
    InitialSequence seq = build_instance("a,a,1,a");
    Realization r = sample_realization(seq, 0.0, 1);
    auto policy = make_alg1(mp);
    std::vector<TrajectoryRow> rows;
    AllocationOutcome out = run_policy(*policy, r, mp, &rows);

    CHECK(run_trace(*make_alg1(mp), r, mp) == std::vector<bool>{false, false, true, false});
    CHECK(out.revenue == doctest::Approx(1.0));
    CHECK(out.final_counters.q1 == 1);
    CHECK(out.final_counters.q2e == 0);
    CHECK(out.final_counters.q2f == 0);
    CHECK(opt_offline(seq.n1(), seq.n2(), mp.b, mp.a) == doctest::Approx(1.5));
}

TEST_CASE("non-adaptive policy at p=0 matches the fixed-threshold rule decision-for-decision") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 5 + int(rng.uniform_int(30));
        InitialSequence seq = random_instance(rng, n);
        MarketParams mp{1 + int(rng.uniform_int(std::uint64_t(n))), n,
                        0.05 + 0.9 * rng.uniform_double(), 0.0};
        Realization r = sample_realization(seq, 0.0, rng.next_u64());
        auto a1 = make_alg1(mp);
        auto ball = make_ball_queyranne(mp);
        CHECK(run_trace(*a1, r, mp) == run_trace(*ball, r, mp));
    }
}

TEST_CASE("non-adaptive counters respect both quotas on the all-discount instance") {
    // b = n, every arrival is type-2: the analyzed worst case
    const int n = 500;
    MarketParams mp{n, n, 0.5, 0.5};
    std::vector<SlotKind> slots(std::size_t(n), SlotKind::Type2);
    InitialSequence seq{std::move(slots)};
    const double theta = (1.0 - mp.p) / (2.0 - mp.a);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Realization r = sample_realization(seq, mp.p, seed);
        auto policy = make_alg1(mp);
        AllocationOutcome out = run_policy(*policy, r, mp);
        CHECK(double(out.final_counters.q2e) <= mp.p * mp.b);
        CHECK(out.final_counters.q2f <= int(std::floor(theta * mp.b)));
        const double ratio = out.revenue / opt_offline(0, n, mp.b, mp.a);
        CHECK(ratio <= mp.p + theta + 2.0 / mp.b);
    }
}

TEST_CASE("u_bounds hand evaluations") {
    MarketParams mp{8, 16, 0.5, 0.5};
    const double delta = 1.0 / 8.0;

    DemandBounds before = u_bounds(1, 1, 1, mp, delta);  // lambda = 1/16 < delta
    CHECK(before.u1 == 8.0);
    CHECK(before.u12 == 8.0);

    DemandBounds at = u_bounds(2, 1, 4, mp, delta);  // lambda = 1/4
    CHECK(at.u1 == doctest::Approx(12.8));
    CHECK(at.u12 == doctest::Approx(14.4));

    // p = 1 with every arrival type-1: the extrapolation hits n exactly
    MarketParams full{8, 16, 0.5, 1.0};
    DemandBounds ext = u_bounds(4, 0, 4, full, delta);
    CHECK(ext.u1 == doctest::Approx(16.0));
}

TEST_CASE("adaptive policy agrees with the reference transcription") {
    MarketParams mp{3, 6, 0.5, 0.5};
    InitialSequence seq = build_instance("a,a,a,1,1,1");
    Realization r = sample_realization(seq, mp.p, 11);
    auto policy = make_alg2(0.6, mp);
    CHECK(run_trace(*policy, r, mp) == adaptive_reference_trace(r, mp, 0.6));

    Rng rng(47);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 6 + int(rng.uniform_int(40));
        InitialSequence inst = random_instance(rng, n);
        MarketParams params{1 + int(rng.uniform_int(std::uint64_t(n))), n,
                            0.05 + 0.9 * rng.uniform_double(),
                            0.05 + 0.9 * rng.uniform_double()};
        const double c = rng.uniform_double() * 0.99;
        Realization real = sample_realization(inst, params.p, rng.next_u64());
        auto pol = make_alg2(c, params);
        CHECK(run_trace(*pol, real, params) == adaptive_reference_trace(real, params, c));
    }
}

TEST_CASE("adaptive policy accepts everything on the front-loaded instance") {
    // only type-2 demand: the type-1 bound collapses and the threshold opens up
    const int n = 400, b = 200;
    MarketParams mp{b, n, 0.5, 0.5};
    InitialSequence seq = build_front_loaded(b, n);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Realization r = sample_realization(seq, mp.p, seed);
        auto policy = make_alg2(0.85, mp);
        AllocationOutcome out = run_policy(*policy, r, mp);
        CHECK(out.q2_final == b);
        CHECK(out.revenue == doctest::Approx(opt_offline(0, b, b, mp.a)));
    }
}

TEST_CASE("adaptive policy parameter guards") {
    MarketParams mp{4, 8, 0.5, 0.5};
    CHECK_THROWS_AS(make_alg2(1.0, mp), std::invalid_argument);
    CHECK_THROWS_AS(make_alg2(1.2, mp), std::invalid_argument);
    MarketParams p0{4, 8, 0.5, 0.0};
    CHECK_THROWS_AS(make_alg2(0.5, p0), std::invalid_argument);
}

TEST_CASE("adaptive threshold is monotone in u1 and in c") {
    const MarketParams mp{100, 1000, 0.5, 0.5};
    auto threshold = [&](double c, double u1) {
        const double phi = (1.0 - c) / (1.0 - mp.a);
        return std::floor(phi * mp.b + c * std::max(double(mp.b) - u1, 0.0));
    };
    for (double c : {0.1, 0.5, 0.9}) {
        double prev = threshold(c, 0.0);
        for (double u1 = 5.0; u1 <= 150.0; u1 += 5.0) {
            const double cur = threshold(c, u1);
            CHECK(cur <= prev);
            prev = cur;
        }
    }
    for (double u1 : {0.0, 40.0, 80.0, 120.0}) {
        double prev = threshold(0.0, u1);
        for (double c = 0.05; c < 1.0; c += 0.05) {
            const double cur = threshold(c, u1);
            CHECK(cur <= prev);
            prev = cur;
        }
    }
}

TEST_CASE("fixed-threshold policy on the front-loaded instance") {
    const int n = 200, b = 50;
    MarketParams mp{b, n, 0.5, 0.5};
    InitialSequence seq = build_front_loaded(b, n);
    Realization r = sample_realization(seq, 0.5, 4);
    auto policy = make_ball_queyranne(mp);
    AllocationOutcome out = run_policy(*policy, r, mp);
    const int cap = int(std::floor(b / (2.0 - mp.a)));
    CHECK(out.q2_final == cap);
    CHECK(out.revenue == doctest::Approx(mp.a * cap));

    // all-type-1 demand takes min(n1, b)
    std::vector<SlotKind> ones(std::size_t(n), SlotKind::Type1);
    InitialSequence allones{std::move(ones)};
    Realization r2 = sample_realization(allones, 0.5, 5);
    auto policy2 = make_ball_queyranne(mp);
    CHECK(run_policy(*policy2, r2, mp).revenue == doctest::Approx(double(b)));

    // near a = 1 the cap approaches b
    MarketParams higha{100, 200, 1.0 - 1e-9, 0.5};
    CHECK(int(std::floor(higha.b / (2.0 - higha.a))) >= higha.b - 1);
}

TEST_CASE("uniform-rate policy hand trace and full-inventory case") {
    MarketParams mp{4, 8, 0.5, 0.5};
    InitialSequence seq = build_front_loaded(4, 8);
    Realization r = sample_realization(seq, 0.0, 1);
    auto policy = make_uniform_rate(mp);
    AllocationOutcome out = run_policy(*policy, r, mp);
    CHECK(out.q2_final == 2);

    // b = n accepts everything
    MarketParams all{8, 8, 0.5, 0.5};
    Rng rng(3);
    InitialSequence inst = random_instance(rng, 8);
    Realization real = sample_realization(inst, 0.5, 9);
    auto pol = make_uniform_rate(all);
    AllocationOutcome res = run_policy(*pol, real, all);
    CHECK(res.revenue == doctest::Approx(opt_offline(inst.n1(), inst.n2(), all.b, all.a)));
}

TEST_CASE("mixture with weight one is its first component") {
    MarketParams mp{10, 40, 0.5, 0.5};
    Rng rng(8);
    InitialSequence seq = random_instance(rng, 40);
    std::vector<WeightedPolicy> comps{
        {policy_factory("ball"), 1.0},
        {policy_factory("uniform"), 0.0},
    };
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Realization r = sample_realization(seq, mp.p, derive_seed(1, seed));
        auto mix = make_mixture(comps, mp, seed);
        auto ball = make_ball_queyranne(mp);
        CHECK(run_trace(*mix, r, mp) == run_trace(*ball, r, mp));
    }
}

TEST_CASE("mixture selects components at the advertised frequency") {
    MarketParams mp{4, 8, 0.5, 0.3};
    // distinguish components by their decision on a type-2 first arrival
    std::vector<WeightedPolicy> comps{
        {policy_factory("accept-all"), 0.3},
        {policy_factory("reject-all"), 0.7},
    };
    InitialSequence seq = build_instance("a,0,0,0,0,0,0,0");
    Realization r = sample_realization(seq, 0.0, 1);
    const int trials = 100000;
    int first = 0;
    for (int t = 0; t < trials; ++t) {
        auto mix = make_mixture(comps, mp, derive_seed(77, std::uint64_t(t)));
        first += run_policy(*mix, r, mp).q2_final == 1;
    }
    CHECK(std::abs(double(first) / trials - 0.3) < 0.01);
}

TEST_CASE("mixture rejects bad weights") {
    MarketParams mp{4, 8, 0.5, 0.5};
    std::vector<WeightedPolicy> negative{{policy_factory("ball"), -0.2},
                                         {policy_factory("uniform"), 1.2}};
    CHECK_THROWS_AS(make_mixture(negative, mp, 1), std::invalid_argument);
    std::vector<WeightedPolicy> off{{policy_factory("ball"), 0.5},
                                    {policy_factory("uniform"), 0.4}};
    CHECK_THROWS_AS(make_mixture(off, mp, 1), std::invalid_argument);
}

TEST_CASE("every policy stays within OPT and the inventory bound") {
    Rng rng(99);
    const std::vector<std::string> names{"accept-all", "reject-all", "ball",
                                         "uniform",    "alg1",       "alg2",
                                         "mixture"};
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 6 + int(rng.uniform_int(40));
        InitialSequence seq = random_instance(rng, n);
        MarketParams mp{1 + int(rng.uniform_int(std::uint64_t(n))), n,
                        0.05 + 0.9 * rng.uniform_double(),
                        0.05 + 0.9 * rng.uniform_double()};
        Realization r = sample_realization(seq, mp.p, rng.next_u64());
        const double opt = opt_offline(seq.n1(), seq.n2(), mp.b, mp.a);
        for (const auto& name : names) {
            auto policy = policy_factory(name, 0.7)(mp, rng.next_u64());
            AllocationOutcome out = run_policy(*policy, r, mp);
            CHECK(out.revenue <= opt + 1e-9);
            CHECK(out.revenue <= double(mp.b) + 1e-9);
            CHECK(out.q1_final + out.q2_final <= mp.b);
            CHECK(out.revenue ==
                  doctest::Approx(out.q1_final + mp.a * out.q2_final).epsilon(1e-12));
        }
    }
}

TEST_CASE("policies are online: suffix changes leave prefix decisions alone") {
    Rng rng(55);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 12 + int(rng.uniform_int(20));
        InitialSequence seq = random_instance(rng, n);
        MarketParams mp{1 + int(rng.uniform_int(std::uint64_t(n))), n,
                        0.05 + 0.9 * rng.uniform_double(),
                        0.05 + 0.9 * rng.uniform_double()};
        Realization r = sample_realization(seq, mp.p, rng.next_u64());

        // mutate the suffix after the cut, keeping the realization valid by
        // rebuilding from a modified initial sequence with an identity map
        const int cut = n / 2;
        std::vector<SlotKind> mutated = r.arrivals();
        for (int i = cut; i < n; ++i)
            mutated[std::size_t(i)] = SlotKind(rng.uniform_int(3));
        InitialSequence base{r.arrivals()};
        InitialSequence changed{mutated};
        Realization r1 = sample_realization(base, 0.0, 1);
        Realization r2 = sample_realization(changed, 0.0, 1);

        for (const auto& name : {"ball", "uniform", "alg1", "alg2"}) {
            auto p1 = policy_factory(name, 0.7)(mp, 5);
            auto p2 = policy_factory(name, 0.7)(mp, 5);
            auto t1 = run_trace(*p1, r1, mp);
            auto t2 = run_trace(*p2, r2, mp);
            for (int i = 0; i < cut; ++i) CHECK(t1[std::size_t(i)] == t2[std::size_t(i)]);
        }
    }
}

TEST_CASE("trajectory csv has the pinned schema") {
    MarketParams mp{2, 4, 0.5, 0.5};
    InitialSequence seq = build_instance("a,a,1,a");
    Realization r = sample_realization(seq, 0.0, 1);
    auto policy = make_alg1(mp);
    std::vector<TrajectoryRow> rows;
    run_policy(*policy, r, mp, &rows);
    const std::string csv = trajectory_csv(rows, mp.n);
    CHECK(csv.rfind("step,lambda,arrival_kind,decision,q1,q2e,q2f,q2,inventory_left\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == mp.n + 1);
    CHECK(csv.find("3,0.75,1,1,1,0,0,0,1\n") != std::string::npos);
}
