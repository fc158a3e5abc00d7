#include "ppa/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ppa/mp1.hpp"
#include "ppa/parallel.hpp"
#include "ppa/rng.hpp"
#include "ppa/secretary.hpp"

namespace ppa {

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

RatioEstimate estimate_ratio(const PolicyFactory& factory, const InitialSequence& seq,
                             const MarketParams& params, long trials, std::uint64_t seed,
                             int threads) {
    params.validate();
    if (trials < 1000) throw std::invalid_argument("estimate_ratio needs trials >= 1000");
    if (threads <= 0) threads = default_threads();
    const double opt = opt_offline(seq.n1(), seq.n2(), params.b, params.a);
    if (opt == 0.0) throw std::invalid_argument("degenerate instance: OPT is zero");

    std::vector<double> ratios(static_cast<std::size_t>(trials));
    parallel_for(trials, threads, [&](long t) {
        const Realization r =
            sample_realization(seq, params.p, derive_seed(seed, 2 * std::uint64_t(t)));
        auto policy = factory(params, derive_seed(seed, 2 * std::uint64_t(t) + 1));
        ratios[std::size_t(t)] = run_policy(*policy, r, params).revenue / opt;
    });

    double sum = 0.0;
    for (double r : ratios) sum += r;
    const double mean = sum / double(trials);
    double sq = 0.0;
    for (double r : ratios) sq += (r - mean) * (r - mean);
    const double sd = trials > 1 ? std::sqrt(sq / double(trials - 1)) : 0.0;
    return RatioEstimate{mean, 1.96 * sd / std::sqrt(double(trials)), trials, opt};
}

InitialSequence table2_instance(int b, int n) { return build_front_loaded(b, n); }

std::pair<InitialSequence, InitialSequence> impossibility_pair(int b, int n) {
    if (2 * b > n) throw std::invalid_argument("impossibility pair needs 2b <= n");
    std::vector<SlotKind> first(std::size_t(n), SlotKind::Empty);
    std::fill(first.begin(), first.begin() + b, SlotKind::Type2);
    std::vector<SlotKind> second = first;
    std::fill(second.begin() + b, second.begin() + 2 * b, SlotKind::Type1);
    return {InitialSequence(std::move(first)), InitialSequence(std::move(second))};
}

BoundCheck upper_bound_check(const PolicyFactory& factory, int b, int n, double a, double p,
                             long trials, std::uint64_t seed, int threads) {
    const auto [v_seq, w_seq] = impossibility_pair(b, n);
    const MarketParams params{b, n, a, p};
    BoundCheck check;
    check.first = estimate_ratio(factory, v_seq, params, trials, derive_seed(seed, 1), threads);
    check.second = estimate_ratio(factory, w_seq, params, trials, derive_seed(seed, 2), threads);
    check.min_ratio = std::min(check.first.mean_ratio, check.second.mean_ratio);
    check.bound = p + (1.0 - p) / (2.0 - a) + 3.0 * p * double(b) * double(b) / double(n);
    return check;
}

double empirical_concentration_rate(const InitialSequence& seq, double p, long trials,
                                    std::uint64_t seed, int threads) {
    if (trials < 1) throw std::invalid_argument("need at least one trial");
    if (threads <= 0) threads = default_threads();
    std::vector<unsigned char> violated(static_cast<std::size_t>(trials));
    parallel_for(trials, threads, [&](long t) {
        const Realization r = sample_realization(seq, p, derive_seed(seed, std::uint64_t(t)));
        violated[std::size_t(t)] = concentration_event_holds(r, p) ? 0 : 1;
    });
    long count = 0;
    for (unsigned char v : violated) count += v;
    return double(count) / double(trials);
}

namespace {

std::string join_numbers(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += format_number(xs[i]);
    }
    return out;
}

}  // namespace

std::string reproduce_figure2(const std::vector<double>& a_list,
                              const std::vector<double>& kappa_list,
                              const std::vector<double>& p_grid, int grid_points, int threads) {
    std::string out = "# config: reproduce=fig2 a=" + join_numbers(a_list) +
                      " kappa=" + join_numbers(kappa_list) + " p=" + join_numbers(p_grid) +
                      " grid=" + std::to_string(grid_points) + "\n";
    out += "a,kappa,p,c_star,alg1_ratio\n";
    for (double a : a_list)
        for (double kappa : kappa_list)
            for (double p : p_grid) {
                const Mp1Solution sol =
                    solve_mp1(Mp1Params::normalized(a, p, kappa), grid_points, 1e-4, threads);
                out += format_number(a) + "," + format_number(kappa) + "," + format_number(p) +
                       "," + format_number(sol.c_star) + "," +
                       format_number(mp1_lower_bound(a, p)) + "\n";
            }
    return out;
}

std::string reproduce_table2(double a, double p, int b, int n, long trials, std::uint64_t seed,
                             int threads) {
    const MarketParams params{b, n, a, p};
    params.validate();
    const InitialSequence seq = table2_instance(b, n);
    const double kappa = double(b) / double(n);

    const Mp1Solution sol = solve_mp1(Mp1Params::normalized(a, p, kappa), 40, 1e-4, threads);
    const double c = std::min(sol.c_star, 0.99);
    const double uniform_ref = p + kappa * (1.0 - p);

    struct Row {
        const char* policy;
        PolicyFactory factory;
        double analytic;
    };
    const std::vector<Row> rows{
        {"ball", policy_factory("ball"), 1.0 / (2.0 - a)},
        {"uniform", policy_factory("uniform"), uniform_ref},
        {"mixture", policy_factory("mixture"), (1.0 - p) / (2.0 - a) + p * uniform_ref},
        {"alg1", policy_factory("alg1"), p + (1.0 - p) / (2.0 - a)},
        {"alg2", policy_factory("alg2", c), 1.0},
    };

    std::string out = "# config: reproduce=table2 a=" + format_number(a) +
                      " p=" + format_number(p) + " b=" + std::to_string(b) +
                      " n=" + std::to_string(n) + " trials=" + std::to_string(trials) +
                      " seed=" + std::to_string(seed) + " c=" + format_number(c) + "\n";
    out += "policy,estimate,ci_half_width,analytic\n";
    int index = 0;
    for (const Row& row : rows) {
        const RatioEstimate est =
            estimate_ratio(row.factory, seq, params, trials, derive_seed(seed, 100 + index), threads);
        out += std::string(row.policy) + "," + format_number(est.mean_ratio) + "," +
               format_number(est.ci_half_width_95) + "," + format_number(row.analytic) + "\n";
        ++index;
    }
    return out;
}

std::string reproduce_table3(const std::vector<double>& p_grid) {
    std::string out = "# config: reproduce=table3 p=" + join_numbers(p_grid) + "\n";
    out += "p,gamma_star,success\n";
    for (double p : p_grid) {
        const double gamma = optimal_gamma(p);
        out += format_number(p) + "," + format_number(gamma) + "," +
               format_number(asymptotic_success(gamma, p)) + "\n";
    }
    return out;
}

std::string reproduce_bound61(double a, double p, int n, long trials, std::uint64_t seed,
                              int threads) {
    const int b = int(std::floor(std::pow(double(n), 0.4)));
    const Mp1Solution sol =
        solve_mp1(Mp1Params::normalized(a, p, double(b) / double(n)), 40, 1e-4, threads);
    const double c = std::min(sol.c_star, 0.99);

    std::string out = "# config: reproduce=bound61 a=" + format_number(a) +
                      " p=" + format_number(p) + " n=" + std::to_string(n) +
                      " trials=" + std::to_string(trials) + " seed=" + std::to_string(seed) +
                      " b=" + std::to_string(b) + " c=" + format_number(c) + "\n";
    out += "policy,b,ratio_first,ratio_second,min_ratio,bound,ci_half_width\n";
    const std::vector<std::pair<const char*, PolicyFactory>> policies{
        {"ball", policy_factory("ball")},
        {"alg1", policy_factory("alg1")},
        {"alg2", policy_factory("alg2", c)},
    };
    int index = 0;
    for (const auto& [name, factory] : policies) {
        const BoundCheck check =
            upper_bound_check(factory, b, n, a, p, trials, derive_seed(seed, 200 + index), threads);
        const double ci = std::max(check.first.ci_half_width_95, check.second.ci_half_width_95);
        out += std::string(name) + "," + std::to_string(b) + "," +
               format_number(check.first.mean_ratio) + "," +
               format_number(check.second.mean_ratio) + "," + format_number(check.min_ratio) +
               "," + format_number(check.bound) + "," + format_number(ci) + "\n";
        ++index;
    }
    return out;
}

}  // namespace ppa
