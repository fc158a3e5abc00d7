#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ppa/arrival.hpp"
#include "ppa/policies.hpp"

namespace ppa {

// prints with six significant digits; shared by every CSV producer so
// golden files stay stable
std::string format_number(double x);

struct RatioEstimate {
    double mean_ratio = 0.0;
    double ci_half_width_95 = 0.0;
    long trials = 0;
    double opt_value = 0.0;
};

// Monte Carlo estimate of E[ALG]/OPT over fresh realizations of `seq`;
// randomized policies also get a fresh seed stream per trial.
RatioEstimate estimate_ratio(const PolicyFactory& factory, const InitialSequence& seq,
                             const MarketParams& params, long trials, std::uint64_t seed,
                             int threads = 0);

// b discount customers then empty periods
InitialSequence table2_instance(int b, int n);

// Two instances identical up to position b: discounts followed by
// nothing, or by b full-fare customers.
std::pair<InitialSequence, InitialSequence> impossibility_pair(int b, int n);

struct BoundCheck {
    RatioEstimate first, second;
    double min_ratio = 0.0;
    double bound = 0.0;  // p + (1-p)/(2-a) + 3*p*b^2/n
};

// Runs the policy on both instances of the pair; no online policy can
// beat `bound` on the worse of the two.
BoundCheck upper_bound_check(const PolicyFactory& factory, int b, int n, double a, double p,
                             long trials, std::uint64_t seed, int threads = 0);

// fraction of sampled realizations violating the concentration event
double empirical_concentration_rate(const InitialSequence& seq, double p, long trials,
                                    std::uint64_t seed, int threads = 0);

// Reproduction drivers. Each emits CSV with a one-line config comment;
// identical configs give identical bytes.

// certified-ratio curves: one row per (a, kappa, p) plus the
// non-adaptive reference value
std::string reproduce_figure2(const std::vector<double>& a_list,
                              const std::vector<double>& kappa_list,
                              const std::vector<double>& p_grid, int grid_points = 40,
                              int threads = 0);

// policy comparison on the front-loaded instance: estimate per policy
// next to its analytic reference
std::string reproduce_table2(double a, double p, int b, int n, long trials, std::uint64_t seed,
                             int threads = 0);

// optimal observation lengths and their limiting success probabilities
std::string reproduce_table3(const std::vector<double>& p_grid);

// upper-bound sandwich on the impossibility pair, one row per policy
std::string reproduce_bound61(double a, double p, int n, long trials, std::uint64_t seed,
                              int threads = 0);

}  // namespace ppa
