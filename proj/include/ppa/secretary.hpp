#pragma once

#include <cstdint>
#include <vector>

#include "ppa/arrival.hpp"

namespace ppa {

// Single-selection instance: distinct positive revenues in the
// adversary's order.
struct SecretaryInstance {
    std::vector<double> revenues;

    explicit SecretaryInstance(std::vector<double> values);
    int n() const { return int(revenues.size()); }
};

// Observe-then-select scan over a realized order: reject the first
// floor(gamma*n) arrivals tracking their maximum, then take the first
// arrival at least that large. Returns the selected 1-based position,
// or 0 when nothing is selected.
int osa_select(const std::vector<double>& order, double gamma);

// One simulated run under the partially permuted arrival model;
// success means the highest revenue was selected.
bool run_osa(const SecretaryInstance& inst, double gamma, double p, std::uint64_t seed);

// limiting success probability gamma*p*log(1/(gamma*p + 1 - p))
double asymptotic_success(double gamma, double p);

// The observation length maximizing the limit, i.e. the root of
// log(gamma*p + 1 - p) + gamma*p/(gamma*p + 1 - p) on (0,1). A single
// sign change is verified numerically before bisecting.
double optimal_gamma(double p, double tol = 1e-9);

// success floor for the two-length randomized rule
double randomized_lower_bound(double gamma1, double gamma2, double q, double p);

struct SuccessEstimate {
    double estimate = 0.0;
    double half_width_95 = 0.0;
    long trials = 0;
};

SuccessEstimate estimate_success(const SecretaryInstance& inst, double gamma, double p,
                                 long trials, std::uint64_t seed, int threads = 0);

// The order on which the asymptotic formula is attained with equality:
// the best revenue first, then ranks 2..(1-gamma)n+1 right after the
// observation window, the rest filling the window in descending order.
SecretaryInstance adversarial_secretary_instance(int n, double gamma);

}  // namespace ppa
