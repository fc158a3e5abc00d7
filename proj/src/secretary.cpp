#include "ppa/secretary.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "ppa/parallel.hpp"
#include "ppa/rng.hpp"

namespace ppa {

SecretaryInstance::SecretaryInstance(std::vector<double> values) : revenues(std::move(values)) {
    if (revenues.size() < 2) throw std::invalid_argument("secretary instance needs n >= 2");
    std::set<double> seen;
    for (double v : revenues) {
        if (!(v > 0.0)) throw std::invalid_argument("secretary revenues must be positive");
        if (!seen.insert(v).second) throw std::invalid_argument("secretary revenues must be distinct");
    }
}

int osa_select(const std::vector<double>& order, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in (0,1)");
    const int n = int(order.size());
    const int observe = int(std::floor(gamma * double(n)));
    double v_max = 0.0;
    for (int i = 0; i < observe; ++i) v_max = std::max(v_max, order[std::size_t(i)]);
    for (int i = observe; i < n; ++i)
        if (order[std::size_t(i)] >= v_max) return i + 1;
    return 0;
}

bool run_osa(const SecretaryInstance& inst, double gamma, double p, std::uint64_t seed) {
    Rng rng(seed);
    const StochasticAssignment sa = sample_assignment(inst.n(), p, rng);
    const std::vector<double> order = apply_assignment(inst.revenues, sa);
    const int pick = osa_select(order, gamma);
    if (pick == 0) return false;
    return order[std::size_t(pick - 1)] ==
           *std::max_element(order.begin(), order.end());
}

double asymptotic_success(double gamma, double p) {
    if (!(gamma > 0.0 && gamma < 1.0) || !(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("need gamma in (0,1) and p in (0,1]");
    return gamma * p * std::log(1.0 / (gamma * p + 1.0 - p));
}

double optimal_gamma(double p, double tol) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("need p in (0,1]");
    if (!(tol > 0.0 && tol <= 1e-6)) throw std::invalid_argument("need tol <= 1e-6");
    const auto residual = [p](double gamma) {
        const double mix = gamma * p + 1.0 - p;
        return std::log(mix) + gamma * p / mix;
    };

    // confirm exactly one sign change before trusting bisection
    const double eps = 1e-6;
    const double scan_lo = eps, scan_hi = 1.0 - eps;
    int changes = 0;
    double lo = scan_lo, hi = scan_hi;
    double prev_gamma = scan_lo, prev_value = residual(scan_lo);
    for (int i = 1; i <= 1000; ++i) {
        const double gamma = scan_lo + (scan_hi - scan_lo) * double(i) / 1000.0;
        const double value = residual(gamma);
        if ((prev_value < 0.0) != (value < 0.0)) {
            ++changes;
            lo = prev_gamma;
            hi = gamma;
        }
        prev_gamma = gamma;
        prev_value = value;
    }
    if (changes != 1)
        throw std::runtime_error("optimal observation length: residual does not cross zero once");

    while (std::abs(residual(0.5 * (lo + hi))) > tol && hi - lo > 1e-15) {
        const double mid = 0.5 * (lo + hi);
        if ((residual(lo) < 0.0) == (residual(mid) < 0.0))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double randomized_lower_bound(double gamma1, double gamma2, double q, double p) {
    if (!(0.0 < gamma1 && gamma1 < gamma2 && gamma2 < 1.0))
        throw std::invalid_argument("need 0 < gamma1 < gamma2 < 1");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("need q in (0,1)");
    const double s1 = asymptotic_success(gamma1, p);
    const double s2 = asymptotic_success(gamma2, p);
    const double cross1 = (1.0 - q) * p * (1.0 - p) * (1.0 - gamma2);
    const double cross2 = q * (1.0 - p) * (gamma2 - gamma1) / (1.0 - gamma1) * s1;
    return q * s1 + (1.0 - q) * s2 + std::min(cross1, cross2);
}

SuccessEstimate estimate_success(const SecretaryInstance& inst, double gamma, double p, long trials,
                                 std::uint64_t seed, int threads) {
    if (trials < 1000) throw std::invalid_argument("estimate_success needs trials >= 1000");
    if (threads <= 0) threads = default_threads();
    std::vector<unsigned char> success(static_cast<std::size_t>(trials));
    parallel_for(trials, threads, [&](long t) {
        success[std::size_t(t)] =
            run_osa(inst, gamma, p, derive_seed(seed, std::uint64_t(t))) ? 1 : 0;
    });
    long wins = 0;
    for (unsigned char w : success) wins += w;
    const double mean = double(wins) / double(trials);
    const double half = 1.96 * std::sqrt(std::max(mean * (1.0 - mean), 0.0) / double(trials));
    return SuccessEstimate{mean, half, trials};
}

SecretaryInstance adversarial_secretary_instance(int n, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in (0,1)");
    const int observe = int(std::floor(gamma * double(n)));
    if (observe < 1 || observe > n - 1)
        throw std::invalid_argument("observation window must hold between 1 and n-1 customers");

    // rank r has revenue n - r + 1; rank 1 leads, ranks 2..n-observe+1
    // start right after the window, the rest fill it in descending order
    std::vector<double> revenues(std::size_t(n), 0.0);
    revenues[0] = double(n);
    for (int k = 2; k <= n - observe + 1; ++k)
        revenues[std::size_t(observe + k - 2)] = double(n - k + 1);
    int rank = n - observe + 2;
    for (int pos = 2; pos <= observe; ++pos, ++rank)
        revenues[std::size_t(pos - 1)] = double(n - rank + 1);
    return SecretaryInstance(std::move(revenues));
}

}  // namespace ppa
