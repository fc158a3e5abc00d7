#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppa/arrival.hpp"

namespace ppa {

struct MarketParams {
    int b = 0;       // inventory
    int n = 0;       // horizon
    double a = 0.0;  // type-2 revenue, in (0,1)
    double p = 0.0;  // stochastic fraction

    void validate() const {
        if (n < 3) throw std::invalid_argument("market needs n >= 3");
        if (b < 1 || b > n) throw std::invalid_argument("market needs 1 <= b <= n");
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("market needs 0 < a < 1");
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("market needs 0 <= p <= 1");
    }
};

// Thrown when a policy accepts with no inventory left; the simulator
// fails loudly instead of clamping.
struct PolicyContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// Online decision contract. One instance drives one simulation run; the
// simulator calls decide() for every non-empty arrival, in step order,
// so a policy sees exactly the prefix it would see live. A policy never
// learns which arrivals were permuted.
class Policy {
public:
    virtual ~Policy() = default;

    // step in 1..n, kind is Type1 or Type2; must return false when
    // remaining == 0.
    virtual bool decide(int step, SlotKind kind, int remaining) = 0;

    struct Counters {
        int q1 = 0;   // accepted type-1
        int q2 = 0;   // accepted type-2, total
        int q2e = 0;  // accepted type-2 via the evolving rule (alg1 only)
        int q2f = 0;  // accepted type-2 via the fixed rule (alg1 only)
    };
    virtual Counters counters() const = 0;
};

// builds one fresh policy instance per run; `seed` feeds randomized
// policies and is ignored by deterministic ones
using PolicyFactory =
    std::function<std::unique_ptr<Policy>(const MarketParams&, std::uint64_t seed)>;

struct TrajectoryRow {
    int step = 0;
    SlotKind kind = SlotKind::Empty;
    bool decision = false;
    Policy::Counters counters;
    int inventory_left = 0;
};

struct AllocationOutcome {
    double revenue = 0.0;
    int q1_final = 0;
    int q2_final = 0;
    Policy::Counters final_counters;
};

// best clairvoyant revenue: all type-1 first, leftover inventory to type-2
double opt_offline(int n1, int n2, int b, double a);

AllocationOutcome run_policy(Policy& policy, const Realization& r, const MarketParams& params,
                             std::vector<TrajectoryRow>* trajectory = nullptr);

// trajectory CSV: step,lambda,arrival_kind,decision,q1,q2e,q2f,q2,inventory_left
std::string trajectory_csv(const std::vector<TrajectoryRow>& rows, int n);

// Data-driven upper bounds on the remaining demand, computed from the
// observed prefix counts at lambda = steps/n. Before delta there is not
// enough data and both bounds equal b.
struct DemandBounds {
    double u1, u12;
};
DemandBounds u_bounds(int o1, int o2, int steps, const MarketParams& params, double delta);

// policy constructors
std::unique_ptr<Policy> make_accept_all(const MarketParams& params);
std::unique_ptr<Policy> make_reject_all(const MarketParams& params);
std::unique_ptr<Policy> make_ball_queyranne(const MarketParams& params);
std::unique_ptr<Policy> make_uniform_rate(const MarketParams& params);
std::unique_ptr<Policy> make_alg1(const MarketParams& params);
// adaptive policy targeting ratio c; requires c < 1 and p > 0
std::unique_ptr<Policy> make_alg2(double c, const MarketParams& params);

struct WeightedPolicy {
    PolicyFactory factory;
    double weight = 0.0;
};
// flips a weighted coin once per run, then delegates every decision
std::unique_ptr<Policy> make_mixture(const std::vector<WeightedPolicy>& components,
                                     const MarketParams& params, std::uint64_t seed);

// factories for the named policies; `c` only applies to alg2
PolicyFactory policy_factory(const std::string& name, double c = 0.0);

}  // namespace ppa
