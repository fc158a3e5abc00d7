#include "ppa/policies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ppa/rng.hpp"

namespace ppa {

double opt_offline(int n1, int n2, int b, double a) {
    if (n1 < 0 || n2 < 0 || b < 0) throw std::invalid_argument("negative count");
    const int spare = std::max(b - n1, 0);
    return double(std::min(b, n1)) + a * double(std::min(n2, spare));
}

AllocationOutcome run_policy(Policy& policy, const Realization& r, const MarketParams& params,
                             std::vector<TrajectoryRow>* trajectory) {
    params.validate();
    if (r.n() != params.n) throw std::invalid_argument("realization horizon does not match params");

    int remaining = params.b;
    int q1 = 0, q2 = 0;
    for (int step = 1; step <= params.n; ++step) {
        const SlotKind kind = r.arrival(step);
        bool accepted = false;
        if (kind != SlotKind::Empty) {
            accepted = policy.decide(step, kind, remaining);
            if (accepted) {
                if (remaining == 0)
                    throw PolicyContractViolation("policy accepted with zero inventory at step " +
                                                  std::to_string(step));
                --remaining;
                (kind == SlotKind::Type1 ? q1 : q2)++;
            }
        }
        if (trajectory)
            trajectory->push_back(TrajectoryRow{step, kind, accepted, policy.counters(), remaining});
    }

    AllocationOutcome out;
    out.q1_final = q1;
    out.q2_final = q2;
    out.revenue = double(q1) + params.a * double(q2);
    out.final_counters = policy.counters();
    return out;
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows, int n) {
    std::string out = "step,lambda,arrival_kind,decision,q1,q2e,q2f,q2,inventory_left\n";
    char line[160];
    for (const auto& row : rows) {
        std::snprintf(line, sizeof line, "%d,%.6g,%c,%d,%d,%d,%d,%d,%d\n", row.step,
                      double(row.step) / double(n), slot_token(row.kind), row.decision ? 1 : 0,
                      row.counters.q1, row.counters.q2e, row.counters.q2f, row.counters.q2,
                      row.inventory_left);
        out += line;
    }
    return out;
}

DemandBounds u_bounds(int o1, int o2, int steps, const MarketParams& params, double delta) {
    const double lambda = double(steps) / double(params.n);
    if (lambda < delta) return DemandBounds{double(params.b), double(params.b)};
    const double lp = lambda * params.p;
    if (lp <= 0.0) throw std::domain_error("u-bounds need lambda * p > 0 past delta");
    const double tail = (1.0 - lambda) * (1.0 - params.p) * double(params.n);
    const double denom = 1.0 - params.p + lp;
    const double u1 = std::min(double(o1) / lp, (double(o1) + tail) / denom);
    const double o12 = double(o1) + double(o2);
    const double u12 = std::min(o12 / lp, (o12 + tail) / denom);
    return DemandBounds{u1, u12};
}

namespace {

class AcceptAllPolicy final : public Policy {
public:
    bool decide(int, SlotKind kind, int remaining) override {
        if (remaining == 0) return false;
        (kind == SlotKind::Type1 ? c_.q1 : c_.q2)++;
        return true;
    }
    Counters counters() const override { return c_; }

private:
    Counters c_;
};

class RejectAllPolicy final : public Policy {
public:
    bool decide(int, SlotKind, int) override { return false; }
    Counters counters() const override { return {}; }
};

class BallQueyrannePolicy final : public Policy {
public:
    explicit BallQueyrannePolicy(const MarketParams& params)
        : cap_(int(std::floor(double(params.b) / (2.0 - params.a)))) {}

    bool decide(int, SlotKind kind, int remaining) override {
        if (remaining == 0) return false;
        if (kind == SlotKind::Type1) {
            ++c_.q1;
            return true;
        }
        if (c_.q2 < cap_) {
            ++c_.q2;
            return true;
        }
        return false;
    }
    Counters counters() const override { return c_; }

private:
    int cap_;
    Counters c_;
};

class UniformRatePolicy final : public Policy {
public:
    explicit UniformRatePolicy(const MarketParams& params) : b_(params.b), n_(params.n) {}

    bool decide(int step, SlotKind kind, int remaining) override {
        if (remaining == 0) return false;
        if (kind == SlotKind::Type1) {
            ++c_.q1;
            return true;
        }
        const double lambda = double(step) / double(n_);
        if (c_.q1 + c_.q2 < int(std::floor(lambda * double(b_)))) {
            ++c_.q2;
            return true;
        }
        return false;
    }
    Counters counters() const override { return c_; }

private:
    int b_, n_;
    Counters c_;
};

// evolving quota for the stochastic share plus a fixed worst-case quota
class NonAdaptivePolicy final : public Policy {
public:
    explicit NonAdaptivePolicy(const MarketParams& params)
        : b_(params.b),
          n_(params.n),
          p_(params.p),
          fixed_cap_(int(std::floor((1.0 - params.p) / (2.0 - params.a) * double(params.b)))) {}

    bool decide(int step, SlotKind kind, int remaining) override {
        if (remaining == 0) return false;
        if (kind == SlotKind::Type1) {
            ++c_.q1;
            return true;
        }
        const double lambda = double(step) / double(n_);
        if (double(c_.q1 + c_.q2e) < std::floor(lambda * p_ * double(b_))) {
            ++c_.q2e;
            ++c_.q2;
            return true;
        }
        if (c_.q2f < fixed_cap_) {
            ++c_.q2f;
            ++c_.q2;
            return true;
        }
        return false;
    }
    Counters counters() const override { return c_; }

private:
    int b_, n_;
    double p_;
    int fixed_cap_;
    Counters c_;
};

// accepts type-2 while the observed data cannot rule out spare inventory,
// otherwise against a threshold that loosens as the type-1 bound drops
class AdaptivePolicy final : public Policy {
public:
    AdaptivePolicy(double c, const MarketParams& params) : params_(params), c_target_(c) {
        if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("adaptive policy needs 0 <= c < 1");
        if (params.p <= 0.0) throw std::invalid_argument("adaptive policy needs p > 0");
        phi_ = (1.0 - c) / (1.0 - params.a);
        delta_ = phi_ * double(params.b) / double(params.n);
    }

    bool decide(int step, SlotKind kind, int remaining) override {
        (kind == SlotKind::Type1 ? o1_ : o2_)++;
        if (remaining == 0) return false;
        if (kind == SlotKind::Type1) {
            ++c_.q1;
            return true;
        }
        const DemandBounds bounds = u_bounds(o1_, o2_, step, params_, delta_);
        if (bounds.u12 < double(params_.b)) {
            ++c_.q2;
            return true;
        }
        const double headroom = std::max(double(params_.b) - bounds.u1, 0.0);
        const double threshold = std::floor(phi_ * double(params_.b) + c_target_ * headroom);
        if (double(c_.q2) <= threshold) {
            ++c_.q2;
            return true;
        }
        return false;
    }
    Counters counters() const override { return c_; }

private:
    MarketParams params_;
    double c_target_, phi_, delta_;
    int o1_ = 0, o2_ = 0;
    Counters c_;
};

class MixturePolicy final : public Policy {
public:
    MixturePolicy(const std::vector<WeightedPolicy>& components, const MarketParams& params,
                  std::uint64_t seed) {
        if (components.empty()) throw std::invalid_argument("mixture needs at least one component");
        double total = 0.0;
        for (const auto& comp : components) {
            if (comp.weight < 0.0) throw std::invalid_argument("mixture weights must be >= 0");
            total += comp.weight;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("mixture weights must sum to 1");

        Rng rng(seed);
        const double u = rng.uniform_double();
        double cumulative = 0.0;
        std::size_t pick = components.size() - 1;
        for (std::size_t i = 0; i < components.size(); ++i) {
            cumulative += components[i].weight;
            if (u < cumulative) {
                pick = i;
                break;
            }
        }
        selected_ = components[pick].factory(params, rng.next_u64());
    }

    bool decide(int step, SlotKind kind, int remaining) override {
        return selected_->decide(step, kind, remaining);
    }
    Counters counters() const override { return selected_->counters(); }

private:
    std::unique_ptr<Policy> selected_;
};

}  // namespace

std::unique_ptr<Policy> make_accept_all(const MarketParams&) {
    return std::make_unique<AcceptAllPolicy>();
}

std::unique_ptr<Policy> make_reject_all(const MarketParams&) {
    return std::make_unique<RejectAllPolicy>();
}

std::unique_ptr<Policy> make_ball_queyranne(const MarketParams& params) {
    return std::make_unique<BallQueyrannePolicy>(params);
}

std::unique_ptr<Policy> make_uniform_rate(const MarketParams& params) {
    return std::make_unique<UniformRatePolicy>(params);
}

std::unique_ptr<Policy> make_alg1(const MarketParams& params) {
    return std::make_unique<NonAdaptivePolicy>(params);
}

std::unique_ptr<Policy> make_alg2(double c, const MarketParams& params) {
    return std::make_unique<AdaptivePolicy>(c, params);
}

std::unique_ptr<Policy> make_mixture(const std::vector<WeightedPolicy>& components,
                                     const MarketParams& params, std::uint64_t seed) {
    return std::make_unique<MixturePolicy>(components, params, seed);
}

PolicyFactory policy_factory(const std::string& name, double c) {
    if (name == "accept-all")
        return [](const MarketParams& mp, std::uint64_t) { return make_accept_all(mp); };
    if (name == "reject-all")
        return [](const MarketParams& mp, std::uint64_t) { return make_reject_all(mp); };
    if (name == "ball")
        return [](const MarketParams& mp, std::uint64_t) { return make_ball_queyranne(mp); };
    if (name == "uniform")
        return [](const MarketParams& mp, std::uint64_t) { return make_uniform_rate(mp); };
    if (name == "alg1")
        return [](const MarketParams& mp, std::uint64_t) { return make_alg1(mp); };
    if (name == "alg2")
        return [c](const MarketParams& mp, std::uint64_t) { return make_alg2(c, mp); };
    if (name == "mixture")
        // the reference mixture: worst-case rule w.p. 1-p, uniform rate w.p. p
        return [](const MarketParams& mp, std::uint64_t seed) {
            std::vector<WeightedPolicy> comps{
                {policy_factory("ball"), 1.0 - mp.p},
                {policy_factory("uniform"), mp.p},
            };
            return make_mixture(comps, mp, seed);
        };
    throw std::invalid_argument("unknown policy: " + name);
}

}  // namespace ppa
