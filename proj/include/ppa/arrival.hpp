#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ppa/rng.hpp"

namespace ppa {

// One slot of a demand sequence: a full-fare customer (revenue 1), a
// discount customer (revenue a, the instance parameter), or no arrival.
enum class SlotKind : std::uint8_t { Empty = 0, Type2 = 1, Type1 = 2 };

char slot_token(SlotKind k);
SlotKind slot_from_token(char c);

// Constants of the concentration event; fixed, not tuned.
struct ConcentrationConstants {
    static constexpr double alpha() { return 10.0 + 2.0 * 2.449489742783178; }  // 10 + 2*sqrt(6)
    static constexpr double k() { return 16.0; }
    static constexpr double eps_bar() { return 1.0 / 24.0; }
    // deviation scale for an inventory/count m at horizon n (natural log)
    static double delta(double m, int n) { return alpha() * std::sqrt(m * std::log(double(n))); }
};

// The ordered sequence the adversary commits to, with per-type prefix
// counts precomputed for O(1) queries.
class InitialSequence {
public:
    explicit InitialSequence(std::vector<SlotKind> slots);

    int n() const { return int(slots_.size()); }
    int n1() const { return eta1_.back(); }
    int n2() const { return eta2_.back(); }
    SlotKind slot(int step) const { return slots_[std::size_t(step - 1)]; }  // step in 1..n
    const std::vector<SlotKind>& slots() const { return slots_; }

    // number of type-1/type-2 slots among the first `steps` positions
    int eta1(int steps) const { return eta1_[std::size_t(steps)]; }
    int eta2(int steps) const { return eta2_[std::size_t(steps)]; }

private:
    std::vector<SlotKind> slots_;
    std::vector<int> eta1_, eta2_;  // prefix counts, index 0..n
};

// Parse "t1,t2,..." with tokens from {1, a, 0}.
std::vector<SlotKind> parse_slots(const std::string& csv);

// builders for the recurring adversarial patterns
InitialSequence build_instance(const std::string& slot_csv);
InitialSequence build_all_empty(int n);
// b discount customers followed by n-b empty slots
InitialSequence build_front_loaded(int b, int n);

// Instance file format: "n=<int> a=<float>\n<slot tokens>\n".
struct InstanceFile {
    InitialSequence sequence;
    double a = 0.0;
};
InstanceFile parse_instance_text(const std::string& text);
std::string serialize_instance_text(const InitialSequence& seq, double a);

// Which positions were handed to the shuffler, and where each one landed.
// Maps are stored as parallel arrays over the sorted member list:
// the customer initially at members[k] arrives at position targets[k].
struct StochasticAssignment {
    std::vector<int> members;  // sorted, 1-based positions
    std::vector<int> targets;  // a permutation of members
};

StochasticAssignment sample_assignment(int n, double p, Rng& rng);

// Reorders `initial` per the assignment; non-members keep their position.
template <class T>
std::vector<T> apply_assignment(const std::vector<T>& initial, const StochasticAssignment& sa) {
    std::vector<T> out = initial;
    for (std::size_t k = 0; k < sa.members.size(); ++k)
        out[std::size_t(sa.targets[k] - 1)] = initial[std::size_t(sa.members[k] - 1)];
    return out;
}

// One sampled arrival sequence. Policies may read `arrivals` only; the
// assignment is oracle data for concentration checks and tests.
class Realization {
public:
    static Realization compose(const InitialSequence& source, StochasticAssignment sa);

    int n() const { return source_->n(); }
    const InitialSequence& source() const { return *source_; }
    SlotKind arrival(int step) const { return arrivals_[std::size_t(step - 1)]; }
    const std::vector<SlotKind>& arrivals() const { return arrivals_; }
    const StochasticAssignment& assignment() const { return assignment_; }
    bool position_in_stochastic_group(int step) const { return member_[std::size_t(step)]; }

    // counts of observed type-1/type-2 arrivals among steps 1..steps
    int o1(int steps) const { return o1_[std::size_t(steps)]; }
    int o2(int steps) const { return o2_[std::size_t(steps)]; }
    // stochastic-group type-2 arrivals among steps 1..steps (oracle only)
    int o2_stochastic(int steps) const { return o2s_[std::size_t(steps)]; }

private:
    const InitialSequence* source_ = nullptr;
    std::vector<SlotKind> arrivals_;
    StochasticAssignment assignment_;
    std::vector<bool> member_;            // index 1..n
    std::vector<int> o1_, o2_, o2s_;      // prefix counts, index 0..n
};

// Samples group membership i.i.d. Bernoulli(p) over all n positions
// (empty slots included), then a uniform permutation of the members.
// Deterministic given (seq, p, seed). The caller keeps `seq` alive.
Realization sample_realization(const InitialSequence& seq, double p, std::uint64_t seed);

// Counts of type-1/type-2 arrivals up to step `steps` (= lambda * n).
std::pair<int, int> observed_counts(const Realization& r, int steps);
int stochastic_observed_count(const Realization& r, int steps);

// Deterministic approximations (1-p)*eta_j + p*lambda*n_j and p*lambda*n2
// at lambda = steps / n.
struct DeterministicApprox {
    double o1_tilde, o2_tilde, o2s_tilde;
};
DeterministicApprox deterministic_approx(const InitialSequence& seq, double p, int steps);

// True iff every applicable deviation inequality holds at every step:
// when n_1 is large enough, |o1 - o1~| and |o1 + o2 - (o1~ + o2~)| stay
// below their alpha*sqrt(m log n) bounds; when n_2 is large enough, the
// same for |o2 - o2~| and the stochastic-group count. Vacuously true
// when neither count threshold is met.
bool concentration_event_holds(const Realization& r, double p);

}  // namespace ppa
