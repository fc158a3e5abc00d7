#include "ppa/arrival.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ppa {

char slot_token(SlotKind k) {
    switch (k) {
        case SlotKind::Type1: return '1';
        case SlotKind::Type2: return 'a';
        case SlotKind::Empty: return '0';
    }
    throw std::logic_error("bad slot kind");
}

SlotKind slot_from_token(char c) {
    switch (c) {
        case '1': return SlotKind::Type1;
        case 'a': return SlotKind::Type2;
        case '0': return SlotKind::Empty;
    }
    throw std::invalid_argument(std::string("bad slot token '") + c + "'");
}

InitialSequence::InitialSequence(std::vector<SlotKind> slots) : slots_(std::move(slots)) {
    const int n = int(slots_.size());
    if (n < 3) throw std::invalid_argument("instance needs n >= 3");
    eta1_.assign(std::size_t(n) + 1, 0);
    eta2_.assign(std::size_t(n) + 1, 0);
    for (int i = 0; i < n; ++i) {
        eta1_[std::size_t(i) + 1] = eta1_[std::size_t(i)] + (slots_[std::size_t(i)] == SlotKind::Type1);
        eta2_[std::size_t(i) + 1] = eta2_[std::size_t(i)] + (slots_[std::size_t(i)] == SlotKind::Type2);
    }
}

std::vector<SlotKind> parse_slots(const std::string& csv) {
    std::vector<SlotKind> slots;
    std::string token;
    std::istringstream in(csv);
    while (std::getline(in, token, ',')) {
        auto first = token.find_first_not_of(" \t");
        auto last = token.find_last_not_of(" \t");
        if (first == std::string::npos || last != first)
            throw std::invalid_argument("bad slot token '" + token + "'");
        slots.push_back(slot_from_token(token[first]));
    }
    if (!csv.empty() && csv.back() == ',') throw std::invalid_argument("trailing comma in slot list");
    return slots;
}

InitialSequence build_instance(const std::string& slot_csv) {
    return InitialSequence(parse_slots(slot_csv));
}

InitialSequence build_all_empty(int n) {
    return InitialSequence(std::vector<SlotKind>(std::size_t(n), SlotKind::Empty));
}

InitialSequence build_front_loaded(int b, int n) {
    if (b < 0 || b > n) throw std::invalid_argument("front-loaded instance needs 0 <= b <= n");
    std::vector<SlotKind> slots(std::size_t(n), SlotKind::Empty);
    std::fill(slots.begin(), slots.begin() + b, SlotKind::Type2);
    return InitialSequence(std::move(slots));
}

namespace {

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace

InstanceFile parse_instance_text(const std::string& text) {
    std::istringstream in(text);
    std::string header, body;
    if (!std::getline(in, header) || !std::getline(in, body))
        throw std::invalid_argument("instance file needs a header line and a slot line");

    int n = -1;
    double a = -1.0;
    std::istringstream hdr(header);
    std::string field;
    while (hdr >> field) {
        auto eq = field.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("bad instance header field: " + field);
        const std::string key = field.substr(0, eq);
        const std::string val = field.substr(eq + 1);
        if (key == "n") {
            auto res = std::from_chars(val.data(), val.data() + val.size(), n);
            if (res.ec != std::errc{} || res.ptr != val.data() + val.size())
                throw std::invalid_argument("bad n value: " + val);
        } else if (key == "a") {
            auto res = std::from_chars(val.data(), val.data() + val.size(), a);
            if (res.ec != std::errc{} || res.ptr != val.data() + val.size())
                throw std::invalid_argument("bad a value: " + val);
        } else {
            throw std::invalid_argument("unknown instance header key: " + key);
        }
    }
    if (n < 0 || a <= 0.0 || a >= 1.0)
        throw std::invalid_argument("instance header must set n and a in (0,1)");

    InitialSequence seq = build_instance(body);
    if (seq.n() != n) throw std::invalid_argument("slot count does not match header n");
    return InstanceFile{std::move(seq), a};
}

std::string serialize_instance_text(const InitialSequence& seq, double a) {
    std::string out = "n=" + std::to_string(seq.n()) + " a=" + format_double(a) + "\n";
    for (int i = 1; i <= seq.n(); ++i) {
        if (i > 1) out += ',';
        out += slot_token(seq.slot(i));
    }
    out += '\n';
    return out;
}

StochasticAssignment sample_assignment(int n, double p, Rng& rng) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("membership probability must be in [0,1]");
    StochasticAssignment sa;
    for (int i = 1; i <= n; ++i)
        if (rng.bernoulli(p)) sa.members.push_back(i);
    sa.targets = sa.members;
    // Fisher-Yates over the member list in index order
    for (std::size_t k = sa.targets.size(); k > 1; --k) {
        const std::size_t j = std::size_t(rng.uniform_int(k));
        std::swap(sa.targets[k - 1], sa.targets[j]);
    }
    return sa;
}

Realization Realization::compose(const InitialSequence& source, StochasticAssignment sa) {
    const int n = source.n();
    if (!std::is_sorted(sa.members.begin(), sa.members.end()) ||
        std::adjacent_find(sa.members.begin(), sa.members.end()) != sa.members.end())
        throw std::invalid_argument("assignment members must be sorted and distinct");
    if (!sa.members.empty() && (sa.members.front() < 1 || sa.members.back() > n))
        throw std::invalid_argument("assignment member out of range");
    std::vector<int> sorted_targets = sa.targets;
    std::sort(sorted_targets.begin(), sorted_targets.end());
    if (sorted_targets != sa.members)
        throw std::invalid_argument("assignment targets must permute the members");

    Realization r;
    r.source_ = &source;
    r.assignment_ = std::move(sa);
    r.arrivals_ = apply_assignment(source.slots(), r.assignment_);
    r.member_.assign(std::size_t(n) + 1, false);
    for (int m : r.assignment_.members) r.member_[std::size_t(m)] = true;

    r.o1_.assign(std::size_t(n) + 1, 0);
    r.o2_.assign(std::size_t(n) + 1, 0);
    r.o2s_.assign(std::size_t(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        const SlotKind k = r.arrivals_[std::size_t(i - 1)];
        r.o1_[std::size_t(i)] = r.o1_[std::size_t(i - 1)] + (k == SlotKind::Type1);
        r.o2_[std::size_t(i)] = r.o2_[std::size_t(i - 1)] + (k == SlotKind::Type2);
        r.o2s_[std::size_t(i)] =
            r.o2s_[std::size_t(i - 1)] + (k == SlotKind::Type2 && r.member_[std::size_t(i)]);
    }
    return r;
}

Realization sample_realization(const InitialSequence& seq, double p, std::uint64_t seed) {
    Rng rng(seed);
    return Realization::compose(seq, sample_assignment(seq.n(), p, rng));
}

std::pair<int, int> observed_counts(const Realization& r, int steps) {
    if (steps < 1 || steps > r.n()) throw std::domain_error("observation step out of range");
    return {r.o1(steps), r.o2(steps)};
}

int stochastic_observed_count(const Realization& r, int steps) {
    if (steps < 1 || steps > r.n()) throw std::domain_error("observation step out of range");
    return r.o2_stochastic(steps);
}

DeterministicApprox deterministic_approx(const InitialSequence& seq, double p, int steps) {
    if (steps < 0 || steps > seq.n()) throw std::domain_error("observation step out of range");
    const double lambda = double(steps) / double(seq.n());
    return DeterministicApprox{
        (1.0 - p) * seq.eta1(steps) + p * lambda * seq.n1(),
        (1.0 - p) * seq.eta2(steps) + p * lambda * seq.n2(),
        p * lambda * seq.n2(),
    };
}

bool concentration_event_holds(const Realization& r, double p) {
    const InitialSequence& seq = r.source();
    const int n = seq.n();
    const double log_n = std::log(double(n));
    const double count_floor = ConcentrationConstants::k() / (p * p) * log_n;
    const bool check1 = double(seq.n1()) >= count_floor;
    const bool check2 = double(seq.n2()) >= count_floor;
    if (!check1 && !check2) return true;

    const double bound1 = ConcentrationConstants::alpha() * std::sqrt(double(seq.n1()) * log_n);
    const double bound12 =
        ConcentrationConstants::alpha() * std::sqrt(double(seq.n1() + seq.n2()) * log_n);
    const double bound2 = ConcentrationConstants::alpha() * std::sqrt(double(seq.n2()) * log_n);

    for (int steps = 0; steps <= n; ++steps) {
        const DeterministicApprox approx = deterministic_approx(seq, p, steps);
        if (check1) {
            if (std::abs(double(r.o1(steps)) - approx.o1_tilde) >= bound1) return false;
            if (std::abs(double(r.o1(steps) + r.o2(steps)) - (approx.o1_tilde + approx.o2_tilde)) >=
                bound12)
                return false;
        }
        if (check2) {
            if (std::abs(double(r.o2(steps)) - approx.o2_tilde) >= bound2) return false;
            if (std::abs(double(r.o2_stochastic(steps)) - approx.o2s_tilde) >= bound2) return false;
        }
    }
    return true;
}

}  // namespace ppa
