#include "ppa/mp1.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "ppa/mp1_kernel.hpp"
#include "ppa/parallel.hpp"

namespace ppa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double feasibility_tolerance(const Mp1Params& params) {
    return 1e-9 * std::max(1.0, params.b);
}

}  // namespace

Mp1Tilde mp1_tilde(const Mp1Point& point, const Mp1Params& params) {
    params.validate();
    if (!(point.lambda > 0.0)) throw std::domain_error("mp1 formulas need lambda > 0");
    const double p = params.p, n = params.n, lambda = point.lambda;
    const double o1 = (1.0 - p) * point.eta1 + p * point.n1 * lambda;
    const double o2 = (1.0 - p) * point.eta2 + p * point.n2 * lambda;
    const double lp = lambda * p;
    const double tail = (1.0 - lambda) * (1.0 - p) * n;
    const double denom = 1.0 - p + lp;
    return Mp1Tilde{
        o1,
        o2,
        std::min(o1 / lp, (o1 + tail) / denom),
        std::min((o1 + o2) / lp, (o1 + o2 + tail) / denom),
    };
}

bool mp1_feasible(const Mp1Point& point, const Mp1Params& params) {
    params.validate();
    const double b = params.b, n = params.n;
    if (!(point.lambda > 0.0 && point.lambda <= 1.0)) return false;
    if (point.n1 < 0.0 || point.n2 < 0.0 || point.eta1 < 0.0 || point.eta2 < 0.0) return false;
    if (point.eta1 + point.eta2 > point.lambda * n) return false;
    if (point.eta1 > point.n1 || point.eta2 > point.n2) return false;
    if (point.n1 > b) return false;
    if (point.n1 + point.n2 > n) return false;
    if (point.n1 + point.n2 > point.eta1 + point.eta2 + (1.0 - point.lambda) * n) return false;
    return mp1_tilde(point, params).u12 >= b - feasibility_tolerance(params);
}

double mp1_objective(const Mp1Point& point, const Mp1Params& params) {
    const Mp1Tilde tilde = mp1_tilde(point, params);
    const double a = params.a, b = params.b;
    const double numer = a * (point.n2 - tilde.o2 + b / (1.0 - a)) + point.n1;
    const double denom = a * std::min(point.n1 + point.n2, b) + (1.0 - a) * point.n1 +
                         a * a * b / (1.0 - a) + a * std::min(tilde.u1, b);
    return numer / denom;
}

double mp1_lower_bound(double a, double p) {
    if (!(a > 0.0 && a < 1.0) || p < 0.0 || p > 1.0)
        throw std::invalid_argument("lower bound needs 0 < a < 1 and 0 <= p <= 1");
    return p + (1.0 - p) / (2.0 - a);
}

namespace {

struct Candidate {
    double c = kInf;
    Mp1Point point;
};

void consider(Candidate& best, double c, const Mp1Point& point) {
    if (c < best.c) {
        best.c = c;
        best.point = point;
    }
}

// Sweep the scenario lattice for one lambda index. The index bounds
// encode every linear constraint exactly; the kernel applies the one
// nonlinear constraint (u12 >= b) per eta2 point.
Candidate sweep_lambda_slice(const Mp1Params& params, int grid, int k, long& evaluated) {
    const double n = params.n;
    const double s = n / double(grid);            // lattice spacing
    const double lambda = double(k) / double(grid);
    const double feas_tol = feasibility_tolerance(params);
    const int jb = int(std::floor(params.b / s + 1e-12));  // n1 <= b

    detail::Mp1Kernel kernel = detail::active_mp1_kernel();
    Candidate best;
    detail::Mp1KernelArgs args{};
    args.a = params.a;
    args.p = params.p;
    args.b = params.b;
    args.n = n;
    args.lambda = lambda;
    args.eta2_step = s;
    args.feas_tol = feas_tol;

    for (int j1 = 0; j1 <= std::min(jb, grid); ++j1) {
        args.n1 = double(j1) * s;
        for (int j2 = 0; j2 + j1 <= grid; ++j2) {
            args.n2 = double(j2) * s;
            for (int j3 = 0; j3 <= std::min(j1, k); ++j3) {
                args.eta1 = double(j3) * s;
                // eta2 window: eta2 <= n2, eta1 + eta2 <= lambda*n, and
                // n1 + n2 <= eta1 + eta2 + (1 - lambda)*n
                const int hi = std::min(j2, k - j3);
                const int lo = std::max(0, j1 + j2 - j3 - (grid - k));
                if (lo > hi) continue;
                args.eta2_start = double(lo) * s;
                const int count = hi - lo + 1;
                evaluated += count;
                const detail::Mp1KernelResult res = kernel(args, count);
                if (res.best_index >= 0)
                    consider(best, res.best_c,
                             Mp1Point{lambda, args.n1, args.n2, args.eta1,
                                      double(lo + res.best_index) * s});
            }
        }
    }
    return best;
}

// Dense sweep of an axis-aligned box, constraints intersected per axis.
// Used by the refinement stage; all axes get `points` samples.
Candidate sweep_box(const Mp1Params& params, const std::array<double, 10>& box, int points,
                    double lambda_floor, long& evaluated) {
    const auto axis = [points](double lo, double hi, int i) {
        if (hi <= lo) return lo;
        return lo + (hi - lo) * double(i) / double(points - 1);
    };
    const double n = params.n;
    const double feas_tol = feasibility_tolerance(params);
    detail::Mp1Kernel kernel = detail::active_mp1_kernel();
    Candidate best;
    detail::Mp1KernelArgs args{};
    args.a = params.a;
    args.p = params.p;
    args.b = params.b;
    args.n = n;
    args.feas_tol = feas_tol;

    const double lam_lo = std::max(box[0], lambda_floor);
    const double lam_hi = std::min(box[1], 1.0);
    if (lam_hi < lam_lo) return best;
    for (int i0 = 0; i0 < points; ++i0) {
        const double lambda = axis(lam_lo, lam_hi, i0);
        args.lambda = lambda;
        const double n1_hi = std::min({box[3], params.b, n});
        for (int i1 = 0; i1 < points; ++i1) {
            const double n1 = axis(std::max(box[2], 0.0), n1_hi, i1);
            if (n1 > n1_hi) break;
            args.n1 = n1;
            const double n2_hi = std::min(box[5], n - n1);
            for (int i2 = 0; i2 < points; ++i2) {
                const double n2 = axis(std::max(box[4], 0.0), n2_hi, i2);
                if (n2 > n2_hi) break;
                args.n2 = n2;
                const double e1_hi = std::min({box[7], n1, lambda * n});
                for (int i3 = 0; i3 < points; ++i3) {
                    const double eta1 = axis(std::max(box[6], 0.0), e1_hi, i3);
                    if (eta1 > e1_hi) break;
                    args.eta1 = eta1;
                    const double e2_lo =
                        std::max({box[8], 0.0, n1 + n2 - eta1 - (1.0 - lambda) * n});
                    const double e2_hi = std::min({box[9], n2, lambda * n - eta1});
                    if (e2_hi < e2_lo) continue;
                    args.eta2_start = e2_lo;
                    args.eta2_step =
                        points > 1 ? (e2_hi - e2_lo) / double(points - 1) : 0.0;
                    const int count = e2_hi > e2_lo ? points : 1;
                    evaluated += count;
                    const detail::Mp1KernelResult res = kernel(args, count);
                    if (res.best_index >= 0)
                        consider(best, res.best_c,
                                 Mp1Point{lambda, n1, n2, eta1,
                                          e2_lo + double(res.best_index) * args.eta2_step});
                }
            }
        }
    }
    return best;
}

}  // namespace

Mp1Solution solve_mp1(const Mp1Params& params, int grid_points_per_axis, double refine_tolerance,
                      int threads) {
    params.validate();
    if (grid_points_per_axis < 20) throw std::invalid_argument("mp1 grid needs >= 20 points/axis");
    if (!(refine_tolerance > 0.0 && refine_tolerance <= 1e-4))
        throw std::invalid_argument("mp1 refinement tolerance must be in (0, 1e-4]");
    if (threads <= 0) threads = default_threads();

    const int grid = grid_points_per_axis;
    const double n = params.n;
    const double s = n / double(grid);
    const double lambda_floor = 1.0 / double(grid);

    // grid phase, parallel over the lambda axis, merged in index order
    std::vector<Candidate> per_lambda(static_cast<std::size_t>(grid));
    std::vector<long> per_lambda_evals(std::size_t(grid), 0);
    parallel_for(grid, threads, [&](long idx) {
        per_lambda[std::size_t(idx)] = sweep_lambda_slice(params, grid, int(idx) + 1,
                                                          per_lambda_evals[std::size_t(idx)]);
    });

    long evaluated = 0;
    for (long e : per_lambda_evals) evaluated += e;

    std::vector<Candidate> starts;
    for (const Candidate& cand : per_lambda)
        if (cand.c < kInf) starts.push_back(cand);
    if (starts.empty())
        throw std::runtime_error("mp1 solver: no feasible grid point (grid=" +
                                 std::to_string(grid) + ")");
    std::stable_sort(starts.begin(), starts.end(),
                     [](const Candidate& x, const Candidate& y) { return x.c < y.c; });
    if (starts.size() > 12) starts.resize(12);

    Candidate best = starts.front();
    const double grid_c = best.c;

    // shrinking-box refinement around each start
    for (const Candidate& start : starts) {
        Candidate local = start;
        double half_lambda = 1.0 / double(grid);
        double half_coord = s;
        for (int round = 0; round < 40; ++round) {
            const Mp1Point& ctr = local.point;
            const std::array<double, 10> box{
                ctr.lambda - half_lambda, ctr.lambda + half_lambda,
                ctr.n1 - half_coord,      ctr.n1 + half_coord,
                ctr.n2 - half_coord,      ctr.n2 + half_coord,
                ctr.eta1 - half_coord,    ctr.eta1 + half_coord,
                ctr.eta2 - half_coord,    ctr.eta2 + half_coord,
            };
            const Candidate found = sweep_box(params, box, 7, lambda_floor, evaluated);
            const double improvement = local.c - found.c;
            consider(local, found.c, found.point);
            half_lambda *= 0.5;
            half_coord *= 0.5;
            if (half_coord < 1e-12 * n && half_lambda < 1e-12) break;
            if (round >= 12 && improvement < refine_tolerance * 1e-3) break;
        }
        consider(best, local.c, local.point);
    }

    Mp1Solution solution;
    solution.c_star = best.c;
    solution.argmin = best.point;
    solution.grid_points = grid;
    solution.refine_tolerance = refine_tolerance;
    solution.grid_c = grid_c;
    solution.evaluated_points = evaluated;
    return solution;
}

}  // namespace ppa
