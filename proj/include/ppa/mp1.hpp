#pragma once

#include <stdexcept>

namespace ppa {

// Scenario parameters of the factor-revealing program. The program is
// degree-1 homogeneous in (b, n), so kappa = b/n is all that matters;
// normalized() fixes n = 1, b = kappa. Explicit (b, n) pairs are kept
// for the homogeneity checks.
struct Mp1Params {
    double a = 0.0;      // type-2 revenue, in (0,1)
    double p = 0.0;      // stochastic fraction, in (0,1)
    double b = 0.0;      // inventory scale
    double n = 1.0;      // horizon scale

    static Mp1Params normalized(double a, double p, double kappa) {
        Mp1Params mp{a, p, kappa, 1.0};
        mp.validate();
        return mp;
    }

    double kappa() const { return b / n; }

    void validate() const {
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("mp1 needs 0 < a < 1");
        if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("mp1 needs 0 < p < 1");
        if (!(b > 0.0 && n > 0.0 && b <= n)) throw std::invalid_argument("mp1 needs 0 < b <= n");
    }
};

// A candidate adversarial scenario: the time of the last rejection and
// the demand profile around it, in the same units as (b, n).
struct Mp1Point {
    double lambda = 0.0;
    double n1 = 0.0, n2 = 0.0;
    double eta1 = 0.0, eta2 = 0.0;
};

struct Mp1Tilde {
    double o1, o2;    // deterministic arrival approximations at lambda
    double u1, u12;   // induced demand upper bounds
};

// exact formula evaluation; lambda must be positive
Mp1Tilde mp1_tilde(const Mp1Point& point, const Mp1Params& params);

// the eight scenario-validity constraints (everything except the
// objective inequality); u12 >= b is checked with a small tolerance so
// boundary minimizers are kept
bool mp1_feasible(const Mp1Point& point, const Mp1Params& params);

// the ratio bound that a feasible scenario forces on the adaptive policy
double mp1_objective(const Mp1Point& point, const Mp1Params& params);

// closed-form floor on the solution: p + (1-p)/(2-a)
double mp1_lower_bound(double a, double p);

struct Mp1Solution {
    double c_star = 1.0;
    Mp1Point argmin;
    // solver diagnostics
    int grid_points = 0;
    double refine_tolerance = 0.0;
    double grid_c = 1.0;           // best value before local refinement
    long evaluated_points = 0;
};

// Dense grid sweep over the five scenario coordinates followed by a
// shrinking-box refinement from the best grid cells. Deterministic for a
// given (params, grid, tolerance) regardless of the thread count.
Mp1Solution solve_mp1(const Mp1Params& params, int grid_points_per_axis = 40,
                      double refine_tolerance = 1e-4, int threads = 0);

}  // namespace ppa
