#pragma once

namespace ppa::detail {

// One slice of the factor-revealing search: (lambda, n1, n2, eta1) fixed,
// eta2 swept over a contiguous arithmetic range. The kernel returns the
// smallest objective value among the points satisfying u12 >= b - tol,
// preferring the lowest index on ties.
struct Mp1KernelArgs {
    double a, p, b, n;
    double lambda;
    double n1, n2, eta1;
    double eta2_start, eta2_step;
    double feas_tol;
};

struct Mp1KernelResult {
    double best_c;
    int best_index;  // -1 when no point in the slice is feasible
};

using Mp1Kernel = Mp1KernelResult (*)(const Mp1KernelArgs&, int count);

Mp1KernelResult mp1_kernel_scalar(const Mp1KernelArgs& args, int count);
#if defined(__x86_64__) || defined(_M_X64)
Mp1KernelResult mp1_kernel_avx2(const Mp1KernelArgs& args, int count);
bool cpu_has_avx2();
#endif

// picks the widest variant the CPU supports; scalar otherwise
Mp1Kernel active_mp1_kernel();
const char* active_mp1_kernel_name();

}  // namespace ppa::detail
