#include <algorithm>

#include "ppa/mp1_kernel.hpp"

namespace ppa::detail {

// Reference implementation. The SIMD variants must match it bit for bit,
// so every per-point operation below is written in the exact order the
// vector lanes execute it (no fused multiply-adds; see the build flags).
Mp1KernelResult mp1_kernel_scalar(const Mp1KernelArgs& args, int count) {
    const double a = args.a, p = args.p, b = args.b, n = args.n, lambda = args.lambda;

    const double o1t = (1.0 - p) * args.eta1 + p * args.n1 * lambda;
    const double lp = lambda * p;
    const double tail = (1.0 - lambda) * (1.0 - p) * n;
    const double denom = 1.0 - p + lp;
    const double u1 = std::min(o1t / lp, (o1t + tail) / denom);

    const double sum12 = args.n1 + args.n2;
    const double obj_den = a * std::min(sum12, b) + (1.0 - a) * args.n1 +
                           a * a * b / (1.0 - a) + a * std::min(u1, b);
    const double obj_top = a * (args.n2 + b / (1.0 - a)) + args.n1;
    const double feas_floor = b - args.feas_tol;

    Mp1KernelResult result{0.0, -1};
    for (int i = 0; i < count; ++i) {
        const double eta2 = args.eta2_start + double(i) * args.eta2_step;
        const double o2t = (1.0 - p) * eta2 + p * args.n2 * lambda;
        const double s = o1t + o2t;
        const double u12 = std::min(s / lp, (s + tail) / denom);
        if (u12 >= feas_floor) {
            const double c = (obj_top - a * o2t) / obj_den;
            if (result.best_index < 0 || c < result.best_c) {
                result.best_c = c;
                result.best_index = i;
            }
        }
    }
    return result;
}

namespace {

Mp1Kernel pick_kernel() {
#if defined(PPA_HAVE_AVX2_TU)
    if (cpu_has_avx2()) return &mp1_kernel_avx2;
#endif
    return &mp1_kernel_scalar;
}

}  // namespace

Mp1Kernel active_mp1_kernel() {
    static const Mp1Kernel kernel = pick_kernel();
    return kernel;
}

const char* active_mp1_kernel_name() {
    return active_mp1_kernel() == &mp1_kernel_scalar ? "scalar" : "avx2";
}

}  // namespace ppa::detail
