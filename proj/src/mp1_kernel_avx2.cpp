#include <immintrin.h>

#include <algorithm>

#include "ppa/mp1_kernel.hpp"

namespace ppa::detail {

bool cpu_has_avx2() { return __builtin_cpu_supports("avx2") != 0; }

// Four eta2 points per iteration. Lane arithmetic mirrors the scalar
// kernel operation for operation, so results compare equal bitwise.
Mp1KernelResult mp1_kernel_avx2(const Mp1KernelArgs& args, int count) {
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

    const __m256d v_start = _mm256_set1_pd(args.eta2_start);
    const __m256d v_step = _mm256_set1_pd(args.eta2_step);
    const __m256d v_omp = _mm256_set1_pd(1.0 - p);
    const __m256d v_pn2l = _mm256_set1_pd(p * args.n2 * lambda);
    const __m256d v_o1t = _mm256_set1_pd(o1t);
    const __m256d v_lp = _mm256_set1_pd(lp);
    const __m256d v_tail = _mm256_set1_pd(tail);
    const __m256d v_denom = _mm256_set1_pd(denom);
    const __m256d v_floor = _mm256_set1_pd(feas_floor);
    const __m256d v_a = _mm256_set1_pd(a);
    const __m256d v_top = _mm256_set1_pd(obj_top);
    const __m256d v_den = _mm256_set1_pd(obj_den);

    Mp1KernelResult result{0.0, -1};
    int i = 0;
    for (; i + 4 <= count; i += 4) {
        const __m256d idx =
            _mm256_setr_pd(double(i), double(i + 1), double(i + 2), double(i + 3));
        const __m256d eta2 = _mm256_add_pd(v_start, _mm256_mul_pd(idx, v_step));
        const __m256d o2t = _mm256_add_pd(_mm256_mul_pd(v_omp, eta2), v_pn2l);
        const __m256d s = _mm256_add_pd(v_o1t, o2t);
        const __m256d u12 = _mm256_min_pd(_mm256_div_pd(s, v_lp),
                                          _mm256_div_pd(_mm256_add_pd(s, v_tail), v_denom));
        const int feas = _mm256_movemask_pd(_mm256_cmp_pd(u12, v_floor, _CMP_GE_OQ));
        if (feas == 0) continue;
        const __m256d c =
            _mm256_div_pd(_mm256_sub_pd(v_top, _mm256_mul_pd(v_a, o2t)), v_den);
        alignas(32) double cs[4];
        _mm256_store_pd(cs, c);
        for (int k = 0; k < 4; ++k) {
            if (!(feas & (1 << k))) continue;
            if (result.best_index < 0 || cs[k] < result.best_c) {
                result.best_c = cs[k];
                result.best_index = i + k;
            }
        }
    }
    for (; i < count; ++i) {
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

}  // namespace ppa::detail
