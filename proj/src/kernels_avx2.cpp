#include "steersim/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace steersim::kernels::detail {

bool cpu_has_avx2() { return __builtin_cpu_supports("avx2") != 0; }

namespace {

__attribute__((target("avx2"))) inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

}  // namespace

__attribute__((target("avx2"))) double l2sq_avx2(const double* a, const double* b,
                                                 std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double res = hsum(acc);
    for (; i < n; ++i) {
        double d = a[i] - b[i];
        res += d * d;
    }
    return res;
}

__attribute__((target("avx2"))) double sum_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double res = hsum(acc);
    for (; i < n; ++i) res += a[i];
    return res;
}

__attribute__((target("avx2"))) void accumulate_avx2(double* dst, const double* src,
                                                     std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_add_pd(_mm256_loadu_pd(dst + i), _mm256_loadu_pd(src + i));
        _mm256_storeu_pd(dst + i, v);
    }
    for (; i < n; ++i) dst[i] += src[i];
}

__attribute__((target("avx2"))) void scale_avx2(double* dst, double s, std::size_t n) {
    __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(dst + i), vs));
    for (; i < n; ++i) dst[i] *= s;
}

}  // namespace steersim::kernels::detail

#endif
