#include "steersim/kernels.hpp"

#include <atomic>

namespace steersim::kernels {

namespace detail {

double l2sq_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double sum_scalar(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

void accumulate_scalar(double* dst, const double* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

void scale_scalar(double* dst, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] *= s;
}

}  // namespace detail

namespace {

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return detail::cpu_has_avx2();
#else
    return false;
#endif
}

std::atomic<Backend> g_forced{Backend::Auto};

bool use_avx2() {
    switch (g_forced.load(std::memory_order_relaxed)) {
        case Backend::Scalar: return false;
        case Backend::Avx2: return true;
        case Backend::Auto: break;
    }
    static const bool has = avx2_available();
    return has;
}

}  // namespace

void set_backend(Backend b) { g_forced.store(b, std::memory_order_relaxed); }

Backend active_backend() { return use_avx2() ? Backend::Avx2 : Backend::Scalar; }

double l2sq(const double* a, const double* b, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (use_avx2()) return detail::l2sq_avx2(a, b, n);
#endif
    return detail::l2sq_scalar(a, b, n);
}

double sum(const double* a, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (use_avx2()) return detail::sum_avx2(a, n);
#endif
    return detail::sum_scalar(a, n);
}

void accumulate(double* dst, const double* src, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (use_avx2()) {
        detail::accumulate_avx2(dst, src, n);
        return;
    }
#endif
    detail::accumulate_scalar(dst, src, n);
}

void scale(double* dst, double s, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (use_avx2()) {
        detail::scale_avx2(dst, s, n);
        return;
    }
#endif
    detail::scale_scalar(dst, s, n);
}

}  // namespace steersim::kernels
