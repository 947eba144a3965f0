#pragma once

#include <cstddef>

// Vector arithmetic kernels used by the trajectory clustering and matching
// hot loops. A scalar reference implementation always exists; an AVX2 variant
// is selected at runtime when the CPU supports it. The two are equivalence
// tested against each other.
namespace steersim::kernels {

enum class Backend { Auto, Scalar, Avx2 };

// Force a backend (tests) or restore runtime detection with Backend::Auto.
void set_backend(Backend b);
Backend active_backend();

// Squared Euclidean distance between a and b, length n.
double l2sq(const double* a, const double* b, std::size_t n);

double sum(const double* a, std::size_t n);

// dst += src, length n.
void accumulate(double* dst, const double* src, std::size_t n);

// dst *= s, length n.
void scale(double* dst, double s, std::size_t n);

namespace detail {
double l2sq_scalar(const double* a, const double* b, std::size_t n);
double sum_scalar(const double* a, std::size_t n);
void accumulate_scalar(double* dst, const double* src, std::size_t n);
void scale_scalar(double* dst, double s, std::size_t n);
#if defined(__x86_64__) || defined(_M_X64)
double l2sq_avx2(const double* a, const double* b, std::size_t n);
double sum_avx2(const double* a, std::size_t n);
void accumulate_avx2(double* dst, const double* src, std::size_t n);
void scale_avx2(double* dst, double s, std::size_t n);
bool cpu_has_avx2();
#endif
}  // namespace detail

}  // namespace steersim::kernels
