#ifndef PPLDA_SIMD_KERNELS_HPP
#define PPLDA_SIMD_KERNELS_HPP

#include <cstddef>

namespace pplda::simd {

// Inner-loop kernels for the moment engine. `x` is always a row-major
// n-by-p data block. Every kernel has a scalar reference implementation
// and (on x86-64) an AVX2+FMA variant; the active set is chosen once at
// startup. The two variants are equivalence-tested against each other;
// they may differ by summation order only, never by formula.
//
// Power sums use compensated (Kahan) accumulation per lane so fourth and
// sixth powers keep their digits at n in the tens of thousands.
struct Kernels {
    const char* name;

    // t[i] = dot(x[i,:], u)
    void (*project_rows)(const double* x, std::size_t n, std::size_t p,
                         const double* u, double* t);

    // out[k-1] = sum_i t[i]^k for k = 1..kmax (kmax <= 6)
    void (*power_sums)(const double* t, std::size_t n, int kmax, double* out);

    // acc[j] = sum_i w[i] * x[i,j]
    void (*weighted_row_sum)(const double* x, std::size_t n, std::size_t p,
                             const double* w, double* acc);

    // m1[j] = sum_i t[i]   * x[i,j]
    // m2[j] = sum_i t[i]^2 * x[i,j]
    // m3[j] = sum_i t[i]^3 * x[i,j]
    void (*moment_vectors123)(const double* x, const double* t, std::size_t n,
                              std::size_t p, double* m1, double* m2, double* m3);

    // out[i] = |x[i,:]|^2
    void (*sq_norm_rows)(const double* x, std::size_t n, std::size_t p, double* out);

    // s[j*p+k] = sum_i w[i] * x[i,j] * x[i,k] for k >= j (upper triangle;
    // w == nullptr means unit weights). Lower triangle left untouched.
    void (*weighted_scatter_upper)(const double* x, std::size_t n, std::size_t p,
                                   const double* w, double* s);

    // acc[j] = sum_i x[i,j]
    void (*sum_rows)(const double* x, std::size_t n, std::size_t p, double* acc);
};

/// Scalar reference kernels (always available).
const Kernels& scalar_kernels();

/// AVX2+FMA kernels, or nullptr when unsupported by the build or the CPU.
const Kernels* avx2_kernels();

/// Kernel set selected at startup: AVX2 when the CPU supports it, unless
/// overridden by the PPLDA_SIMD environment variable ("scalar" or "avx2").
const Kernels& active();

} // namespace pplda::simd

#endif
