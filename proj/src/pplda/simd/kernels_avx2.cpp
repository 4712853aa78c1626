// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma and must only be reached through the runtime dispatcher.

#include "pplda/simd/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace pplda::simd {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d h = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, h));
}

struct KahanAcc {
    double sum = 0.0;
    double c = 0.0;
    void add(double v) {
        const double y = v - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

void project_rows_avx2(const double* x, std::size_t n, std::size_t p,
                       const double* u, double* t) {
    const std::size_t p4 = p & ~std::size_t{3};
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x + i * p;
        __m256d acc = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j < p4; j += 4)
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(u + j), acc);
        double s = hsum(acc);
        for (; j < p; ++j) s += row[j] * u[j];
        t[i] = s;
    }
}

void power_sums_avx2(const double* t, std::size_t n, int kmax, double* out) {
    __m256d vsum[6], vc[6];
    for (int k = 0; k < kmax; ++k) {
        vsum[k] = _mm256_setzero_pd();
        vc[k] = _mm256_setzero_pd();
    }
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d v = _mm256_loadu_pd(t + i);
        __m256d pw = v;
        for (int k = 0; k < kmax; ++k) {
            // Kahan step per lane.
            const __m256d y = _mm256_sub_pd(pw, vc[k]);
            const __m256d tn = _mm256_add_pd(vsum[k], y);
            vc[k] = _mm256_sub_pd(_mm256_sub_pd(tn, vsum[k]), y);
            vsum[k] = tn;
            pw = _mm256_mul_pd(pw, v);
        }
    }
    for (int k = 0; k < kmax; ++k) {
        alignas(32) double lanes_sum[4], lanes_c[4];
        _mm256_store_pd(lanes_sum, vsum[k]);
        _mm256_store_pd(lanes_c, vc[k]);
        KahanAcc acc;
        for (int l = 0; l < 4; ++l) acc.add(lanes_sum[l] + lanes_c[l]);
        for (std::size_t i = n4; i < n; ++i) {
            double pw = t[i];
            for (int kk = 0; kk < k; ++kk) pw *= t[i];
            acc.add(pw);
        }
        out[k] = acc.sum + acc.c;
    }
}

void weighted_row_sum_avx2(const double* x, std::size_t n, std::size_t p,
                           const double* w, double* acc) {
    for (std::size_t j = 0; j < p; ++j) acc[j] = 0.0;
    const std::size_t p4 = p & ~std::size_t{3};
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x + i * p;
        const __m256d wi = _mm256_set1_pd(w[i]);
        std::size_t j = 0;
        for (; j < p4; j += 4) {
            const __m256d a = _mm256_loadu_pd(acc + j);
            _mm256_storeu_pd(acc + j, _mm256_fmadd_pd(wi, _mm256_loadu_pd(row + j), a));
        }
        for (; j < p; ++j) acc[j] += w[i] * row[j];
    }
}

void moment_vectors123_avx2(const double* x, const double* t, std::size_t n,
                            std::size_t p, double* m1, double* m2, double* m3) {
    for (std::size_t j = 0; j < p; ++j) m1[j] = m2[j] = m3[j] = 0.0;
    const std::size_t p4 = p & ~std::size_t{3};
    for (std::size_t i = 0; i < n; ++i) {
        const double t1 = t[i];
        const double t2 = t1 * t1;
        const double t3 = t2 * t1;
        const __m256d v1 = _mm256_set1_pd(t1);
        const __m256d v2 = _mm256_set1_pd(t2);
        const __m256d v3 = _mm256_set1_pd(t3);
        const double* row = x + i * p;
        std::size_t j = 0;
        for (; j < p4; j += 4) {
            const __m256d xr = _mm256_loadu_pd(row + j);
            _mm256_storeu_pd(m1 + j, _mm256_fmadd_pd(v1, xr, _mm256_loadu_pd(m1 + j)));
            _mm256_storeu_pd(m2 + j, _mm256_fmadd_pd(v2, xr, _mm256_loadu_pd(m2 + j)));
            _mm256_storeu_pd(m3 + j, _mm256_fmadd_pd(v3, xr, _mm256_loadu_pd(m3 + j)));
        }
        for (; j < p; ++j) {
            const double v = row[j];
            m1[j] += t1 * v;
            m2[j] += t2 * v;
            m3[j] += t3 * v;
        }
    }
}

void sq_norm_rows_avx2(const double* x, std::size_t n, std::size_t p, double* out) {
    const std::size_t p4 = p & ~std::size_t{3};
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x + i * p;
        __m256d acc = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j < p4; j += 4) {
            const __m256d v = _mm256_loadu_pd(row + j);
            acc = _mm256_fmadd_pd(v, v, acc);
        }
        double s = hsum(acc);
        for (; j < p; ++j) s += row[j] * row[j];
        out[i] = s;
    }
}

} // namespace

const Kernels* avx2_kernels_impl() {
    // Scatter and plain column sums are off the hot path; the AVX2 set
    // reuses the scalar reference for those.
    static const Kernels k = {
        "avx2",
        project_rows_avx2,
        power_sums_avx2,
        weighted_row_sum_avx2,
        moment_vectors123_avx2,
        sq_norm_rows_avx2,
        scalar_kernels().weighted_scatter_upper,
        scalar_kernels().sum_rows,
    };
    return &k;
}

} // namespace pplda::simd

#endif // __AVX2__ && __FMA__
