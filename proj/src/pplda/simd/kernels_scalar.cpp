#include "pplda/simd/kernels.hpp"

namespace pplda::simd {

namespace {

void project_rows_scalar(const double* x, std::size_t n, std::size_t p,
                         const double* u, double* t) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x + i * p;
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j) s += row[j] * u[j];
        t[i] = s;
    }
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

void power_sums_scalar(const double* t, std::size_t n, int kmax, double* out) {
    KahanAcc acc[6];
    for (std::size_t i = 0; i < n; ++i) {
        const double v = t[i];
        double pw = 1.0;
        for (int k = 0; k < kmax; ++k) {
            pw *= v;
            acc[k].add(pw);
        }
    }
    for (int k = 0; k < kmax; ++k) out[k] = acc[k].sum + acc[k].c;
}

void weighted_row_sum_scalar(const double* x, std::size_t n, std::size_t p,
                             const double* w, double* acc) {
    for (std::size_t j = 0; j < p; ++j) acc[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = w[i];
        const double* row = x + i * p;
        for (std::size_t j = 0; j < p; ++j) acc[j] += wi * row[j];
    }
}

void moment_vectors123_scalar(const double* x, const double* t, std::size_t n,
                              std::size_t p, double* m1, double* m2, double* m3) {
    for (std::size_t j = 0; j < p; ++j) m1[j] = m2[j] = m3[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t1 = t[i];
        const double t2 = t1 * t1;
        const double t3 = t2 * t1;
        const double* row = x + i * p;
        for (std::size_t j = 0; j < p; ++j) {
            const double v = row[j];
            m1[j] += t1 * v;
            m2[j] += t2 * v;
            m3[j] += t3 * v;
        }
    }
}

void sq_norm_rows_scalar(const double* x, std::size_t n, std::size_t p, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x + i * p;
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j) s += row[j] * row[j];
        out[i] = s;
    }
}

void weighted_scatter_upper_scalar(const double* x, std::size_t n, std::size_t p,
                                   const double* w, double* s) {
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = j; k < p; ++k) s[j * p + k] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x + i * p;
        const double wi = w ? w[i] : 1.0;
        for (std::size_t j = 0; j < p; ++j) {
            const double v = wi * row[j];
            double* srow = s + j * p;
            for (std::size_t k = j; k < p; ++k) srow[k] += v * row[k];
        }
    }
}

void sum_rows_scalar(const double* x, std::size_t n, std::size_t p, double* acc) {
    for (std::size_t j = 0; j < p; ++j) acc[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x + i * p;
        for (std::size_t j = 0; j < p; ++j) acc[j] += row[j];
    }
}

} // namespace

const Kernels& scalar_kernels() {
    static const Kernels k = {
        "scalar",
        project_rows_scalar,
        power_sums_scalar,
        weighted_row_sum_scalar,
        moment_vectors123_scalar,
        sq_norm_rows_scalar,
        weighted_scatter_upper_scalar,
        sum_rows_scalar,
    };
    return k;
}

} // namespace pplda::simd
