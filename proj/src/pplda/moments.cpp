#include "pplda/moments.hpp"

#include <cmath>

#include "pplda/simd/kernels.hpp"

namespace pplda {

namespace {

const simd::Kernels& K() { return simd::active(); }

void subtract_row_mean(Dataset& d, const Vector& mean) {
    for (std::size_t i = 0; i < d.n; ++i) {
        double* row = d.row(i);
        for (std::size_t j = 0; j < d.p; ++j) row[j] -= mean[j];
    }
}

SymmetricMatrix scatter_to_covariance(const Dataset& centered, double divisor) {
    const std::size_t p = centered.p;
    Matrix s(p, p);
    K().weighted_scatter_upper(centered.rows.data(), centered.n, p, nullptr, s.data());
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = j; k < p; ++k) {
            const double v = s(j, k) / divisor;
            s(j, k) = v;
            s(k, j) = v;
        }
    }
    return SymmetricMatrix(std::move(s));
}

} // namespace

CenteredData center(const Dataset& data) {
    const std::size_t n = data.n;
    const std::size_t p = data.p;
    CenteredData out;
    out.mean.resize(p);
    out.centered = data;

    K().sum_rows(data.rows.data(), n, p, out.mean.data());
    for (double& v : out.mean) v /= static_cast<double>(n);
    subtract_row_mean(out.centered, out.mean);

    // Second pass removes the rounding residual left by the first.
    Vector residual(p);
    K().sum_rows(out.centered.rows.data(), n, p, residual.data());
    for (double& v : residual) v /= static_cast<double>(n);
    subtract_row_mean(out.centered, residual);
    for (std::size_t j = 0; j < p; ++j) out.mean[j] += residual[j];
    return out;
}

double projected_moment(const CenteredData& c, const Vector& u, int k) {
    if (k < 1 || k > 6)
        throw ValidationError("projected_moment: order must be in 1..6");
    if (u.size() != c.p()) throw ValidationError("projected_moment: dimension mismatch");
    const std::size_t n = c.n();
    Vector t(n);
    K().project_rows(c.centered.rows.data(), n, c.p(), u.data(), t.data());
    double sums[6];
    K().power_sums(t.data(), n, k, sums);
    return sums[k - 1] / static_cast<double>(n);
}

Vector projected_moment_vector(const CenteredData& c, const Vector& u, int k) {
    if (k < 0 || k > 3)
        throw ValidationError("projected_moment_vector: order must be in 0..3");
    if (u.size() != c.p())
        throw ValidationError("projected_moment_vector: dimension mismatch");
    const std::size_t n = c.n();
    const std::size_t p = c.p();
    Vector out(p);
    if (k == 0) {
        K().sum_rows(c.centered.rows.data(), n, p, out.data());
    } else {
        Vector t(n);
        K().project_rows(c.centered.rows.data(), n, p, u.data(), t.data());
        if (k >= 2)
            for (std::size_t i = 0; i < n; ++i) {
                const double t1 = t[i];
                t[i] = (k == 2) ? t1 * t1 : t1 * t1 * t1;
            }
        K().weighted_row_sum(c.centered.rows.data(), n, p, t.data(), out.data());
    }
    for (double& v : out) v /= static_cast<double>(n);
    return out;
}

SymmetricMatrix sample_covariance(const Dataset& data, CovDivisor divisor) {
    if (data.n < 2) throw ValidationError("sample_covariance: need n >= 2");
    const CenteredData c = center(data);
    const double div = divisor == CovDivisor::N ? static_cast<double>(data.n)
                                                : static_cast<double>(data.n - 1);
    return scatter_to_covariance(c.centered, div);
}

SymmetricMatrix pooled_covariance(const LabeledDataset& ld) {
    const std::size_t n = ld.data.n;
    const std::size_t p = ld.data.p;
    if (ld.labels.size() != n)
        throw ValidationError("pooled_covariance: label count does not match rows");
    if (n < 3) throw ValidationError("pooled_covariance: need n >= 3");

    std::size_t n1 = 0;
    for (auto l : ld.labels) n1 += (l != 0);
    const std::size_t n0 = n - n1;
    if (n1 == 0 || n0 == 0)
        throw EstimationError("pooled_covariance: a label group is empty");

    Vector mean0(p, 0.0), mean1(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = ld.data.row(i);
        Vector& m = ld.labels[i] ? mean1 : mean0;
        for (std::size_t j = 0; j < p; ++j) m[j] += row[j];
    }
    for (std::size_t j = 0; j < p; ++j) {
        mean0[j] /= static_cast<double>(n0);
        mean1[j] /= static_cast<double>(n1);
    }

    Matrix s(p, p);
    Vector d(p);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = ld.data.row(i);
        const Vector& m = ld.labels[i] ? mean1 : mean0;
        for (std::size_t j = 0; j < p; ++j) d[j] = row[j] - m[j];
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = j; k < p; ++k) s(j, k) += d[j] * d[k];
    }
    const double div = static_cast<double>(n - 2);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = j; k < p; ++k) {
            const double v = s(j, k) / div;
            s(j, k) = v;
            s(k, j) = v;
        }
    }
    return SymmetricMatrix(std::move(s));
}

ProjectedMomentBundle projected_moment_bundle(const CenteredData& c, const Vector& u) {
    if (u.size() != c.p())
        throw ValidationError("projected_moment_bundle: dimension mismatch");
    const std::size_t n = c.n();
    const std::size_t p = c.p();
    const double dn = static_cast<double>(n);

    Vector t(n);
    K().project_rows(c.centered.rows.data(), n, p, u.data(), t.data());
    double sums[4];
    K().power_sums(t.data(), n, 4, sums);

    ProjectedMomentBundle b;
    b.s2 = sums[1] / dn;
    b.s3 = sums[2] / dn;
    b.s4 = sums[3] / dn;
    b.m1.resize(p);
    b.m2.resize(p);
    b.m3.resize(p);
    K().moment_vectors123(c.centered.rows.data(), t.data(), n, p, b.m1.data(),
                          b.m2.data(), b.m3.data());
    for (std::size_t j = 0; j < p; ++j) {
        b.m1[j] /= dn;
        b.m2[j] /= dn;
        b.m3[j] /= dn;
    }
    return b;
}

ProjectedPowerSums projected_power_sums(const CenteredData& c, const Vector& u) {
    if (u.size() != c.p())
        throw ValidationError("projected_power_sums: dimension mismatch");
    const std::size_t n = c.n();
    Vector t(n);
    K().project_rows(c.centered.rows.data(), n, c.p(), u.data(), t.data());
    double sums[4];
    K().power_sums(t.data(), n, 4, sums);
    const double dn = static_cast<double>(n);
    return {sums[1] / dn, sums[2] / dn, sums[3] / dn};
}

} // namespace pplda
