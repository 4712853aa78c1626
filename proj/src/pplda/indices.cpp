#include "pplda/indices.hpp"

#include <cmath>

namespace pplda {

namespace {

void require_positive_s2(double s2) {
    if (!(s2 > 0.0))
        throw EstimationError(
            "projection index: zero second moment in this direction (degenerate)");
}

} // namespace

double kurtosis_n(const CenteredData& c, const Vector& u) {
    const ProjectedPowerSums s = projected_power_sums(c, u);
    require_positive_s2(s.s2);
    return s.s4 / (s.s2 * s.s2);
}

double skewness_n(const CenteredData& c, const Vector& u) {
    const ProjectedPowerSums s = projected_power_sums(c, u);
    require_positive_s2(s.s2);
    return s.s3 / std::pow(s.s2, 1.5);
}

double index_value(const IndexSpec& spec, const CenteredData& c, const Vector& u) {
    const ProjectedPowerSums s = projected_power_sums(c, u);
    require_positive_s2(s.s2);
    const double kurt = s.s4 / (s.s2 * s.s2);
    const double skew = s.s3 / std::pow(s.s2, 1.5);
    return spec.weight_skew() * skew * skew +
           spec.weight_kurt() * (kurt - 3.0) * (kurt - 3.0);
}

IndexEvaluation evaluate(const IndexSpec& spec, const CenteredData& c, const Vector& u) {
    if (c.n() < c.p())
        throw ValidationError("evaluate: need n >= p for a well-defined index");
    const ProjectedMomentBundle b = projected_moment_bundle(c, u);
    require_positive_s2(b.s2);

    const std::size_t p = c.p();
    IndexEvaluation ev;
    ev.kurtosis = b.s4 / (b.s2 * b.s2);
    ev.skewness = b.s3 / std::pow(b.s2, 1.5);
    const double excess = ev.kurtosis - 3.0;
    const double w1 = spec.weight_skew();
    const double w2 = spec.weight_kurt();
    ev.value = w1 * ev.skewness * ev.skewness + w2 * excess * excess;

    const double skew_coef = 6.0 * ev.skewness / std::pow(b.s2, 2.5);
    const double kurt_coef = 8.0 * excess / (b.s2 * b.s2 * b.s2);
    ev.gradient.assign(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        const double g_gamma = b.s2 * b.m2[j] - b.s3 * b.m1[j];
        const double g_kappa = b.s2 * b.m3[j] - b.s4 * b.m1[j];
        ev.gradient[j] = w1 * skew_coef * g_gamma + w2 * kurt_coef * g_kappa;
    }
    return ev;
}

Vector estimating_residual(const IndexSpec& spec, const CenteredData& c,
                           const Vector& u) {
    const ProjectedMomentBundle b = projected_moment_bundle(c, u);
    require_positive_s2(b.s2);

    const std::size_t p = c.p();
    Vector r(p, 0.0);
    switch (spec.kind) {
        case IndexKind::SquaredSkewness:
            for (std::size_t j = 0; j < p; ++j) r[j] = b.s2 * b.m2[j] - b.s3 * b.m1[j];
            break;
        case IndexKind::SquaredExcessKurtosis:
            for (std::size_t j = 0; j < p; ++j) r[j] = b.s2 * b.m3[j] - b.s4 * b.m1[j];
            break;
        case IndexKind::Hybrid: {
            const double gamma = b.s3 / std::pow(b.s2, 1.5);
            const double excess = b.s4 / (b.s2 * b.s2) - 3.0;
            const double cg = 3.0 * spec.weight_skew() * gamma * std::sqrt(b.s2);
            const double ck = 4.0 * spec.weight_kurt() * excess;
            for (std::size_t j = 0; j < p; ++j) {
                const double g_gamma = b.s2 * b.m2[j] - b.s3 * b.m1[j];
                const double g_kappa = b.s2 * b.m3[j] - b.s4 * b.m1[j];
                r[j] = cg * g_gamma + ck * g_kappa;
            }
            break;
        }
    }
    return r;
}

} // namespace pplda
