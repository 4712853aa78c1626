#ifndef PPLDA_MOMENTS_HPP
#define PPLDA_MOMENTS_HPP

#include "pplda/dataset.hpp"
#include "pplda/linalg.hpp"

namespace pplda {

/// Data together with the subtracted row mean. Centering is two-pass so
/// the residual column means sit at rounding level even for n = 10^6.
struct CenteredData {
    Vector mean;
    Dataset centered;

    std::size_t n() const { return centered.n; }
    std::size_t p() const { return centered.p; }
};

CenteredData center(const Dataset& data);

/// (1/n) sum_i (u' x~_i)^k for k in 1..6.
double projected_moment(const CenteredData& c, const Vector& u, int k);

/// (1/n) sum_i (u' x~_i)^k x~_i for k in 0..3.
Vector projected_moment_vector(const CenteredData& c, const Vector& u, int k);

enum class CovDivisor { N, NMinusOne };

/// Standard sample covariance with the stated divisor.
SymmetricMatrix sample_covariance(const Dataset& data, CovDivisor divisor);

/// Pooled within-group covariance with divisor n-2 and group-wise centering.
/// Throws EstimationError when either label group is empty.
SymmetricMatrix pooled_covariance(const LabeledDataset& ld);

/// Everything one index-with-gradient evaluation needs, in one pass:
/// s̃_k = (1/n) Σ (u'x~)^k and m̃_k = (1/n) Σ (u'x~)^k x~.
struct ProjectedMomentBundle {
    double s2, s3, s4;
    Vector m1, m2, m3;
};
ProjectedMomentBundle projected_moment_bundle(const CenteredData& c, const Vector& u);

/// Value-only variant for line searches: s̃_2, s̃_3, s̃_4.
struct ProjectedPowerSums {
    double s2, s3, s4;
};
ProjectedPowerSums projected_power_sums(const CenteredData& c, const Vector& u);

} // namespace pplda

#endif
