#ifndef PPLDA_INDICES_HPP
#define PPLDA_INDICES_HPP

#include "pplda/index_spec.hpp"
#include "pplda/moments.hpp"

namespace pplda {

/// Sample projection index at a direction, with the pieces the optimizer
/// and its diagnostics need.
struct IndexEvaluation {
    double value;
    Vector gradient; // unconstrained Euclidean gradient
    double kurtosis; // kappa_n(u)
    double skewness; // gamma_n(u)
};

/// kappa_n(u) = s̃_4 / s̃_2^2.
double kurtosis_n(const CenteredData& c, const Vector& u);

/// gamma_n(u) = s̃_3 / s̃_2^{3/2}.
double skewness_n(const CenteredData& c, const Vector& u);

/// Index value only (used by line searches).
double index_value(const IndexSpec& spec, const CenteredData& c, const Vector& u);

/// Index value plus analytic gradient:
///   grad gamma_n^2          = (6 / s̃_2^{5/2}) gamma_n (s̃_2 m̃_2 - s̃_3 m̃_1)
///   grad (kappa_n - 3)^2    = (8 / s̃_2^3) (kappa_n - 3) (s̃_2 m̃_3 - s̃_4 m̃_1)
/// and the hybrid combines them with weights (w1, w2). Sphere retraction is
/// the optimizer's job.
IndexEvaluation evaluate(const IndexSpec& spec, const CenteredData& c, const Vector& u);

/// Estimating-equation residual whose component orthogonal to u vanishes at
/// an interior maximizer:
///   skewness:  s̃_2 m̃_2 - s̃_3 m̃_1
///   kurtosis:  s̃_2 m̃_3 - s̃_4 m̃_1
///   hybrid:    3 w1 gamma_n s̃_2^{1/2} (skew residual)
///            + 4 w2 (kappa_n - 3)     (kurt residual)
Vector estimating_residual(const IndexSpec& spec, const CenteredData& c,
                           const Vector& u);

} // namespace pplda

#endif
