#ifndef PPLDA_ESTIMATORS_HPP
#define PPLDA_ESTIMATORS_HPP

#include <cstdint>
#include <string>
#include <utility>

#include "pplda/dataset.hpp"
#include "pplda/index_spec.hpp"
#include "pplda/mixture.hpp"
#include "pplda/sphere_opt.hpp"

namespace pplda {

/// A unit direction estimate plus optimizer diagnostics.
struct EstimateResult {
    Vector direction;           // unit norm
    double index_value = 0.0;   // objective at the optimum (NaN for LDA)
    std::size_t iterations = 0;
    bool converged = true;
    std::size_t restarts_used = 0;
    double grad_norm_at_opt = 0.0;
    std::string method;
    bool low_information = false; // index value at optimum below 1e-6
};

/// Unblind estimator: S_n^{-1} (mean of group 0 - mean of group 1),
/// normalized. Group 0 carries mean mu2, so the result estimates
/// theta = sigma^{-1} (mu2 - mu1) under the label convention.
EstimateResult lda_direction(const LabeledDataset& ld);

/// FOBI starting direction: whiten with C_n^{-1/2}, eigendecompose the
/// fourth-moment scatter B = (1/n) sum |z|^2 z z' of the whitened rows,
/// pick the eigenvector maximizing the sample index on the whitened data,
/// and map back through C_n^{-1/2}.
Vector fobi_direction(const Dataset& data, const IndexSpec& spec);

/// Projection pursuit: maximizes the sample index over the sphere from a
/// FOBI start plus `opts.restarts` uniform random starts; returns the best
/// local maximum (ties broken by start order, FOBI first).
EstimateResult pp_direction(const Dataset& data, const IndexSpec& spec,
                            const OptimizerOptions& opts, std::uint64_t seed);

/// Leading eigenvector of the sample covariance (divisor n).
EstimateResult pca_direction(const Dataset& data);

/// Flips u so its inner product with the reference is non-negative;
/// an exactly orthogonal pair keeps s = +1.
std::pair<Vector, int> align_sign(const Vector& u, const Vector& reference);

/// Maximal similarity index against the population discriminant, after
/// sign alignment, and the factor 2(1-msi) whose n-multiple estimates
/// tr(Psi) of the method.
struct MsiResult {
    double msi;
    double scaled_loss_factor;
};
MsiResult msi(const Vector& u, const MixtureModel& model);
MsiResult msi_against(const Vector& u, const Vector& reference_direction);

} // namespace pplda

#endif
