#ifndef PPLDA_MIXTURE_HPP
#define PPLDA_MIXTURE_HPP

#include <cstdint>

#include "pplda/dataset.hpp"
#include "pplda/index_spec.hpp"
#include "pplda/linalg.hpp"

namespace pplda {

/// Two-component Gaussian location mixture with shared covariance:
/// a point belongs to group 1 (mean mu1) with probability alpha1 and to
/// group 2 (mean mu2) otherwise; both groups share the SPD covariance.
struct MixtureModel {
    double alpha1;
    Vector mu1;
    Vector mu2;
    SymmetricMatrix sigma;

    MixtureModel(double alpha1_, Vector mu1_, Vector mu2_, SymmetricMatrix sigma_);

    std::size_t dim() const { return mu1.size(); }
};

/// Quantities derived from the model parameters:
///   h     = mu2 - mu1
///   beta  = alpha1 * (1 - alpha1)
///   theta = sigma^{-1} h         (the optimal discriminant direction)
///   tau   = h' sigma^{-1} h      (squared Mahalanobis separation)
struct DerivedParams {
    Vector h;
    double beta;
    Vector theta;
    double tau;
    Vector theta_unit;
};

/// Computes DerivedParams; theta comes from an SPD solve, never from an
/// explicit inverse.
DerivedParams derive(const MixtureModel& model);

/// Samples from the mixture with one covariance factorization per sampler.
/// Deterministic for a fixed (seed, stream); label 1 marks group 1 (mu1).
class MixtureSampler {
  public:
    explicit MixtureSampler(const MixtureModel& model);
    LabeledDataset sample(std::size_t n, std::uint64_t seed,
                          std::uint64_t stream = 0) const;

  private:
    const MixtureModel model_;
    SymmetricMatrix sigma_sqrt_;
};

LabeledDataset sample(const MixtureModel& model, std::size_t n, std::uint64_t seed,
                      std::uint64_t stream = 0);

/// k-th moment E[(u' x~)^k] of the centered mixture projected on the unit
/// vector u, from the univariate normal-mixture closed forms. k in 2..6.
double population_projected_moment(const MixtureModel& model, const Vector& u, int k);

/// Population value of the chosen projection index at direction u.
double population_index(const MixtureModel& model, const Vector& u,
                        const IndexSpec& spec);

/// Population index together with its (unconstrained) Euclidean gradient.
struct PopulationIndexEval {
    double value;
    Vector gradient;
};
PopulationIndexEval population_index_with_gradient(const MixtureModel& model,
                                                   const Vector& u,
                                                   const IndexSpec& spec);

/// Draws mu with mu' sigma^{-1} mu = tau: a standard normal direction d is
/// pushed through sigma^{1/2} and rescaled.
Vector random_mean_at_distance(const SymmetricMatrix& sigma, double tau,
                               std::uint64_t seed, std::uint64_t stream = 0);

/// AR(1) covariance: sigma_ij = rho^|i-j|.
SymmetricMatrix ar1_covariance(std::size_t p, double rho);

} // namespace pplda

#endif
