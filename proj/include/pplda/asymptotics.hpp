#ifndef PPLDA_ASYMPTOTICS_HPP
#define PPLDA_ASYMPTOTICS_HPP

#include <optional>
#include <string>

#include "pplda/mixture.hpp"

namespace pplda {

/// Mixing proportions at which an index carries no information:
/// squared excess kurtosis vanishes at delta1/delta2, squared skewness
/// at one half.
struct DegeneratePoints {
    static constexpr double delta1() { return 0.5 - 0.28867513459481288225457439025098; }
    static constexpr double delta2() { return 0.5 + 0.28867513459481288225457439025098; }
    static constexpr double half() { return 0.5; }
};

/// Limiting-variance constant of kurtosis-based projection pursuit,
/// relative to the LDA baseline. +infinity at beta = 1/6.
double c_kappa(double beta, double tau);

/// Same for skewness-based projection pursuit. +infinity at beta = 1/4.
double c_gamma(double beta, double tau);

/// Same for the hybrid index with skewness weight w1 in (0,1). Served by
/// the closed-form large-separation limit when tau exceeds 1e8.
double c_eta(double beta, double tau, double w1);

/// The finite-tau formula without the large-tau switch (cross-validation).
double c_eta_finite(double beta, double tau, double w1);

/// tau -> infinity limits.
double c_kappa_limit(double beta);
double c_gamma_limit(double beta);
double c_eta_limit(double beta, double w1);

/// Large-separation relative efficiencies vs LDA:
/// eff_kappa = (1-6b)^2/(1-3b), eff_gamma = 1-4b.
struct EfficiencyLimits {
    double eff_kappa;
    double eff_gamma;
};
EfficiencyLimits efficiency_limits(double beta);

enum class Method { Lda, PpKurtosis, PpSkewness, PpHybrid, Pca };
std::string method_name(Method m);

/// Limiting covariance of sqrt(n) * (direction estimate - truth) and the
/// derived comparison quantities.
struct AsymptoticSummary {
    Method method;
    double constant;   // 1 for LDA, C for PP, NaN for PCA (not proportional)
    std::optional<SymmetricMatrix> psi;
    double trace;      // +infinity when the method is degenerate
    double efficiency_vs_lda; // tr(Psi_lda)/tr(Psi_method)
};

/// Psi for LDA and the three PP methods:
///   Psi = C * (1+beta*tau)/(|theta|^2 beta) * P Sigma^{-1} P,
/// with P the projector orthogonal to theta. Dispatches to psi_pca for
/// Method::Pca. w1 is required for Method::PpHybrid.
AsymptoticSummary psi_matrix(Method method, const MixtureModel& model,
                             std::optional<double> w1 = std::nullopt);

/// PCA applicability: h must be an eigenvector of Sigma (eigenvalue phi)
/// and the second eigenvalue of Cov(x) must stay below phi*(1+beta*tau).
struct PcaFisherCheck {
    bool consistent;
    double eigen_margin; // phi*(1+beta*tau) - phi_2{Cov(x)}
};
PcaFisherCheck pca_fisher_check(const MixtureModel& model);

/// Limiting covariance of the leading principal component:
///   Psi_PCA = (1+bt)/|theta|^2 * M+ [ tau(Sigma - hh'/tau)
///             + (1+bt)(kappa(theta)-1) hh' ] M+,
/// with M = Sigma + beta hh' - lambda1 I and M+ its pseudoinverse taken
/// on the complement of theta. Throws EstimationError when the Fisher
/// check fails.
AsymptoticSummary psi_pca(const MixtureModel& model);

/// Weight minimizing c_eta for a given (alpha1, tau); unique=false at the
/// degenerate proportions where c_eta is constant in w1.
struct OptimalWeight {
    double w1_star;
    bool unique;
};
OptimalWeight optimal_weight(double alpha1, double tau);

/// Area under the efficiency curve alpha1 -> 1/c_eta over [0.01, 0.99]
/// (composite Simpson, 2001 nodes).
double average_efficiency(double w1, double tau);

/// Weight maximizing the average efficiency for a given tau.
double best_average_weight(double tau);

/// Mixing proportion in (delta1, 1/2) at which kurtosis- and skewness-based
/// projection pursuit are equally efficient (lower branch of the frontier;
/// the upper branch is its mirror image 1 - alpha).
double equal_efficiency_alpha(double tau);

} // namespace pplda

#endif
