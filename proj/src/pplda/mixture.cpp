#include "pplda/mixture.hpp"

#include <cmath>

#include "pplda/rng.hpp"

namespace pplda {

namespace {

void require_unit(const Vector& u, const char* where) {
    const double n = norm(u);
    if (std::abs(n - 1.0) > 1e-8)
        throw ValidationError(std::string(where) + ": direction must have unit norm");
}

// Non-central moment E[Z^k] for Z ~ N(m, g), k <= 6.
double normal_moment(double m, double g, int k) {
    const double m2 = m * m;
    switch (k) {
        case 1: return m;
        case 2: return m2 + g;
        case 3: return m * (m2 + 3.0 * g);
        case 4: return m2 * m2 + 6.0 * m2 * g + 3.0 * g * g;
        case 5: return m * (m2 * m2 + 10.0 * m2 * g + 15.0 * g * g);
        case 6:
            return m2 * m2 * m2 + 15.0 * m2 * m2 * g + 45.0 * m2 * g * g +
                   15.0 * g * g * g;
        default: throw ValidationError("normal_moment: unsupported order");
    }
}

} // namespace

MixtureModel::MixtureModel(double alpha1_, Vector mu1_, Vector mu2_,
                           SymmetricMatrix sigma_)
    : alpha1(alpha1_), mu1(std::move(mu1_)), mu2(std::move(mu2_)),
      sigma(std::move(sigma_)) {
    if (!(alpha1 > 0.0 && alpha1 < 1.0))
        throw ValidationError("MixtureModel: alpha1 must lie strictly in (0,1)");
    if (mu1.size() != mu2.size() || mu1.size() != sigma.dim())
        throw ValidationError("MixtureModel: dimension mismatch between means and sigma");
    if (norm(sub(mu2, mu1)) == 0.0)
        throw ValidationError("MixtureModel: the group means must differ");
}

DerivedParams derive(const MixtureModel& model) {
    DerivedParams d;
    d.h = sub(model.mu2, model.mu1);
    d.beta = model.alpha1 * (1.0 - model.alpha1);
    const CholeskyFactor chol(model.sigma); // throws SingularityError if not SPD
    d.theta = chol.solve(d.h);
    d.tau = dot(d.h, d.theta);
    d.theta_unit = normalized(d.theta);
    return d;
}

MixtureSampler::MixtureSampler(const MixtureModel& model)
    : model_(model), sigma_sqrt_(spd_sqrt(model.sigma)) {}

LabeledDataset MixtureSampler::sample(std::size_t n, std::uint64_t seed,
                                      std::uint64_t stream) const {
    if (n < 1) throw ValidationError("sample: need n >= 1");
    const std::size_t p = model_.dim();
    LabeledDataset out;
    out.data = Dataset(n, p);
    out.labels.resize(n);

    Rng rng(seed, stream);
    Vector z(p);
    for (std::size_t i = 0; i < n; ++i) {
        const bool group1 = rng.next_bernoulli(model_.alpha1);
        out.labels[i] = group1 ? 1 : 0;
        for (std::size_t j = 0; j < p; ++j) z[j] = rng.next_gaussian();
        const Vector& mu = group1 ? model_.mu1 : model_.mu2;
        double* row = out.data.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            double v = mu[j];
            for (std::size_t k = 0; k < p; ++k) v += sigma_sqrt_(j, k) * z[k];
            row[j] = v;
        }
    }
    return out;
}

LabeledDataset sample(const MixtureModel& model, std::size_t n, std::uint64_t seed,
                      std::uint64_t stream) {
    return MixtureSampler(model).sample(n, seed, stream);
}

double population_projected_moment(const MixtureModel& model, const Vector& u, int k) {
    if (k < 2 || k > 6)
        throw ValidationError("population_projected_moment: order must be in 2..6");
    require_unit(u, "population_projected_moment");
    const double alpha1 = model.alpha1;
    const double alpha2 = 1.0 - alpha1;
    const Vector h = sub(model.mu2, model.mu1);
    const double t = dot(u, h);
    const double g = quadratic_form(model.sigma, u);
    // Centered mixture: group 1 sits at -alpha2*t, group 2 at alpha1*t.
    return alpha1 * normal_moment(-alpha2 * t, g, k) +
           alpha2 * normal_moment(alpha1 * t, g, k);
}

namespace {

struct IndexPieces {
    double value;
    double dvalue_df; // derivative w.r.t. f = t^2/g
};

IndexPieces population_index_in_f(double beta, double f, const IndexSpec& spec) {
    const double d = 1.0 + beta * f;
    const double f2 = f * f;
    const double f3 = f2 * f;
    const double d3 = d * d * d;
    const double d4 = d3 * d;
    const double skew_coef = beta * beta * (1.0 - 4.0 * beta);
    const double kurt_coef = beta * beta * (1.0 - 6.0 * beta) * (1.0 - 6.0 * beta);

    const double skew_sq = skew_coef * f3 / d3;
    const double kurt_sq = kurt_coef * f2 * f2 / d4;
    const double dskew = skew_coef * 3.0 * f2 / d4;
    const double dkurt = kurt_coef * 4.0 * f3 / (d4 * d);

    const double w1 = spec.weight_skew();
    const double w2 = spec.weight_kurt();
    return {w1 * skew_sq + w2 * kurt_sq, w1 * dskew + w2 * dkurt};
}

} // namespace

double population_index(const MixtureModel& model, const Vector& u,
                        const IndexSpec& spec) {
    require_unit(u, "population_index");
    const Vector h = sub(model.mu2, model.mu1);
    const double t = dot(u, h);
    const double g = quadratic_form(model.sigma, u);
    const double beta = model.alpha1 * (1.0 - model.alpha1);
    return population_index_in_f(beta, t * t / g, spec).value;
}

PopulationIndexEval population_index_with_gradient(const MixtureModel& model,
                                                   const Vector& u,
                                                   const IndexSpec& spec) {
    require_unit(u, "population_index_with_gradient");
    const Vector h = sub(model.mu2, model.mu1);
    const double t = dot(u, h);
    const double g = quadratic_form(model.sigma, u);
    const double f = t * t / g;
    const double beta = model.alpha1 * (1.0 - model.alpha1);
    const IndexPieces pieces = population_index_in_f(beta, f, spec);

    // grad f = (2t/g) h - (2f/g) Sigma u
    Vector grad = scaled(h, 2.0 * t / g);
    axpy(-2.0 * f / g, matvec(model.sigma, u), grad);
    for (double& v : grad) v *= pieces.dvalue_df;
    return {pieces.value, std::move(grad)};
}

Vector random_mean_at_distance(const SymmetricMatrix& sigma, double tau,
                               std::uint64_t seed, std::uint64_t stream) {
    if (!(tau > 0.0)) throw ValidationError("random_mean_at_distance: tau must be > 0");
    const std::size_t p = sigma.dim();
    const SymmetricMatrix root = spd_sqrt(sigma);
    Rng rng(seed, stream);
    Vector d(p);
    double n2 = 0.0;
    do {
        for (std::size_t j = 0; j < p; ++j) d[j] = rng.next_gaussian();
        n2 = dot(d, d);
    } while (n2 == 0.0);
    const double scale = std::sqrt(tau / n2);
    Vector mu = matvec(root, d);
    for (double& v : mu) v *= scale;
    return mu;
}

SymmetricMatrix ar1_covariance(std::size_t p, double rho) {
    if (!(std::abs(rho) < 1.0))
        throw ValidationError("ar1_covariance: |rho| must be < 1");
    Matrix m(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            m(i, j) = std::pow(rho, std::abs(static_cast<double>(i) -
                                             static_cast<double>(j)));
    return SymmetricMatrix(std::move(m));
}

} // namespace pplda
