#include "pplda/estimators.hpp"

#include <cmath>
#include <limits>

#include "pplda/indices.hpp"
#include "pplda/moments.hpp"
#include "pplda/rng.hpp"
#include "pplda/simd/kernels.hpp"

namespace pplda {

EstimateResult lda_direction(const LabeledDataset& ld) {
    const std::size_t n = ld.data.n;
    const std::size_t p = ld.data.p;
    if (n < p + 2) throw ValidationError("lda_direction: need n >= p + 2");

    std::size_t n1 = 0;
    for (auto l : ld.labels) n1 += (l != 0);
    const std::size_t n0 = n - n1;
    if (n0 == 0 || n1 == 0)
        throw EstimationError("lda_direction: a label group is empty");

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

    const SymmetricMatrix pooled = pooled_covariance(ld);
    const CholeskyFactor chol(pooled);
    const Vector w = chol.solve(sub(mean0, mean1)); // group 0 holds mu2

    EstimateResult res;
    res.direction = normalized(w);
    res.index_value = std::numeric_limits<double>::quiet_NaN();
    res.method = "lda";
    return res;
}

Vector fobi_direction(const Dataset& data, const IndexSpec& spec) {
    const std::size_t n = data.n;
    const std::size_t p = data.p;
    if (n < p + 1) throw ValidationError("fobi_direction: need n >= p + 1");

    const SymmetricMatrix cov = sample_covariance(data, CovDivisor::N);
    const SymmetricMatrix whitener = spd_inverse_sqrt(cov);

    const CenteredData c = center(data);
    Dataset z(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = c.centered.row(i);
        double* zrow = z.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            double v = 0.0;
            for (std::size_t k = 0; k < p; ++k) v += whitener(j, k) * row[k];
            zrow[j] = v;
        }
    }

    Vector weights(n);
    simd::active().sq_norm_rows(z.rows.data(), n, p, weights.data());
    Matrix b(p, p);
    simd::active().weighted_scatter_upper(z.rows.data(), n, p, weights.data(),
                                          b.data());
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = j; k < p; ++k) {
            const double v = b(j, k) / static_cast<double>(n);
            b(j, k) = v;
            b(k, j) = v;
        }
    }
    const EigenDecomposition dec = sym_eigen(SymmetricMatrix(std::move(b)));

    const CenteredData zc = center(z);
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t j = 0; j < p; ++j) {
        const double v = index_value(spec, zc, dec.vectors.col(j));
        if (v > best_value) {
            best_value = v;
            best = j;
        }
    }
    return normalized(matvec(whitener, dec.vectors.col(best)));
}

EstimateResult pp_direction(const Dataset& data, const IndexSpec& spec,
                            const OptimizerOptions& opts, std::uint64_t seed) {
    const std::size_t n = data.n;
    const std::size_t p = data.p;
    if (n < p) throw ValidationError("pp_direction: need n >= p");
    opts.validate();

    const CenteredData c = center(data);
    SphereObjective objective;
    objective.value = [&](const Vector& u) { return index_value(spec, c, u); };
    objective.value_and_grad = [&](const Vector& u) {
        const IndexEvaluation ev = evaluate(spec, c, u);
        return std::make_pair(ev.value, ev.gradient);
    };

    std::vector<Vector> starts;
    starts.reserve(opts.restarts + 1);
    try {
        starts.push_back(fobi_direction(data, spec));
    } catch (const Error&) {
        if (opts.restarts == 0) throw; // no other start available
    }
    for (std::size_t r = 1; r <= opts.restarts; ++r) {
        Rng rng(seed, r);
        Vector d(p);
        double n2 = 0.0;
        do {
            for (std::size_t j = 0; j < p; ++j) d[j] = rng.next_gaussian();
            n2 = dot(d, d);
        } while (n2 == 0.0);
        starts.push_back(scaled(d, 1.0 / std::sqrt(n2)));
    }

    bool have_best = false;
    SphereMaxResult best;
    for (const Vector& start : starts) {
        const SphereMaxResult run = maximize_on_sphere(objective, start, opts);
        if (!have_best || run.value > best.value) {
            best = run;
            have_best = true;
        }
    }

    EstimateResult res;
    res.direction = best.direction;
    res.index_value = best.value;
    res.iterations = best.iterations;
    res.converged = best.converged;
    res.restarts_used = opts.restarts;
    res.grad_norm_at_opt = best.projected_grad_norm;
    res.method = "pp-" + spec.name();
    res.low_information = best.value < 1e-6;
    return res;
}

EstimateResult pca_direction(const Dataset& data) {
    const SymmetricMatrix cov = sample_covariance(data, CovDivisor::N);
    const EigenDecomposition dec = sym_eigen(cov);
    EstimateResult res;
    res.direction = normalized(dec.vectors.col(0));
    res.index_value = dec.values[0];
    res.method = "pca";
    return res;
}

std::pair<Vector, int> align_sign(const Vector& u, const Vector& reference) {
    if (norm(reference) == 0.0)
        throw ValidationError("align_sign: zero reference vector");
    const int s = dot(u, reference) < 0.0 ? -1 : 1;
    return {s == 1 ? u : scaled(u, -1.0), s};
}

MsiResult msi_against(const Vector& u, const Vector& reference_direction) {
    const Vector ref = normalized(reference_direction);
    const double inner = dot(u, ref);
    const double aligned = inner < 0.0 ? -inner : inner;
    return {aligned, 2.0 * (1.0 - aligned)};
}

MsiResult msi(const Vector& u, const MixtureModel& model) {
    return msi_against(u, derive(model).theta_unit);
}

} // namespace pplda
