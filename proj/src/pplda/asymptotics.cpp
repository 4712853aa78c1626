#include "pplda/asymptotics.hpp"

#include <cmath>
#include <limits>

namespace pplda {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Thresholds below which the kurtosis/skewness information terms are
// treated as exactly extinguished (the factors are squared differences of
// order-one quantities, so 1e-12 is pure rounding).
constexpr double kDegenerateTol = 1e-12;

// c_eta switches to its closed-form limit beyond this separation.
constexpr double kLargeTau = 1e8;

void check_beta(double beta) {
    if (!(beta > 0.0 && beta <= 0.25 + 1e-12))
        throw ValidationError("asymptotics: beta must lie in (0, 1/4]");
}

void check_tau(double tau) {
    if (!(tau > 0.0)) throw ValidationError("asymptotics: tau must be positive");
}

double delta_poly(double beta, double tau) {
    return 6.0 + 24.0 * beta * tau + 9.0 * beta * (1.0 - 2.0 * beta) * tau * tau +
           beta * (1.0 - 3.0 * beta) * tau * tau * tau;
}

} // namespace

double c_kappa_limit(double beta) {
    check_beta(beta);
    const double k = 1.0 - 6.0 * beta;
    if (std::abs(k) < kDegenerateTol) return kInf;
    return (1.0 - 3.0 * beta) / (k * k);
}

double c_gamma_limit(double beta) {
    check_beta(beta);
    const double g = 1.0 - 4.0 * beta;
    if (std::abs(g) < kDegenerateTol) return kInf;
    return 1.0 / g;
}

double c_kappa(double beta, double tau) {
    check_beta(beta);
    if (std::isinf(tau) || tau > kLargeTau) return c_kappa_limit(beta);
    check_tau(tau);
    const double k = 1.0 - 6.0 * beta;
    if (std::abs(k) < kDegenerateTol) return kInf;
    return delta_poly(beta, tau) / (beta * tau * tau * tau * k * k);
}

double c_gamma(double beta, double tau) {
    check_beta(beta);
    if (std::isinf(tau) || tau > kLargeTau) return c_gamma_limit(beta);
    check_tau(tau);
    const double g = 1.0 - 4.0 * beta;
    if (std::abs(g) < kDegenerateTol) return kInf;
    return (2.0 + 6.0 * beta * tau + beta * tau * tau) / (beta * tau * tau * g);
}

double c_eta_limit(double beta, double w1) {
    check_beta(beta);
    if (!(w1 > 0.0 && w1 < 1.0))
        throw ValidationError("c_eta: w1 must lie strictly in (0,1)");
    const double w2 = 1.0 - w1;
    const double g = 1.0 - 4.0 * beta;
    const double k = 1.0 - 6.0 * beta;
    const double denom_inner = 3.0 * w1 * beta * g + 4.0 * w2 * k * k;
    if (denom_inner == 0.0) return kInf;
    const double num = 9.0 * w1 * w1 * beta * beta * g +
                       24.0 * w1 * w2 * beta * g * k +
                       16.0 * w2 * w2 * k * k * (1.0 - 3.0 * beta);
    return num / (denom_inner * denom_inner);
}

double c_eta_finite(double beta, double tau, double w1) {
    check_beta(beta);
    check_tau(tau);
    if (!(w1 > 0.0 && w1 < 1.0))
        throw ValidationError("c_eta: w1 must lie strictly in (0,1)");
    const double w2 = 1.0 - w1;
    const double bt = beta * tau;
    const double g = 1.0 - 4.0 * beta;
    const double k = 1.0 - 6.0 * beta;
    const double one_bt = 1.0 + bt;

    const double denom_inner = 3.0 * w1 * one_bt * g + 4.0 * w2 * tau * k * k;
    if (denom_inner == 0.0) return kInf;
    const double denom = beta * tau * tau * denom_inner * denom_inner;

    const double term_skew =
        9.0 * w1 * w1 * one_bt * one_bt * g * (2.0 + 6.0 * bt + beta * tau * tau);
    const double term_cross =
        24.0 * w1 * w2 * tau * tau * one_bt * g * beta * k * (6.0 + tau);
    const double term_kurt = 16.0 * w2 * w2 * tau * k * k * delta_poly(beta, tau);
    return (term_skew + term_cross + term_kurt) / denom;
}

double c_eta(double beta, double tau, double w1) {
    if (std::isinf(tau) || tau > kLargeTau) return c_eta_limit(beta, w1);
    return c_eta_finite(beta, tau, w1);
}

EfficiencyLimits efficiency_limits(double beta) {
    check_beta(beta);
    const double k = 1.0 - 6.0 * beta;
    return {k * k / (1.0 - 3.0 * beta), 1.0 - 4.0 * beta};
}

std::string method_name(Method m) {
    switch (m) {
        case Method::Lda: return "lda";
        case Method::PpKurtosis: return "pp-kurtosis";
        case Method::PpSkewness: return "pp-skewness";
        case Method::PpHybrid: return "pp-hybrid";
        case Method::Pca: return "pca";
    }
    return "unknown";
}

namespace {

Matrix spd_inverse_via_cholesky(const SymmetricMatrix& a) {
    const CholeskyFactor chol(a);
    const std::size_t p = a.dim();
    Matrix inv(p, p);
    Vector e(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        e[j] = 1.0;
        const Vector col = chol.solve(e);
        e[j] = 0.0;
        for (std::size_t i = 0; i < p; ++i) inv(i, j) = col[i];
    }
    return inv;
}

// (1+bt)/(|theta|^2 b) * P Sigma^{-1} P
SymmetricMatrix psi_lda_matrix(const MixtureModel& model, const DerivedParams& d) {
    const Matrix sigma_inv = spd_inverse_via_cholesky(model.sigma);
    const Matrix proj = orthogonal_projector(d.theta).matrix();
    Matrix psi = matmul(matmul(proj, sigma_inv), proj);
    const double factor =
        (1.0 + d.beta * d.tau) / (dot(d.theta, d.theta) * d.beta);
    for (std::size_t i = 0; i < psi.rows(); ++i)
        for (std::size_t j = 0; j < psi.cols(); ++j) psi(i, j) *= factor;
    // The product of symmetric factors is symmetric up to rounding.
    for (std::size_t i = 0; i < psi.rows(); ++i)
        for (std::size_t j = i + 1; j < psi.cols(); ++j) {
            const double v = 0.5 * (psi(i, j) + psi(j, i));
            psi(i, j) = v;
            psi(j, i) = v;
        }
    return SymmetricMatrix(std::move(psi));
}

} // namespace

AsymptoticSummary psi_matrix(Method method, const MixtureModel& model,
                             std::optional<double> w1) {
    if (method == Method::Pca) return psi_pca(model);

    const DerivedParams d = derive(model);
    double constant = 1.0;
    switch (method) {
        case Method::Lda: constant = 1.0; break;
        case Method::PpKurtosis: constant = c_kappa(d.beta, d.tau); break;
        case Method::PpSkewness: constant = c_gamma(d.beta, d.tau); break;
        case Method::PpHybrid:
            if (!w1) throw ValidationError("psi_matrix: hybrid method requires w1");
            constant = c_eta(d.beta, d.tau, *w1);
            break;
        case Method::Pca: break;
    }

    AsymptoticSummary s;
    s.method = method;
    s.constant = constant;
    if (std::isinf(constant)) {
        s.psi = std::nullopt;
        s.trace = kInf;
        s.efficiency_vs_lda = 0.0;
        return s;
    }
    SymmetricMatrix base = psi_lda_matrix(model, d);
    if (constant != 1.0) {
        Matrix m = base.matrix();
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) *= constant;
        base = SymmetricMatrix(std::move(m));
    }
    s.trace = base.trace();
    s.psi = std::move(base);
    s.efficiency_vs_lda = 1.0 / constant;
    return s;
}

PcaFisherCheck pca_fisher_check(const MixtureModel& model) {
    const DerivedParams d = derive(model);
    const Vector sigma_h = matvec(model.sigma, d.h);
    const double hh = dot(d.h, d.h);
    const double phi = dot(d.h, sigma_h) / hh;

    Vector resid = sigma_h;
    axpy(-phi, d.h, resid);
    const bool h_is_eigenvector = norm(resid) / std::sqrt(hh) < 1e-8;

    const double lambda1 = phi * (1.0 + d.beta * d.tau);
    double phi2 = 0.0;
    if (model.dim() >= 2) {
        Matrix cov = model.sigma.matrix();
        for (std::size_t i = 0; i < cov.rows(); ++i)
            for (std::size_t j = 0; j < cov.cols(); ++j)
                cov(i, j) += d.beta * d.h[i] * d.h[j];
        const EigenDecomposition dec = sym_eigen(SymmetricMatrix(std::move(cov)));
        phi2 = dec.values[1];
    }
    const double margin = lambda1 - phi2;
    return {h_is_eigenvector && margin > 0.0, margin};
}

AsymptoticSummary psi_pca(const MixtureModel& model) {
    const PcaFisherCheck check = pca_fisher_check(model);
    if (!check.consistent)
        throw EstimationError(
            "psi_pca: PCA is not Fisher consistent for this model (eigenvector "
            "condition or eigenvalue bound fails)");

    const DerivedParams d = derive(model);
    const std::size_t p = model.dim();
    const double theta_norm2 = dot(d.theta, d.theta);
    const double one_bt = 1.0 + d.beta * d.tau;

    const double phi = dot(d.h, matvec(model.sigma, d.h)) / dot(d.h, d.h);
    const double lambda1 = phi * one_bt;

    Matrix m(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            m(i, j) = model.sigma(i, j) + d.beta * d.h[i] * d.h[j] -
                      (i == j ? lambda1 : 0.0);
    const EigenDecomposition mdec = sym_eigen(SymmetricMatrix(std::move(m)));

    // M annihilates theta; exclude that eigendirection and invert the rest.
    std::size_t null_j = 0;
    double best_align = -1.0;
    for (std::size_t j = 0; j < p; ++j) {
        const double align = std::abs(dot(mdec.vectors.col(j), d.theta_unit));
        if (align > best_align) {
            best_align = align;
            null_j = j;
        }
    }
    Matrix m_pinv(p, p);
    for (std::size_t j = 0; j < p; ++j) {
        if (j == null_j) continue;
        const double f = 1.0 / mdec.values[j];
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t k = 0; k < p; ++k)
                m_pinv(i, k) += f * mdec.vectors(i, j) * mdec.vectors(k, j);
    }

    // Population kurtosis of the projection on theta.
    const double s2 = population_projected_moment(model, d.theta_unit, 2);
    const double s4 = population_projected_moment(model, d.theta_unit, 4);
    const double kappa_theta = s4 / (s2 * s2);

    Matrix kernel(p, p);
    const double hh_coef = -1.0 + one_bt * (kappa_theta - 1.0);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            kernel(i, j) = d.tau * model.sigma(i, j) + hh_coef * d.h[i] * d.h[j];

    Matrix psi = matmul(matmul(m_pinv, kernel), m_pinv);
    const double factor = one_bt / theta_norm2;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) psi(i, j) *= factor;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) {
            const double v = 0.5 * (psi(i, j) + psi(j, i));
            psi(i, j) = v;
            psi(j, i) = v;
        }

    AsymptoticSummary s;
    s.method = Method::Pca;
    s.constant = kNaN;
    SymmetricMatrix sym(std::move(psi));
    s.trace = sym.trace();
    s.psi = std::move(sym);
    const double lda_trace = psi_lda_matrix(model, d).trace();
    s.efficiency_vs_lda = lda_trace / s.trace;
    return s;
}

namespace {

template <typename F>
double golden_section_min(F f, double lo, double hi, int iters = 200) {
    const double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters && (b - a) > 1e-12; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

OptimalWeight optimal_weight(double alpha1, double tau) {
    if (!(alpha1 > 0.0 && alpha1 < 1.0))
        throw ValidationError("optimal_weight: alpha1 must lie in (0,1)");
    check_tau(tau);
    const double beta = alpha1 * (1.0 - alpha1);
    const auto objective = [&](double w1) { return c_eta(beta, tau, w1); };

    const double lo = 1e-6, hi = 1.0 - 1e-6;
    const int num_scan = 2001;
    int best_i = 0;
    double best_v = kInf, worst_v = -kInf;
    Vector values(num_scan);
    for (int i = 0; i < num_scan; ++i) {
        const double w = lo + (hi - lo) * i / (num_scan - 1);
        values[i] = objective(w);
        if (values[i] < best_v) {
            best_v = values[i];
            best_i = i;
        }
        worst_v = std::max(worst_v, values[i]);
    }
    if (worst_v - best_v < 1e-9 * best_v) {
        // The objective is flat in w1: degenerate mixing proportion.
        return {lo + (hi - lo) * best_i / (num_scan - 1), false};
    }
    const double step = (hi - lo) / (num_scan - 1);
    const double a = std::max(lo, lo + (best_i - 1) * step);
    const double b = std::min(hi, lo + (best_i + 1) * step);
    return {golden_section_min(objective, a, b), true};
}

double average_efficiency(double w1, double tau) {
    if (!(w1 > 0.0 && w1 < 1.0))
        throw ValidationError("average_efficiency: w1 must lie strictly in (0,1)");
    check_tau(tau);
    // Composite Simpson over alpha1 in [0.01, 0.99] with 2001 nodes. The
    // integrand 1/c_eta is continuous on the interior for w1 in (0,1); the
    // pure-index infinities only appear at the w1 endpoints.
    const int nodes = 2001;
    const double a = 0.01, b = 0.99;
    const double h = (b - a) / (nodes - 1);
    auto integrand = [&](double alpha) {
        const double c = c_eta(alpha * (1.0 - alpha), tau, w1);
        return std::isinf(c) ? 0.0 : 1.0 / c;
    };
    double sum = integrand(a) + integrand(b);
    for (int i = 1; i < nodes - 1; ++i)
        sum += (i % 2 == 1 ? 4.0 : 2.0) * integrand(a + i * h);
    return sum * h / 3.0;
}

double best_average_weight(double tau) {
    check_tau(tau);
    const auto neg_area = [&](double w1) { return -average_efficiency(w1, tau); };
    const double lo = 1e-3, hi = 1.0 - 1e-3;
    const int num_scan = 201;
    int best_i = 0;
    double best_v = kInf;
    for (int i = 0; i < num_scan; ++i) {
        const double w = lo + (hi - lo) * i / (num_scan - 1);
        const double v = neg_area(w);
        if (v < best_v) {
            best_v = v;
            best_i = i;
        }
    }
    const double step = (hi - lo) / (num_scan - 1);
    const double a = std::max(lo, lo + (best_i - 1) * step);
    const double b = std::min(hi, lo + (best_i + 1) * step);
    return golden_section_min(neg_area, a, b, 120);
}

double equal_efficiency_alpha(double tau) {
    check_tau(tau);
    const auto gap = [&](double alpha) {
        const double beta = alpha * (1.0 - alpha);
        const double ck = c_kappa(beta, tau);
        const double cg = c_gamma(beta, tau);
        const double eff_k = std::isinf(ck) ? 0.0 : 1.0 / ck;
        const double eff_g = std::isinf(cg) ? 0.0 : 1.0 / cg;
        return eff_k - eff_g;
    };
    double lo = DegeneratePoints::delta1() + 1e-9; // kurtosis dead: gap < 0
    double hi = 0.5 - 1e-9;                        // skewness dead: gap > 0
    if (!(gap(lo) < 0.0 && gap(hi) > 0.0))
        throw EstimationError("equal_efficiency_alpha: no sign change in bracket");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace pplda
