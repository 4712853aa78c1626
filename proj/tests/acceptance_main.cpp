// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits non-zero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "pplda/asymptotics.hpp"
#include "pplda/estimators.hpp"
#include "pplda/indices.hpp"
#include "pplda/moments.hpp"
#include "pplda/simulate.hpp"
#include "pplda/sphere_opt.hpp"
#include "test_util.hpp"

using namespace pplda;
using namespace pplda::testutil;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

SymmetricMatrix ones_plus_identity() {
    Matrix s(3, 3, 1.0);
    for (int i = 0; i < 3; ++i) s(i, i) = 2.0;
    return SymmetricMatrix(std::move(s));
}

// 1. Balanced-case large-separation limits: eff_kappa = 1, eff_gamma = 0.
Outcome criterion1() {
    const EfficiencyLimits lim = efficiency_limits(0.25);
    Outcome o;
    o.pass = std::abs(lim.eff_kappa - 1.0) <= 1e-12 && std::abs(lim.eff_gamma) <= 1e-12;
    o.detail = "eff_kappa=" + fmt(lim.eff_kappa) + " eff_gamma=" + fmt(lim.eff_gamma);
    return o;
}

// 2. Degenerate flatness of the population indices at delta1 and 1/2.
Outcome criterion2() {
    Rng rng(2026001);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t p = 2 + rep % 4;
        const SymmetricMatrix sigma = random_spd(rng, p);
        const Vector mu2 = random_vector(rng, p, 1.5);
        const Vector u = random_unit(rng, p);
        const double alpha =
            (rep % 2 == 0) ? DegeneratePoints::delta1() : DegeneratePoints::half();
        const MixtureModel m(alpha, Vector(p, 0.0), mu2, sigma);
        const IndexSpec spec =
            (rep % 2 == 0) ? IndexSpec::kurtosis() : IndexSpec::skewness();
        worst = std::max(worst, population_index(m, u, spec));
    }
    Outcome o;
    o.pass = worst < 1e-12;
    o.detail = "max index value " + fmt(worst);
    return o;
}

// 3. Fisher consistency of the population maximizers on random models.
Outcome criterion3() {
    Rng rng(2026003);
    OptimizerOptions opts;
    opts.tol = 1e-13;
    double worst = 1.0;
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t p = 2 + rep % 5; // p <= 6
        const MixtureModel model = random_model(rng, p);
        const DerivedParams d = derive(model);
        for (const IndexSpec& spec :
             {IndexSpec::skewness(), IndexSpec::kurtosis(), IndexSpec::hybrid(0.8)}) {
            SphereObjective obj;
            obj.value = [&](const Vector& u) { return population_index(model, u, spec); };
            obj.value_and_grad = [&](const Vector& u) {
                const auto ev = population_index_with_gradient(model, u, spec);
                return std::make_pair(ev.value, ev.gradient);
            };
            double best = 0.0;
            for (int start = 0; start < 8; ++start) {
                Rng srng(9000 + rep * 31 + start);
                const SphereMaxResult r =
                    maximize_on_sphere(obj, random_unit(srng, p), opts);
                best = std::max(best, std::abs(dot(r.direction, d.theta_unit)));
            }
            worst = std::min(worst, best);
        }
    }
    Outcome o;
    o.pass = worst >= 1.0 - 1e-8;
    o.detail = "min |MSI| " + fmt(worst);
    return o;
}

// 4. Analytic index gradients match central finite differences.
Outcome criterion4() {
    Rng rng(2026004);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 120 + 10 * (rep % 5);
        Dataset d(n, 4);
        for (auto& v : d.rows) v = rng.next_gaussian();
        for (std::size_t i = 0; i < n; i += 3)
            for (std::size_t j = 0; j < 4; ++j) d(i, j) *= d(i, j);
        const CenteredData c = center(d);
        const Vector u = random_unit(rng, 4);
        const IndexSpec spec = (rep % 3 == 0)   ? IndexSpec::skewness()
                               : (rep % 3 == 1) ? IndexSpec::kurtosis()
                                                : IndexSpec::hybrid(0.8);
        const IndexEvaluation ev = evaluate(spec, c, u);
        const double scale = std::max(norm(ev.gradient), 1e-10);
        const double h = 1e-5;
        for (std::size_t j = 0; j < 4; ++j) {
            Vector up = u, um = u;
            up[j] += h;
            um[j] -= h;
            const double fd =
                (index_value(spec, c, up) - index_value(spec, c, um)) / (2.0 * h);
            worst = std::max(worst, std::abs(ev.gradient[j] - fd) / scale);
        }
    }
    Outcome o;
    o.pass = worst < 1e-6;
    o.detail = "max relative gradient error " + fmt(worst);
    return o;
}

// 5. Desk-scale reproduction of the tr(Psi) convergence at n = 8000.
Outcome criterion5() {
    ExperimentConfig cfg;
    cfg.p = 3;
    cfg.tau_grid = {10.0};
    cfg.alpha1_grid = {0.1};
    cfg.n_grid = {8000};
    cfg.sigma.type = SigmaSpec::Type::Explicit;
    cfg.sigma.matrix = ones_plus_identity();
    cfg.mean.type = MeanSpec::Type::Explicit;
    cfg.mean.mu2 = Vector{3.06, 1.6, -1.11};
    EstimatorSpec lda;
    lda.kind = EstimatorSpec::Kind::Lda;
    EstimatorSpec hybrid;
    hybrid.kind = EstimatorSpec::Kind::Pp;
    hybrid.index = IndexSpec::hybrid(0.8);
    cfg.estimators = {lda, hybrid};
    cfg.replicates = 200;
    cfg.seed = 4;

    const auto results = run_grid(cfg, 0);
    Outcome o;
    for (const CellResult& r : results) {
        const double gap = std::abs(r.scaled_loss_mean - r.theory_trace) / r.theory_trace;
        o.pass = o.pass && std::isfinite(r.theory_trace) && gap <= 0.15;
        o.detail += r.method + ": loss=" + fmt(r.scaled_loss_mean) +
                    " trace=" + fmt(r.theory_trace) + " gap=" + fmt(gap) + "  ";
    }
    return o;
}

// 6. Entrywise proportionality of the PP limiting covariances to Psi_U.
Outcome criterion6() {
    Rng rng(2026006);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const MixtureModel model = random_model(rng, 3 + rep % 3);
        const DerivedParams d = derive(model);
        const AsymptoticSummary base = psi_matrix(Method::Lda, model);
        const std::pair<Method, double> methods[] = {
            {Method::PpKurtosis, c_kappa(d.beta, d.tau)},
            {Method::PpSkewness, c_gamma(d.beta, d.tau)},
            {Method::PpHybrid, c_eta(d.beta, d.tau, 0.8)},
        };
        for (const auto& [method, constant] : methods) {
            const AsymptoticSummary s = psi_matrix(method, model, 0.8);
            if (!s.psi || !base.psi) return {false, "missing matrix"};
            for (std::size_t i = 0; i < model.dim(); ++i)
                for (std::size_t j = 0; j < model.dim(); ++j) {
                    const double want = constant * (*base.psi)(i, j);
                    const double err = std::abs((*s.psi)(i, j) - want) /
                                       std::max(1.0, std::abs(want));
                    worst = std::max(worst, err);
                }
        }
    }
    Outcome o;
    o.pass = worst <= 1e-10;
    o.detail = "max entrywise deviation " + fmt(worst);
    return o;
}

// 7. Optimal-average-weight anchors at tiny and huge separation.
Outcome criterion7() {
    const double w_small = best_average_weight(0.01);
    const double w_large = best_average_weight(1e6);
    Outcome o;
    o.pass = w_small >= 0.78 && w_small <= 0.82 && std::abs(w_large - 0.7242) <= 0.01;
    o.detail = "w(tau=0.01)=" + fmt(w_small) + " w(tau=1e6)=" + fmt(w_large);
    return o;
}

// 8. Optimal-weight discontinuity across delta1 and the epsilon -> 0 collapse.
Outcome criterion8() {
    const double d1 = DegeneratePoints::delta1();
    const double lo = optimal_weight(d1 - 0.01, 5.0).w1_star;
    const double hi = optimal_weight(d1 + 0.01, 5.0).w1_star;
    const double eps_w = optimal_weight(d1 + 0.001, 5.0).w1_star;
    Outcome o;
    o.pass = std::abs(lo - hi) > 0.5 && eps_w < 0.1;
    o.detail = "w1*(d1-0.01)=" + fmt(lo) + " w1*(d1+0.01)=" + fmt(hi) +
               " w1*(d1+0.001)=" + fmt(eps_w);
    return o;
}

// 9. PCA criteria: spherical trace ratio, failing model, rank-1 inversion.
Outcome criterion9() {
    Outcome o;
    Rng rng(2026009);

    double worst_ratio = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
        const std::size_t p = 2 + rep % 3;
        const double var = 0.5 + 2.0 * rng.next_double();
        const MixtureModel m(0.2 + 0.3 * rng.next_double(), Vector(p, 0.0),
                             random_vector(rng, p, 2.0),
                             SymmetricMatrix::diagonal(Vector(p, var)));
        const DerivedParams d = derive(m);
        const double ratio = psi_matrix(Method::Lda, m).trace / psi_pca(m).trace;
        worst_ratio = std::max(worst_ratio,
                               std::abs(ratio - d.tau * d.beta) / (d.tau * d.beta));
    }
    o.pass = o.pass && worst_ratio <= 1e-10;

    Matrix s(2, 2);
    s(0, 0) = 10.0;
    s(0, 1) = s(1, 0) = 0.3;
    s(1, 1) = 1.0;
    const MixtureModel fig9(0.3, {0.0, 0.0}, {0.0, 5.0}, SymmetricMatrix(s));
    const bool fig9_fails = !pca_fisher_check(fig9).consistent;
    o.pass = o.pass && fig9_fails;

    double worst_inv = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t p = 2 + rep % 7;
        const Matrix w = random_orthonormal(rng, p);
        Vector lambda(p - 1);
        for (double& l : lambda)
            do {
                l = rng.next_gaussian();
            } while (std::abs(l) < 0.1);
        const SymmetricMatrix c = random_spd(rng, p);
        Matrix a(p, p);
        for (std::size_t j = 1; j < p; ++j) {
            const Vector wj = w.col(j);
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t k = 0; k < p; ++k)
                    a(i, k) += lambda[j - 1] * wj[i] * wj[k];
        }
        const Matrix w1w1c = matmul(outer(w.col(0), w.col(0)), c.matrix());
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t k = 0; k < p; ++k) a(i, k) += w1w1c(i, k);
        worst_inv = std::max(
            worst_inv,
            rel_frobenius_diff(dense_inverse(a), structured_rank1_inverse(lambda, w, c)));
    }
    o.pass = o.pass && worst_inv <= 1e-9;

    o.detail = "spherical ratio dev " + fmt(worst_ratio) + ", fig9 fails check: " +
               (fig9_fails ? "yes" : "no") + ", max inverse dev " + fmt(worst_inv);
    return o;
}

// 10. Closed-form projected moments against brute-force Monte Carlo.
Outcome criterion10() {
    Rng rng(2026010);
    Outcome o;
    double worst_sigmas = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        const MixtureModel model = random_model(rng, 3);
        const Vector u = random_unit(rng, 3);
        const std::size_t n = 1000000;
        const LabeledDataset ld = sample(model, n, 777000 + rep);

        // Brute-force oracle: center and project with plain loops,
        // accumulate powers in long double.
        Vector mean(3, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (int j = 0; j < 3; ++j) mean[j] += ld.data(i, j);
        for (auto& v : mean) v /= static_cast<double>(n);
        std::vector<long double> pow_sum(13, 0.0L);
        for (std::size_t i = 0; i < n; ++i) {
            long double t = 0.0L;
            for (int j = 0; j < 3; ++j) t += u[j] * (ld.data(i, j) - mean[j]);
            long double pw = 1.0L;
            for (int k = 1; k <= 12; ++k) {
                pw *= t;
                pow_sum[k] += pw;
            }
        }
        for (int k = 2; k <= 6; ++k) {
            const double mc = static_cast<double>(pow_sum[k] / n);
            const double m2k = static_cast<double>(pow_sum[2 * k] / n);
            const double se = std::sqrt(std::max(m2k - mc * mc, 0.0) / n);
            const double analytic = population_projected_moment(model, u, k);
            const double sigmas = std::abs(mc - analytic) / (se > 0.0 ? se : 1e-300);
            worst_sigmas = std::max(worst_sigmas, sigmas);
        }
    }
    o.pass = worst_sigmas <= 3.0;
    o.detail = "max |MC - analytic| = " + fmt(worst_sigmas) + " standard errors";
    return o;
}

// 11. The fixed-separation reference mean reproduces tau = 5.
Outcome criterion11() {
    const MixtureModel m(0.1, Vector(3, 0.0), {0.81, -2.24, -0.36},
                         ones_plus_identity());
    const double tau = derive(m).tau;
    Outcome o;
    o.pass = std::abs(tau - 5.00) <= 0.01;
    o.detail = "tau = " + fmt(tau);
    return o;
}

// 12. Byte-identical simulate output regardless of worker count.
Outcome criterion12() {
    ExperimentConfig cfg;
    cfg.p = 5;
    cfg.tau_grid = {5.0, 10.0};
    cfg.alpha1_grid = {0.2};
    cfg.n_grid = {500, 1000};
    cfg.sigma.type = SigmaSpec::Type::Ar1;
    cfg.sigma.rho = 0.6;
    cfg.mean.type = MeanSpec::Type::RandomAtDistance;
    EstimatorSpec lda, pp, pca;
    lda.kind = EstimatorSpec::Kind::Lda;
    pp.kind = EstimatorSpec::Kind::Pp;
    pp.index = IndexSpec::hybrid(0.8);
    pp.opts.restarts = 4;
    pca.kind = EstimatorSpec::Kind::Pca;
    cfg.estimators = {lda, pp, pca};
    cfg.replicates = 24;
    cfg.seed = 99;

    const std::string w1 = csv::to_string(aggregate_to_table(run_grid(cfg, 1), "curve"));
    const std::string w2 = csv::to_string(aggregate_to_table(run_grid(cfg, 2), "curve"));
    const std::string w3 = csv::to_string(aggregate_to_table(run_grid(cfg, 3), "curve"));
    Outcome o;
    o.pass = !w1.empty() && w1 == w2 && w2 == w3;
    o.detail = o.pass ? "identical CSV for 1, 2 and 3 workers"
                      : "worker counts disagree";
    return o;
}

} // namespace

int main() {
    struct Criterion {
        const char* title;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"balanced-case efficiency limits", criterion1},
        {"degenerate flatness of the population indices", criterion2},
        {"Fisher consistency of the population maximizers", criterion3},
        {"analytic gradients vs finite differences", criterion4},
        {"scaled-loss convergence to tr(Psi) at n=8000", criterion5},
        {"proportionality of the limiting covariances", criterion6},
        {"optimal average-weight anchors (0.8 and 0.7242)", criterion7},
        {"optimal-weight discontinuity at delta1", criterion8},
        {"PCA trace ratio, failure model, rank-1 inversion", criterion9},
        {"closed-form moments vs Monte Carlo", criterion10},
        {"fixed-Mahalanobis mean gives tau = 5", criterion11},
        {"simulate determinism across worker counts", criterion12},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%2zu/12] %s  %-48s (%.1fs)  %s\n", i + 1,
                    o.pass ? "PASS" : "FAIL", criteria[i].title, secs,
                    o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    std::printf("acceptance: %d/12 criteria passed\n",
                static_cast<int>(criteria.size()) - failures);
    return failures == 0 ? 0 : 1;
}
