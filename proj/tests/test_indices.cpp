#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pplda/estimators.hpp"
#include "pplda/indices.hpp"
#include "pplda/mixture.hpp"
#include "test_util.hpp"

using namespace pplda;
using namespace pplda::testutil;

namespace {

Dataset gaussian_dataset(std::uint64_t seed, std::size_t n, std::size_t p) {
    Rng rng(seed);
    Dataset d(n, p);
    for (auto& v : d.rows) v = rng.next_gaussian();
    return d;
}

} // namespace

TEST_CASE("kurtosis_n: gaussian reference, two-point data, scale invariance") {
    const Dataset d = gaussian_dataset(1, 1000000, 1);
    CHECK(kurtosis_n(center(d), {1.0}) == doctest::Approx(3.0).epsilon(0.0067));

    Dataset two(2, 1);
    two(0, 0) = -1.0;
    two(1, 0) = 1.0;
    CHECK(kurtosis_n(center(two), {1.0}) == doctest::Approx(1.0));

    Rng rng(2);
    Dataset small = gaussian_dataset(3, 400, 3);
    Dataset scaled_up = small;
    for (auto& v : scaled_up.rows) v *= 5.0;
    const Vector u = random_unit(rng, 3);
    CHECK(kurtosis_n(center(small), u) ==
          doctest::Approx(kurtosis_n(center(scaled_up), u)).epsilon(1e-12));
}

TEST_CASE("skewness_n: symmetric data, hand value, odd symmetry") {
    Dataset two(2, 1);
    two(0, 0) = -3.0;
    two(1, 0) = 3.0;
    CHECK(std::abs(skewness_n(center(two), {1.0})) < 1e-14);

    // {0, 0, 3}: centered {-1, -1, 2}, s2 = 2, s3 = 2, gamma = 2 / 2^{3/2}.
    Dataset three(3, 1);
    three(2, 0) = 3.0;
    CHECK(skewness_n(center(three), {1.0}) ==
          doctest::Approx(2.0 / std::pow(2.0, 1.5)).epsilon(1e-14));

    Rng rng(5);
    const Dataset d = gaussian_dataset(7, 300, 4);
    const CenteredData c = center(d);
    const Vector u = random_unit(rng, 4);
    const Vector neg = scaled(u, -1.0);
    CHECK(skewness_n(c, neg) == doctest::Approx(-skewness_n(c, u)).epsilon(1e-12));
    CHECK(kurtosis_n(c, neg) == doctest::Approx(kurtosis_n(c, u)).epsilon(1e-12));
}

TEST_CASE("evaluate: analytic gradients match central finite differences") {
    Rng rng(11);
    double max_rel_err = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        Dataset d = gaussian_dataset(100 + rep, 150, 4);
        // Mix in some asymmetry so the indices are not flat at zero.
        for (std::size_t i = 0; i < d.n; i += 3)
            for (std::size_t j = 0; j < d.p; ++j) d(i, j) = d(i, j) * d(i, j);
        const CenteredData c = center(d);
        const Vector u = random_unit(rng, 4);
        const IndexSpec spec = (rep % 3 == 0)   ? IndexSpec::skewness()
                               : (rep % 3 == 1) ? IndexSpec::kurtosis()
                                                : IndexSpec::hybrid(0.3 + 0.4 * (rep % 5) / 4.0);

        const IndexEvaluation ev = evaluate(spec, c, u);
        const double h = 1e-5;
        double grad_scale = norm(ev.gradient);
        for (std::size_t j = 0; j < 4; ++j) {
            Vector up = u, um = u;
            up[j] += h;
            um[j] -= h;
            const double fd = (index_value(spec, c, up) - index_value(spec, c, um)) /
                              (2.0 * h);
            const double err = std::abs(ev.gradient[j] - fd) / std::max(grad_scale, 1e-10);
            max_rel_err = std::max(max_rel_err, err);
        }
    }
    CHECK(max_rel_err < 1e-6);
}

TEST_CASE("evaluate: hybrid endpoints equal the pure indices exactly") {
    const Dataset d = gaussian_dataset(31, 200, 3);
    const CenteredData c = center(d);
    Rng rng(13);
    const Vector u = random_unit(rng, 3);

    const IndexEvaluation skew = evaluate(IndexSpec::skewness(), c, u);
    const IndexEvaluation kurt = evaluate(IndexSpec::kurtosis(), c, u);
    const IndexEvaluation h1 = evaluate(IndexSpec::hybrid(1.0), c, u);
    const IndexEvaluation h0 = evaluate(IndexSpec::hybrid(0.0), c, u);
    CHECK(h1.value == skew.value);
    CHECK(h0.value == kurt.value);
    CHECK(h1.gradient == skew.gradient);
    CHECK(h0.gradient == kurt.gradient);

    // Definition cross-check.
    const IndexEvaluation hy = evaluate(IndexSpec::hybrid(0.8), c, u);
    CHECK(hy.value == doctest::Approx(0.8 * skew.value + 0.2 * kurt.value)
                          .epsilon(1e-14));
}

TEST_CASE("evaluate requires n >= p and a non-degenerate direction") {
    Dataset d(2, 3);
    d(0, 0) = 1.0;
    d(1, 1) = 1.0;
    CHECK_THROWS_AS(evaluate(IndexSpec::hybrid(0.8), center(d), {1.0, 0.0, 0.0}),
                    ValidationError);

    // Data varying only along e1 makes u = e2 degenerate.
    Dataset flat(5, 2);
    for (std::size_t i = 0; i < 5; ++i) flat(i, 0) = static_cast<double>(i);
    CHECK_THROWS_AS(kurtosis_n(center(flat), {0.0, 1.0}), EstimationError);
}

TEST_CASE("estimating_residual: parity under sign flip") {
    const Dataset d = gaussian_dataset(41, 300, 3);
    const CenteredData c = center(d);
    Rng rng(17);
    const Vector u = random_unit(rng, 3);
    const Vector neg = scaled(u, -1.0);

    // gamma residual s2 m2 - s3 m1 is even in u; kappa residual
    // s2 m3 - s4 m1 is odd.
    const Vector g_pos = estimating_residual(IndexSpec::skewness(), c, u);
    const Vector g_neg = estimating_residual(IndexSpec::skewness(), c, neg);
    const Vector k_pos = estimating_residual(IndexSpec::kurtosis(), c, u);
    const Vector k_neg = estimating_residual(IndexSpec::kurtosis(), c, neg);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(g_neg[j] == doctest::Approx(g_pos[j]).epsilon(1e-12));
        CHECK(k_neg[j] == doctest::Approx(-k_pos[j]).epsilon(1e-12));
    }
}

TEST_CASE("index values are invariant under re-centering shifts") {
    Rng rng(19);
    const Dataset d = gaussian_dataset(23, 400, 3);
    Dataset shifted = d;
    for (std::size_t i = 0; i < shifted.n; ++i) {
        shifted(i, 0) += 100.0;
        shifted(i, 1) -= 42.0;
        shifted(i, 2) += 7.0;
    }
    const CenteredData c0 = center(d);
    const CenteredData c1 = center(shifted);
    const Vector u = random_unit(rng, 3);
    for (const IndexSpec& spec :
         {IndexSpec::skewness(), IndexSpec::kurtosis(), IndexSpec::hybrid(0.8)})
        CHECK(index_value(spec, c0, u) ==
              doctest::Approx(index_value(spec, c1, u)).epsilon(1e-9));
}

TEST_CASE("balanced mixture: squared skewness vanishes asymptotically") {
    const MixtureModel m(0.5, {0.0, 0.0}, {3.0, 1.0}, SymmetricMatrix::identity(2));
    const LabeledDataset ld = sample(m, 100000, 3131);
    const CenteredData c = center(ld.data);
    Rng rng(23);
    for (int rep = 0; rep < 5; ++rep) {
        const Vector u = random_unit(rng, 2);
        const double g = skewness_n(c, u);
        CHECK(g * g < 0.01);
    }
}

TEST_CASE("estimating residual: optimizer post-condition and consistency") {
    const SymmetricMatrix sigma = ar1_covariance(4, 0.4);
    const Vector mu2 = random_mean_at_distance(sigma, 8.0, 3);
    const MixtureModel model(0.3, Vector(4, 0.0), mu2, sigma);

    // At a converged maximizer the residual is radial: its projection off
    // the direction vanishes.
    const LabeledDataset ld = sample(model, 20000, 9);
    OptimizerOptions opts;
    opts.restarts = 4;
    const CenteredData c = center(ld.data);
    for (const IndexSpec& spec :
         {IndexSpec::skewness(), IndexSpec::kurtosis(), IndexSpec::hybrid(0.8)}) {
        const EstimateResult res = pp_direction(ld.data, spec, opts, 17);
        const Vector r = estimating_residual(spec, c, res.direction);
        Vector tangential = r;
        axpy(-dot(r, res.direction), res.direction, tangential);
        CHECK(norm(tangential) < 1e-6 * std::max(norm(r), 1.0));
    }

    // At the population direction the residual tends to zero; block
    // standard errors bound the full-sample value.
    const LabeledDataset big = sample(model, 100000, 31);
    const DerivedParams d = derive(model);
    const Vector full = estimating_residual(IndexSpec::skewness(), center(big.data),
                                            d.theta_unit);
    const std::size_t blocks = 20;
    const std::size_t bn = big.data.n / blocks;
    std::vector<Vector> block_vals;
    for (std::size_t b = 0; b < blocks; ++b) {
        Dataset piece(bn, 4);
        for (std::size_t i = 0; i < bn; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                piece(i, j) = big.data(b * bn + i, j);
        block_vals.push_back(
            estimating_residual(IndexSpec::skewness(), center(piece), d.theta_unit));
    }
    for (std::size_t j = 0; j < 4; ++j) {
        double mean = 0.0;
        for (const auto& v : block_vals) mean += v[j];
        mean /= blocks;
        double var = 0.0;
        for (const auto& v : block_vals) var += (v[j] - mean) * (v[j] - mean);
        var /= (blocks - 1);
        const double se_full = std::sqrt(var / blocks); // block-mean SE at full n
        CHECK(std::abs(full[j]) < 5.0 * se_full + 1e-12);
    }
}
