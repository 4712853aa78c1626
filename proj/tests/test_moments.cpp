#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pplda/mixture.hpp"
#include "pplda/moments.hpp"
#include "test_util.hpp"

using namespace pplda;
using namespace pplda::testutil;

namespace {

Dataset random_dataset(Rng& rng, std::size_t n, std::size_t p, double scale = 1.0) {
    Dataset d(n, p);
    for (auto& v : d.rows) v = scale * rng.next_gaussian() + 0.3;
    return d;
}

double naive_projected_moment(const CenteredData& c, const Vector& u, int k) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < c.n(); ++i) {
        long double t = 0.0L;
        for (std::size_t j = 0; j < c.p(); ++j) t += u[j] * c.centered(i, j);
        long double pw = 1.0L;
        for (int kk = 0; kk < k; ++kk) pw *= t;
        s += pw;
    }
    return static_cast<double>(s / c.n());
}

} // namespace

TEST_CASE("center: examples and residual means") {
    Dataset d(2, 2);
    d(0, 0) = 0.0;
    d(0, 1) = 0.0;
    d(1, 0) = 2.0;
    d(1, 1) = 2.0;
    const CenteredData c = center(d);
    CHECK(c.mean[0] == doctest::Approx(1.0));
    CHECK(c.mean[1] == doctest::Approx(1.0));
    CHECK(c.centered(0, 0) == doctest::Approx(-1.0));
    CHECK(c.centered(1, 1) == doctest::Approx(1.0));

    Dataset single(1, 3);
    single(0, 0) = 4.0;
    single(0, 1) = -2.0;
    single(0, 2) = 0.5;
    const CenteredData cs = center(single);
    for (int j = 0; j < 3; ++j) CHECK(cs.centered(0, j) == 0.0);

    Rng rng(2);
    const Dataset big = random_dataset(rng, 100000, 4, 50.0);
    const CenteredData cb = center(big);
    for (std::size_t j = 0; j < 4; ++j) {
        double colsum = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < cb.n(); ++i) {
            colsum += cb.centered(i, j);
            scale = std::max(scale, std::abs(big(i, j)));
        }
        CHECK(std::abs(colsum / cb.n()) < 1e-10 * scale);
    }

    // Centering twice is idempotent.
    const CenteredData twice = center(cb.centered);
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(twice.mean[j]) < 1e-12);
}

TEST_CASE("projected_moment: trivial and naive-loop oracle") {
    Rng rng(3);
    const Dataset d = random_dataset(rng, 257, 5);
    const CenteredData c = center(d);
    const Vector u = random_unit(rng, 5);

    CHECK(std::abs(projected_moment(c, u, 1)) < 1e-12);

    // Standardized 1-D data: second moment 1.
    Dataset one(4, 1);
    one(0, 0) = -1.0;
    one(1, 0) = 1.0;
    one(2, 0) = -1.0;
    one(3, 0) = 1.0;
    CHECK(projected_moment(center(one), {1.0}, 2) == doctest::Approx(1.0));

    for (int k = 1; k <= 6; ++k)
        CHECK(projected_moment(c, u, k) ==
              doctest::Approx(naive_projected_moment(c, u, k)).epsilon(1e-11));

    CHECK_THROWS_AS(projected_moment(c, u, 0), ValidationError);
    CHECK_THROWS_AS(projected_moment(c, u, 7), ValidationError);
}

TEST_CASE("projected_moment_vector: k=0, covariance identity, naive oracle") {
    Rng rng(5);
    const Dataset d = random_dataset(rng, 301, 4);
    const CenteredData c = center(d);
    const Vector u = random_unit(rng, 4);

    const Vector zero = projected_moment_vector(c, u, 0);
    for (double v : zero) CHECK(std::abs(v) < 1e-12);

    // k=1 equals C_n u with the 1/n divisor.
    const Vector m1 = projected_moment_vector(c, u, 1);
    const Vector cn_u = matvec(sample_covariance(d, CovDivisor::N), u);
    for (std::size_t j = 0; j < 4; ++j)
        CHECK(m1[j] == doctest::Approx(cn_u[j]).epsilon(1e-10));

    for (int k = 1; k <= 3; ++k) {
        const Vector got = projected_moment_vector(c, u, k);
        for (std::size_t j = 0; j < 4; ++j) {
            long double s = 0.0L;
            for (std::size_t i = 0; i < c.n(); ++i) {
                long double t = 0.0L;
                for (std::size_t jj = 0; jj < 4; ++jj) t += u[jj] * c.centered(i, jj);
                long double pw = 1.0L;
                for (int kk = 0; kk < k; ++kk) pw *= t;
                s += pw * c.centered(i, j);
            }
            CHECK(got[j] == doctest::Approx(static_cast<double>(s / c.n())).epsilon(1e-10));
        }
    }
}

TEST_CASE("sample_covariance: examples, divisors, naive oracle") {
    Dataset two(2, 2);
    two(1, 0) = 2.0;
    const SymmetricMatrix cn = sample_covariance(two, CovDivisor::N);
    CHECK(cn(0, 0) == doctest::Approx(1.0));
    CHECK(cn(1, 1) == doctest::Approx(0.0));
    const SymmetricMatrix cn1 = sample_covariance(two, CovDivisor::NMinusOne);
    CHECK(cn1(0, 0) == doctest::Approx(2.0));

    Dataset same(5, 2);
    for (std::size_t i = 0; i < 5; ++i) {
        same(i, 0) = 3.0;
        same(i, 1) = -1.0;
    }
    const SymmetricMatrix zero = sample_covariance(same, CovDivisor::N);
    CHECK(max_abs(zero.matrix()) < 1e-12);

    Rng rng(7);
    const Dataset d = random_dataset(rng, 123, 3);
    const SymmetricMatrix got = sample_covariance(d, CovDivisor::NMinusOne);
    Vector mean(3, 0.0);
    for (std::size_t i = 0; i < 123; ++i)
        for (int j = 0; j < 3; ++j) mean[j] += d(i, j);
    for (auto& v : mean) v /= 123.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < 123; ++i)
                s += (d(i, a) - mean[a]) * (d(i, b) - mean[b]);
            CHECK(got(a, b) == doctest::Approx(s / 122.0).epsilon(1e-10));
        }

    Dataset tiny(1, 2);
    CHECK_THROWS_AS(sample_covariance(tiny, CovDivisor::N), ValidationError);
}

TEST_CASE("pooled_covariance: hand example, zero case, naive oracle, errors") {
    // Groups {0, 2} and {10, 12} in 1-D: S = (2 + 2) / 2 = 2.
    Dataset d(4, 1);
    d(0, 0) = 0.0;
    d(1, 0) = 2.0;
    d(2, 0) = 10.0;
    d(3, 0) = 12.0;
    const LabeledDataset ld{d, {1, 1, 0, 0}};
    CHECK(pooled_covariance(ld)(0, 0) == doctest::Approx(2.0));

    Dataset eq(4, 2);
    eq(0, 0) = eq(1, 0) = 1.0;
    eq(2, 0) = eq(3, 0) = 5.0;
    const LabeledDataset ldeq{eq, {1, 1, 0, 0}};
    CHECK(max_abs(pooled_covariance(ldeq).matrix()) < 1e-14);

    Rng rng(11);
    Dataset rd = random_dataset(rng, 77, 3);
    std::vector<std::uint8_t> labels(77);
    for (auto& l : labels) l = rng.next_bernoulli(0.4) ? 1 : 0;
    labels[0] = 1;
    labels[1] = 0;
    const LabeledDataset rld{rd, labels};
    const SymmetricMatrix got = pooled_covariance(rld);

    // Two-pass naive computation.
    Vector m0(3, 0.0), m1(3, 0.0);
    std::size_t n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < 77; ++i)
        if (labels[i]) {
            ++n1;
            for (int j = 0; j < 3; ++j) m1[j] += rd(i, j);
        } else {
            ++n0;
            for (int j = 0; j < 3; ++j) m0[j] += rd(i, j);
        }
    for (int j = 0; j < 3; ++j) {
        m0[j] /= n0;
        m1[j] /= n1;
    }
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < 77; ++i) {
                const Vector& m = labels[i] ? m1 : m0;
                s += (rd(i, a) - m[a]) * (rd(i, b) - m[b]);
            }
            CHECK(got(a, b) == doctest::Approx(s / 75.0).epsilon(1e-10));
        }

    const LabeledDataset empty_group{rd, std::vector<std::uint8_t>(77, 1)};
    CHECK_THROWS_AS(pooled_covariance(empty_group), EstimationError);
}

TEST_CASE("invariants: second moment vs covariance, permutation invariance") {
    Rng rng(13);
    const Dataset d = random_dataset(rng, 500, 4);
    const CenteredData c = center(d);
    const Vector u = random_unit(rng, 4);

    const double s2 = projected_moment(c, u, 2);
    const double quad = quadratic_form(sample_covariance(d, CovDivisor::N), u);
    CHECK(s2 == doctest::Approx(quad).epsilon(1e-10));

    Dataset shuffled = d;
    Rng shuffle_rng(99);
    for (std::size_t i = shuffled.n; i-- > 1;) {
        const std::size_t j = shuffle_rng.next_u64() % (i + 1);
        for (std::size_t col = 0; col < shuffled.p; ++col)
            std::swap(shuffled.row(i)[col], shuffled.row(j)[col]);
    }
    const CenteredData cs = center(shuffled);
    for (int k = 2; k <= 6; ++k)
        CHECK(projected_moment(c, u, k) ==
              doctest::Approx(projected_moment(cs, u, k)).epsilon(1e-12));
}

TEST_CASE("pooled covariance is consistent for the model covariance") {
    Rng rng(17);
    const SymmetricMatrix sigma = random_spd(rng, 3);
    const MixtureModel m(0.35, Vector(3, 0.0), {1.5, -0.5, 2.0}, sigma);
    const LabeledDataset ld = sample(m, 100000, 4242);
    const SymmetricMatrix pooled = pooled_covariance(ld);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            CHECK(std::abs(pooled(a, b) - sigma(a, b)) < 0.08);
}
