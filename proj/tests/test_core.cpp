#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hrmc/core.hpp"
#include "support/helpers.hpp"

using namespace hrmc;
using testutil::axis_subspace;
using testutil::observe;
using testutil::observe_all;
using testutil::observe_at;

TEST_CASE("subspace coherence on canonical examples") {
    // span(e1) in R^4: maximally aligned with an axis
    CHECK(coherence(axis_subspace(4, {0})) == doctest::Approx(4.0));

    // perfectly spread vector attains the lower bound
    Matrix ones = Matrix::Constant(4, 1, 0.5);
    CHECK(coherence(Subspace(ones)) == doctest::Approx(1.0));

    // two spread 2-dim directions: max_j ||P e_j||^2 = 1/2, times n/d = 2
    Matrix two = Matrix::Zero(4, 2);
    two(0, 0) = two(1, 0) = 1.0 / std::sqrt(2.0);
    two(2, 1) = two(3, 1) = 1.0 / std::sqrt(2.0);
    CHECK(coherence(Subspace(two)) == doctest::Approx(1.0));

    CHECK_THROWS_WITH_AS(coherence(Subspace(Matrix(4, 0))),
                         doctest::Contains("empty basis"), Error);
}

TEST_CASE("vector coherence") {
    Vector spike(4);
    spike << 1, 0, 0, 0;
    CHECK(vector_coherence(spike) == doctest::Approx(4.0));

    Vector flat = Vector::Ones(4);
    CHECK(vector_coherence(flat) == doctest::Approx(1.0));

    Vector mixed(4);
    mixed << 3, 4, 0, 0;
    CHECK(vector_coherence(mixed) == doctest::Approx(2.56));

    CHECK_THROWS_WITH_AS(vector_coherence(Vector::Zero(3)),
                         doctest::Contains("zero vector"), Error);
}

TEST_CASE("vector coherence equals the coherence of its span") {
    Rng rng(42);
    for (int rep = 0; rep < 200; ++rep) {
        Vector x = testutil::random_vector(12, rng);
        if (x.norm() < 1e-8) continue;
        Subspace span = Subspace::from_span(x);
        CHECK(vector_coherence(x) == doctest::Approx(coherence(span)).epsilon(1e-9));
    }
}

TEST_CASE("coherence bounds hold for random subspaces") {
    Rng rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        Index d = 1 + static_cast<Index>(rep % 5);
        Subspace s = testutil::random_subspace(16, d, rng);
        double mu = coherence(s);
        CHECK(mu >= 1.0 - 1e-12);
        CHECK(mu <= 16.0 / static_cast<double>(d) + 1e-12);
    }
}

TEST_CASE("partial distance on canonical examples") {
    // full overlap recovers the exact squared distance
    Vector a(4), zero = Vector::Zero(4);
    a << 3, 4, 0, 0;
    PartialDistance pd = partial_distance(observe_all(a), observe_all(zero), 1);
    CHECK(pd.overlap == 4);
    CHECK(pd.sufficient);
    CHECK(pd.estimate == doctest::Approx(25.0));

    // uniform difference vector makes the estimator exact for any support
    pd = partial_distance(observe_all(Vector::Ones(4)),
                          observe(4, {0, 1}, {0.0, 0.0}), 2);
    CHECK(pd.overlap == 2);
    CHECK(pd.estimate == doctest::Approx(4.0));

    // disjoint supports
    pd = partial_distance(observe(4, {0, 1}, {1.0, 1.0}),
                          observe(4, {2, 3}, {1.0, 1.0}), 1);
    CHECK(pd.overlap == 0);
    CHECK_FALSE(pd.sufficient);
}

TEST_CASE("partial distance with full overlap is exact") {
    Rng rng(11);
    for (int rep = 0; rep < 100; ++rep) {
        Vector x = testutil::random_vector(20, rng);
        Vector y = testutil::random_vector(20, rng);
        PartialDistance pd = partial_distance(observe_all(x), observe_all(y), 1);
        CHECK(pd.estimate == doctest::Approx((x - y).squaredNorm()).epsilon(1e-12));
    }
}

TEST_CASE("partial distance concentration (statistical)") {
    // constructed vector with coherence ~2 so the prescribed support size
    // 8 mu1^2 log(2/delta0) fits inside the ambient dimension
    Index n = 200;
    Rng rng(5);
    Vector y(n);
    for (Index i = 0; i < n; ++i) y[i] = (i % 2 == 0) ? 1.0 : -1.0;
    y[0] = std::sqrt(2.0 * static_cast<double>(n - 1) / (static_cast<double>(n) - 2.0));
    double mu1 = vector_coherence(y);
    CHECK(mu1 == doctest::Approx(2.0).epsilon(1e-2));
    double delta0 = 0.05;
    Index q = static_cast<Index>(
        std::ceil(8.0 * mu1 * mu1 * std::log(2.0 / delta0)));
    REQUIRE(q <= n);
    double truth = y.squaredNorm();
    int outside = 0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
        auto rows = sample_without_replacement(n, q, rng);
        std::sort(rows.begin(), rows.end());
        auto x1 = observe_at(y, rows);
        auto x2 = observe_at(Vector::Zero(n), rows);
        double est = partial_distance(x1, x2, q).estimate;
        if (est < 0.5 * truth || est > 1.5 * truth) ++outside;
    }
    double bound = delta0 + 3.0 * std::sqrt(delta0 * (1 - delta0) / trials);
    CHECK(static_cast<double>(outside) / trials <= bound);
}

TEST_CASE("projection residual on canonical examples") {
    // x in S restricted to two rows
    auto x = observe(3, {0, 1}, {1.0, 0.0});
    CHECK(projection_residual(x, axis_subspace(3, {0})) == doctest::Approx(0.0));
    CHECK(projection_residual(x, axis_subspace(3, {1})) == doctest::Approx(1.0));

    // fit reproduces coordinate 0 exactly and coordinate 2 is 0 in both
    auto y = observe(3, {0, 2}, {1.0, 0.0});
    CHECK(projection_residual(y, axis_subspace(3, {0})) == doctest::Approx(0.0));
}

TEST_CASE("projection residual degenerate restriction") {
    // 2-dim subspace restricted to a single row cannot be inverted
    auto x = observe(4, {0}, {1.0});
    CHECK_THROWS_AS(projection_residual(x, axis_subspace(4, {1, 2})),
                    DegenerateRestrictionError);
}

TEST_CASE("projection residual statistics over random draws") {
    Rng rng(13);
    Index n = 50, r = 5;
    Index omega = 30;
    for (int rep = 0; rep < 50; ++rep) {
        Subspace s = testutil::random_subspace(n, r, rng);
        Vector g = testutil::random_vector(r, rng);
        Vector x = s.basis() * g;
        auto rows = sample_without_replacement(n, omega, rng);
        std::sort(rows.begin(), rows.end());
        CHECK(projection_residual(observe_at(x, rows), s) <= 1e-16);

        // an independent vector is not in S
        Vector z = testutil::random_vector(n, rng);
        double res = projection_residual(observe_at(z, rows), s);
        CHECK(res > 1e-6);
    }
}

TEST_CASE("complete column on canonical examples") {
    // one coefficient, one equation
    auto x = observe(3, {0}, {5.0});
    Vector got = complete_column(x, axis_subspace(3, {0}));
    Vector want(3);
    want << 5, 0, 0;
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("complete column from a diagonal line") {
    Matrix diag = Matrix::Constant(3, 1, 1.0 / std::sqrt(3.0));
    Subspace s(diag);
    auto x = observe(3, {0, 1}, {2.0, 2.0});
    Vector got = complete_column(x, s);
    Vector want(3);
    want << 2, 2, 2;
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("complete column is the identity on fully observed in-subspace data") {
    Rng rng(3);
    for (int rep = 0; rep < 30; ++rep) {
        Subspace s = testutil::random_subspace(12, 3, rng);
        Vector x = s.basis() * testutil::random_vector(3, rng);
        Vector got = complete_column(observe_all(x), s);
        CHECK((got - x).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("complete column error paths") {
    auto x = observe(4, {0}, {1.0});
    CHECK_THROWS_AS(complete_column(x, axis_subspace(4, {0, 1})),
                    UnderdeterminedError);
}

TEST_CASE("containment in unions") {
    Subspace e1 = axis_subspace(4, {0});
    Subspace e2 = axis_subspace(4, {1});
    Subspace e3 = axis_subspace(4, {2});
    Subspace plane = axis_subspace(4, {0, 1});

    std::vector<Subspace> others{plane};
    CHECK(contained_in_union(e1, others, default_containment_tol(1)));

    Vector diagv = Vector::Zero(4);
    diagv[0] = diagv[1] = 1.0 / std::sqrt(2.0);
    Subspace diag = Subspace::from_span(diagv);
    std::vector<Subspace> lines{e1, e2};
    CHECK(contained_in_union(diag, lines, default_containment_tol(1)));
    CHECK_FALSE(contained_in_union(e3, lines, default_containment_tol(1)));

    // empty union contains only the trivial subspace
    CHECK_FALSE(contained_in_union(e1, {}, 1e-8));
}

TEST_CASE("containment is reflexive and monotone") {
    Rng rng(19);
    for (int rep = 0; rep < 20; ++rep) {
        Subspace s = testutil::random_subspace(10, 2, rng);
        std::vector<Subspace> self{s};
        double tol = default_containment_tol(s.dim());
        CHECK(contained_in_union(s, self, tol));

        // adding subspaces never flips true -> false
        std::vector<Subspace> more{s, testutil::random_subspace(10, 3, rng)};
        CHECK(contained_in_union(s, more, tol));
    }
}
