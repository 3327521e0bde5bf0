#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <set>

#include "hrmc/core.hpp"
#include "hrmc/datagen.hpp"

using namespace hrmc;

namespace {

Index numerical_rank(const Matrix& m, double rel_tol = 1e-8) {
    Eigen::BDCSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv[i] > rel_tol * sv[0]) ++rank;
    return rank;
}

}  // namespace

TEST_CASE("single 1-d subspace yields collinear columns") {
    Rng rng(1);
    SyntheticConfig cfg;
    cfg.n = 10;
    cfg.N = 10;
    cfg.k = 1;
    cfg.r = 1;
    GroundTruth truth = gen_union_of_subspaces(cfg, rng);
    CHECK(numerical_rank(truth.full) == 1);
}

TEST_CASE("full-scale synthetic instance has full-matrix rank k*r") {
    Rng rng(2);
    SyntheticConfig cfg;  // defaults: n=100, N=5000, k=10, r=5
    GroundTruth truth = gen_union_of_subspaces(cfg, rng);
    CHECK(numerical_rank(truth.full) == 50);
    CHECK(truth.labels.size() == 5000);
    CHECK(truth.subspaces.size() == 10);
}

TEST_CASE("generated columns lie in their labeled subspace with unit norm") {
    Rng rng(3);
    SyntheticConfig cfg;
    cfg.n = 40;
    cfg.N = 200;
    cfg.k = 4;
    cfg.r = 3;
    GroundTruth truth = gen_union_of_subspaces(cfg, rng);
    for (Index j = 0; j < cfg.N; ++j) {
        Index label = truth.labels[static_cast<std::size_t>(j)];
        REQUIRE(label >= 0);
        REQUIRE(label < cfg.k);
        const Matrix& u = truth.subspaces[static_cast<std::size_t>(label)].basis();
        Vector x = truth.full.col(j);
        CHECK((x - u * (u.transpose() * x)).norm() <= 1e-10);
        CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("gaussian subspaces are incoherent (Monte Carlo)") {
    Rng rng(4);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        SyntheticConfig cfg;
        cfg.n = 100;
        cfg.N = 1;
        cfg.k = 1;
        cfg.r = 5;
        GroundTruth truth = gen_union_of_subspaces(cfg, rng);
        worst = std::max(worst, coherence(truth.subspaces[0]));
    }
    CHECK(worst <= 6.0);  // n/r = 20 would be fully coherent
}

TEST_CASE("subspace separation is enforced") {
    Rng rng(5);
    SyntheticConfig cfg;
    cfg.n = 30;
    cfg.N = 40;
    cfg.k = 4;
    cfg.r = 2;
    cfg.min_principal_angle = 0.3;
    GroundTruth truth = gen_union_of_subspaces(cfg, rng);
    for (std::size_t a = 0; a < truth.subspaces.size(); ++a)
        for (std::size_t b = a + 1; b < truth.subspaces.size(); ++b) {
            Matrix m = truth.subspaces[a].basis().transpose() *
                       truth.subspaces[b].basis();
            Eigen::JacobiSVD<Matrix> svd(m);
            double smallest_angle =
                std::acos(std::clamp(svd.singularValues().maxCoeff(), -1.0, 1.0));
            CHECK(smallest_angle >= 0.3);
        }
}

TEST_CASE("hopcount direct: one subnet with equal offsets has rank 1") {
    Rng rng(6);
    HopcountConfig cfg;
    cfg.n_monitors = 10;
    cfg.n_hosts = 8;
    cfg.k_subnets = 1;
    cfg.offset_min = cfg.offset_max = 3;
    GroundTruth truth = gen_hopcount_matrix(cfg, rng);
    CHECK(numerical_rank(truth.full) == 1);
}

TEST_CASE("hopcount direct at experiment scale: rank-2 subnet blocks") {
    Rng rng(7);
    HopcountConfig cfg;  // defaults: 75 monitors, 2700 hosts, 12 subnets
    GroundTruth truth = gen_hopcount_matrix(cfg, rng);
    CHECK(truth.labels.size() == 2700);

    // integer certificate: within a subnet every column difference is a
    // constant vector (a multiple of the all-ones vector)
    for (Index s = 0; s < cfg.k_subnets; ++s) {
        Index first = -1;
        for (Index j = 0; j < cfg.n_hosts; ++j) {
            if (truth.labels[static_cast<std::size_t>(j)] != s) continue;
            if (first < 0) {
                first = j;
                continue;
            }
            Vector diff = truth.full.col(j) - truth.full.col(first);
            CHECK(diff.maxCoeff() == diff.minCoeff());
        }
    }
    CHECK(numerical_rank(truth.full) <= 24);

    // any subnet with two distinct offsets has rank exactly 2
    bool found_rank2 = false;
    for (Index s = 0; s < cfg.k_subnets && !found_rank2; ++s) {
        std::vector<Index> members;
        for (Index j = 0; j < cfg.n_hosts; ++j)
            if (truth.labels[static_cast<std::size_t>(j)] == s) members.push_back(j);
        Matrix block(cfg.n_monitors, static_cast<Index>(members.size()));
        for (std::size_t c = 0; c < members.size(); ++c)
            block.col(static_cast<Index>(c)) = truth.full.col(members[c]);
        if (numerical_rank(block) == 2) found_rank2 = true;
    }
    CHECK(found_rank2);
}

TEST_CASE("hopcount graph backend produces rank-2 subnet blocks") {
    Rng rng(8);
    HopcountConfig cfg;
    cfg.n_monitors = 20;
    cfg.n_hosts = 120;
    cfg.k_subnets = 4;
    cfg.backend = HopcountConfig::Backend::Graph;
    cfg.graph_routers = 60;
    GroundTruth truth = gen_hopcount_matrix(cfg, rng);
    CHECK(truth.full.minCoeff() >= 1.0);  // hops are positive integers
    for (Index s = 0; s < cfg.k_subnets; ++s) {
        std::vector<Index> members;
        for (Index j = 0; j < cfg.n_hosts; ++j)
            if (truth.labels[static_cast<std::size_t>(j)] == s) members.push_back(j);
        if (members.size() < 2) continue;
        Matrix block(cfg.n_monitors, static_cast<Index>(members.size()));
        for (std::size_t c = 0; c < members.size(); ++c)
            block.col(static_cast<Index>(c)) = truth.full.col(members[c]);
        CHECK(numerical_rank(block) <= 2);
    }
}

TEST_CASE("bernoulli mask: full observation, counts, determinism") {
    Rng rng(9);
    SyntheticConfig cfg;
    cfg.n = 20;
    cfg.N = 50;
    cfg.k = 2;
    cfg.r = 2;
    GroundTruth truth = gen_union_of_subspaces(cfg, rng);

    Rng mask_rng(10);
    ObservedMatrix all = apply_bernoulli_mask(truth, 1.0, mask_rng);
    CHECK(all.nnz() == 20 * 50);

    // binomial 3-sigma band at scale
    HopcountConfig hcfg;
    Rng rng2(11);
    GroundTruth big = gen_hopcount_matrix(hcfg, rng2);
    Rng mask2(12);
    ObservedMatrix masked = apply_bernoulli_mask(big, 0.4, mask2);
    double mean = 0.4 * 75 * 2700;
    double sigma = std::sqrt(75.0 * 2700.0 * 0.4 * 0.6);
    CHECK(std::abs(static_cast<double>(masked.nnz()) - mean) <= 3.0 * sigma);

    // identical mask across runs with a fixed seed
    Rng mask3(12);
    ObservedMatrix masked2 = apply_bernoulli_mask(big, 0.4, mask3);
    REQUIRE(masked.nnz() == masked2.nnz());
    bool identical = true;
    masked.for_each_entry([&](Index i, Index j, double v) {
        auto other = masked2.value_at(i, j);
        if (!other || *other != v) identical = false;
    });
    CHECK(identical);
}

TEST_CASE("generators are pure functions of the seed") {
    SyntheticConfig cfg;
    cfg.n = 15;
    cfg.N = 30;
    cfg.k = 3;
    cfg.r = 2;
    Rng a(77), b(77);
    GroundTruth ta = gen_union_of_subspaces(cfg, a);
    GroundTruth tb = gen_union_of_subspaces(cfg, b);
    CHECK(ta.full == tb.full);
    CHECK(ta.labels == tb.labels);
}

TEST_CASE("generator input validation") {
    Rng rng(13);
    SyntheticConfig bad;
    bad.r = 10;
    bad.n = 5;
    CHECK_THROWS_AS(gen_union_of_subspaces(bad, rng), Error);
    CHECK_THROWS_AS(apply_bernoulli_mask(Matrix::Zero(2, 2), 0.0, rng), Error);
}
