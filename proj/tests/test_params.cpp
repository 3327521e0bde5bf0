#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hrmc/params.hpp"
#include "hrmc/rng.hpp"

using namespace hrmc;

TEST_CASE("worked value: s0 = 47 for k=10, delta0=0.1, nu0=1") {
    CHECK(derive_s0(10, 0.1, 1.0) == 47);
}

TEST_CASE("worked value: delta0 for beta=1.5, n=100") {
    double d = derive_delta0(100, 1.5);
    CHECK(d == doctest::Approx(0.581).epsilon(1e-3));
}

TEST_CASE("worked value: t0 = 28 when 2*s0*ell0*n/delta0 = 9.4e5") {
    // s0 * ell0 * n = 47000 with delta0 = 0.1 gives exactly that ratio
    CHECK(derive_t0(1.0, 47, 10, 100, 0.1) == 28);
}

TEST_CASE("seed count override worked value: ceil(3 k ln k) = 70 for k=10") {
    double v = 3.0 * 10.0 * std::log(10.0);
    CHECK(static_cast<Index>(std::ceil(v)) == 70);
    ParamInputs in;
    in.n = 100;
    in.N = 5000;
    in.k = 10;
    in.r = 5;
    PipelineParams p = derive_params(in);
    p.seed_count_override = static_cast<Index>(std::ceil(v));
    CHECK(p.effective_s0() == 70);
}

TEST_CASE("derive_params fills all fields and validates ranges") {
    ParamInputs in;
    in.n = 100;
    in.N = 5000;
    in.k = 10;
    in.r = 5;
    in.beta = 1.5;
    in.nu0 = 1.0;
    in.eps0 = 0.25;
    in.p0 = 0.2;
    PipelineParams p = derive_params(in);
    CHECK(p.delta0 > 0);
    CHECK(p.s0 >= 1);
    CHECK(p.ell0 >= 1);
    CHECK(p.t0 >= 1);
    CHECK(p.eta0 > 0);
    CHECK(p.p0_min > 0);

    SUBCASE("beta out of range") {
        in.beta = 1.0;
        CHECK_THROWS_AS(derive_params(in), Error);
    }
    SUBCASE("eps0 out of range") {
        in.eps0 = 1.5;
        CHECK_THROWS_AS(derive_params(in), Error);
    }
    SUBCASE("nu0 out of range") {
        in.nu0 = 0.0;
        CHECK_THROWS_AS(derive_params(in), Error);
    }
    SUBCASE("p0 out of range") {
        in.p0 = 0.0;
        CHECK_THROWS_AS(derive_params(in), Error);
    }
}

TEST_CASE("p0 below threshold produces a warning, not an error") {
    ParamInputs in;
    in.n = 100;
    in.N = 5000;
    in.k = 10;
    in.r = 5;
    in.p0 = 1e-4;
    PipelineParams p = derive_params(in);
    bool found = false;
    for (const auto& w : p.warnings)
        if (w.find("p0_min") != std::string::npos) found = true;
    CHECK(found);
}

namespace {

// Independent long-double re-evaluation of every formula.
struct Oracle {
    long double delta0, s0_raw, ell0_raw, t0_raw, eta0;
};

Oracle evaluate(long double n, long double k, long double r, long double mu0,
                long double mu1, long double nu0, long double eps0,
                long double beta) {
    Oracle o;
    o.delta0 = powl(n, 2.0L - 2.0L * sqrtl(beta)) * logl(n);
    o.s0_raw = k * (logl(k) + logl(1.0L / o.delta0)) / ((1.0L - expl(-4.0L)) * nu0);
    long double s0 = ceill(o.s0_raw);
    if (s0 < 1.0L) s0 = 1.0L;
    long double cell = nu0 * powl(eps0 / sqrtl(3.0L), r);
    long double a = 2.0L * k / cell;
    long double b = 8.0L * k * logl(s0 / o.delta0) / (n * cell);
    o.ell0_raw = a > b ? a : b;
    long double ell0 = ceill(o.ell0_raw);
    if (ell0 < 1.0L) ell0 = 1.0L;
    o.t0_raw = 2.0L * mu0 * mu0 * logl(2.0L * s0 * ell0 * n / o.delta0);
    long double m = mu1 * mu1 > mu0 ? mu1 * mu1 : mu0;
    o.eta0 = 64.0L * beta * m * r * logl(n) * logl(n) / nu0;
    return o;
}

}  // namespace

TEST_CASE("formulas match an independent high-precision evaluation") {
    std::mt19937_64 rng(123);
    std::uniform_int_distribution<Index> pick_n(10, 2000);
    std::uniform_int_distribution<Index> pick_k(1, 40);
    std::uniform_real_distribution<double> pick_mu(1.0, 5.0);
    std::uniform_real_distribution<double> pick_nu(0.05, 1.0);
    std::uniform_real_distribution<double> pick_eps(0.05, 0.95);
    std::uniform_real_distribution<double> pick_beta(1.01, 3.0);
    std::uniform_real_distribution<double> pick_p0(0.01, 1.0);

    for (int rep = 0; rep < 100; ++rep) {
        ParamInputs in;
        in.n = pick_n(rng);
        in.N = 100000;
        in.k = pick_k(rng);
        in.r = std::max<Index>(1, std::min<Index>(in.n - 1, in.k % 7 + 1));
        in.mu0 = pick_mu(rng);
        in.mu1 = pick_mu(rng);
        in.nu0 = pick_nu(rng);
        in.eps0 = pick_eps(rng);
        in.beta = pick_beta(rng);
        in.p0 = pick_p0(rng);
        PipelineParams p = derive_params(in);
        Oracle o = evaluate(in.n, in.k, in.r, in.mu0, in.mu1, in.nu0, in.eps0,
                            in.beta);

        CHECK(std::abs(p.delta0 - static_cast<double>(o.delta0)) <=
              1e-12 * std::abs(static_cast<double>(o.delta0)));
        CHECK(p.s0 == static_cast<Index>(std::max(1.0L, ceill(o.s0_raw))));
        CHECK(p.ell0 == static_cast<Index>(std::max(1.0L, ceill(o.ell0_raw))));
        CHECK(p.t0 == static_cast<Index>(std::max(1.0L, ceill(o.t0_raw))));
        CHECK(std::abs(p.eta0 - static_cast<double>(o.eta0)) <=
              1e-12 * std::abs(static_cast<double>(o.eta0)));
    }
}

TEST_CASE("both column-count bound variants are reported") {
    ParamInputs in;
    in.n = 100;
    in.N = 5000;
    in.k = 10;
    in.r = 5;
    in.p0 = 0.5;
    PipelineParams p = derive_params(in);
    CHECK(p.n_min_main > 0);
    CHECK(p.n_min_refined >= p.n_min_main);  // doubled exponent, base > 1
}
