#include "hrmc/params.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace hrmc {

namespace {

Index ceil_to_count(double v, const char* what) {
    if (!std::isfinite(v))
        throw Error(std::string(what) + ": formula evaluated to a non-finite value");
    double c = std::ceil(v);
    if (c < 1.0) c = 1.0;  // counts are at least 1
    if (c > 9.0e15) throw Error(std::string(what) + ": formula overflows a count");
    return static_cast<Index>(c);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

double derive_delta0(Index n, double beta) {
    double nd = static_cast<double>(n);
    return std::pow(nd, 2.0 - 2.0 * std::sqrt(beta)) * std::log(nd);
}

Index derive_s0(Index k, double delta0, double nu0) {
    double kd = static_cast<double>(k);
    double v = kd * (std::log(kd) + std::log(1.0 / delta0)) /
               ((1.0 - std::exp(-4.0)) * nu0);
    return ceil_to_count(v, "s0");
}

Index derive_ell0(Index k, Index n, Index r, double nu0, double eps0, Index s0,
                  double delta0) {
    double kd = static_cast<double>(k);
    double cell = nu0 * std::pow(eps0 / std::sqrt(3.0), static_cast<double>(r));
    double a = 2.0 * kd / cell;
    double b = 8.0 * kd * std::log(static_cast<double>(s0) / delta0) /
               (static_cast<double>(n) * cell);
    return ceil_to_count(std::max(a, b), "ell0");
}

Index derive_t0(double mu0, Index s0, Index ell0, Index n, double delta0) {
    double arg = 2.0 * static_cast<double>(s0) * static_cast<double>(ell0) *
                 static_cast<double>(n) / delta0;
    return ceil_to_count(2.0 * mu0 * mu0 * std::log(arg), "t0");
}

double derive_eta0(double beta, double mu0, double mu1, Index r, Index n,
                   double nu0) {
    double logn = std::log(static_cast<double>(n));
    return 64.0 * beta * std::max(mu1 * mu1, mu0) * static_cast<double>(r) * logn *
           logn / nu0;
}

double derive_p0_min(double beta, double mu0, double mu1, Index r, Index n,
                     double nu0) {
    return derive_eta0(beta, mu0, mu1, r, n, nu0) * 2.0 / static_cast<double>(n);
}

double derive_n_min(Index n, double mu0, double p0, Index s0, Index ell0,
                    double delta0, bool doubled_exponent) {
    double base = 2.0 * static_cast<double>(s0) * static_cast<double>(ell0) *
                  static_cast<double>(n) / delta0;
    double exponent = mu0 * mu0 * std::log(1.0 / p0) * (doubled_exponent ? 2.0 : 1.0);
    double log_nmin = std::log(static_cast<double>(ell0) * static_cast<double>(n)) +
                      exponent * std::log(base);
    if (log_nmin > 700.0) return std::numeric_limits<double>::infinity();
    return std::exp(log_nmin);
}

PipelineParams derive_params(const ParamInputs& in) {
    if (in.n < 2) throw Error("derive_params: n must be at least 2");
    if (in.N < 1) throw Error("derive_params: N must be positive");
    if (in.k < 1) throw Error("derive_params: k must be positive");
    if (in.r < 1 || in.r >= in.n)
        throw Error("derive_params: r must satisfy 1 <= r < n");
    if (!(in.beta > 1.0)) throw Error("derive_params: beta must be > 1");
    if (!(in.eps0 > 0.0 && in.eps0 < 1.0))
        throw Error("derive_params: eps0 must lie in (0, 1)");
    if (!(in.nu0 > 0.0 && in.nu0 <= 1.0))
        throw Error("derive_params: nu0 must lie in (0, 1]");
    if (!(in.p0 > 0.0 && in.p0 <= 1.0))
        throw Error("derive_params: p0 must lie in (0, 1]");
    if (!(in.mu0 >= 1.0))
        throw Error("derive_params: mu0 must be at least 1");
    if (!(in.mu1 >= 1.0))
        throw Error("derive_params: mu1 must be at least 1");

    PipelineParams p;
    p.in = in;
    p.delta0 = derive_delta0(in.n, in.beta);
    if (p.delta0 >= 1.0)
        p.warnings.push_back("delta0 = " + fmt(p.delta0) +
                             " is not below 1; increase beta for a meaningful "
                             "confidence level");
    p.s0 = derive_s0(in.k, p.delta0, in.nu0);
    p.ell0 = derive_ell0(in.k, in.n, in.r, in.nu0, in.eps0, p.s0, p.delta0);
    p.t0 = derive_t0(in.mu0, p.s0, p.ell0, in.n, p.delta0);
    p.eta0 = derive_eta0(in.beta, in.mu0, in.mu1, in.r, in.n, in.nu0);
    p.p0_min = derive_p0_min(in.beta, in.mu0, in.mu1, in.r, in.n, in.nu0);
    p.n_min_main = derive_n_min(in.n, in.mu0, in.p0, p.s0, p.ell0, p.delta0, false);
    p.n_min_refined = derive_n_min(in.n, in.mu0, in.p0, p.s0, p.ell0, p.delta0, true);

    double logn = std::log(static_cast<double>(in.n));
    p.mc_prob_bound =
        std::max(0.0, 1.0 - 12.0 * static_cast<double>(p.s0) *
                          std::pow(static_cast<double>(in.n),
                                   2.0 - 2.0 * std::sqrt(in.beta)) *
                          logn);

    if (in.p0 < p.p0_min)
        p.warnings.push_back("p0 = " + fmt(in.p0) + " is below the recovery threshold p0_min = " +
                             fmt(p.p0_min) + "; per-column recovery is not guaranteed");
    if (static_cast<double>(in.N) < p.n_min_main)
        p.warnings.push_back("N = " + std::to_string(in.N) +
                             " is below the column-count bound N_min = " +
                             fmt(p.n_min_main) +
                             "; neighborhoods may be too sparse");
    if (p.eta0 <= static_cast<double>(p.t0))
        p.warnings.push_back("eta0 = " + fmt(p.eta0) + " does not exceed t0 = " +
                             std::to_string(p.t0) +
                             "; neighborhood formation requires eta0 > t0");
    if (p.eta0 > static_cast<double>(in.n))
        p.warnings.push_back("eta0 = " + fmt(p.eta0) +
                             " exceeds the ambient dimension; no seed can qualify "
                             "without a practical eta0 override");
    return p;
}

}  // namespace hrmc
