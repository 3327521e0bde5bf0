#pragma once

// Test-side statistics helpers: binomial pmf and a chi-square goodness-of-fit
// test built on the regularized incomplete gamma function. Kept independent
// of the library under test.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace teststat {

inline double gamma_p_series(double a, double x) {
    double sum = 1.0 / a, term = sum;
    for (int n = 1; n < 500; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
    // Lentz's algorithm for the continued fraction of Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

/// Survival function of the chi-square distribution.
inline double chi2_sf(double stat, double df) {
    return gamma_q(df / 2.0, stat / 2.0);
}

inline double binomial_pmf(long t, long j, double p) {
    if (j < 0 || j > t) return 0.0;
    if (p <= 0.0) return j == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return j == t ? 1.0 : 0.0;
    double lchoose = std::lgamma(static_cast<double>(t) + 1.0) -
                     std::lgamma(static_cast<double>(j) + 1.0) -
                     std::lgamma(static_cast<double>(t - j) + 1.0);
    return std::exp(lchoose + static_cast<double>(j) * std::log(p) +
                    static_cast<double>(t - j) * std::log1p(-p));
}

struct GofResult {
    double stat = 0.0;
    double df = 0.0;
    double p_value = 1.0;
};

/// Pearson chi-square goodness-of-fit with adjacent-bin pooling so every
/// pooled bin has expected count >= 5.
inline GofResult chi_square_gof(const std::vector<long>& observed,
                                const std::vector<double>& expected) {
    if (observed.size() != expected.size())
        throw std::invalid_argument("chi_square_gof: size mismatch");
    std::vector<double> obs_pooled, exp_pooled;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o_acc += static_cast<double>(observed[i]);
        e_acc += expected[i];
        if (e_acc >= 5.0) {
            obs_pooled.push_back(o_acc);
            exp_pooled.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (exp_pooled.empty()) {
            obs_pooled.push_back(o_acc);
            exp_pooled.push_back(e_acc);
        } else {
            obs_pooled.back() += o_acc;
            exp_pooled.back() += e_acc;
        }
    }
    GofResult res;
    if (exp_pooled.size() < 2) return res;  // nothing to test
    for (std::size_t i = 0; i < exp_pooled.size(); ++i) {
        double d = obs_pooled[i] - exp_pooled[i];
        res.stat += d * d / exp_pooled[i];
    }
    res.df = static_cast<double>(exp_pooled.size() - 1);
    res.p_value = chi2_sf(res.stat, res.df);
    return res;
}

}  // namespace teststat
