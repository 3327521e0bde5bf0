#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hrmc/types.hpp"

namespace hrmc {

/// Problem-level inputs the theory cannot estimate from data; see the
/// parameter report for the quantities derived from them.
struct ParamInputs {
    Index n = 0;       // ambient dimension (rows)
    Index N = 0;       // number of columns
    Index k = 0;       // number of subspaces
    Index r = 0;       // maximum subspace dimension
    double mu0 = 1.0;  // subspace coherence bound
    double mu1 = 1.0;  // column / column-difference coherence bound
    double nu0 = 0.5;  // subspace representation constant
    double eps0 = 0.25;  // separation radius
    double beta = 1.5;   // confidence exponent, > 1
    double p0 = 0.5;     // per-entry observation probability
};

/// All derived pipeline quantities plus the practical-mode overrides.
/// All logarithms are natural logs.
struct PipelineParams {
    ParamInputs in;

    double delta0 = 0.0;  // n^{2-2 sqrt(beta)} * log n
    Index s0 = 0;         // required number of seed columns
    Index ell0 = 0;       // oversampling factor for neighborhood pools
    Index t0 = 0;         // required overlap with a seed's support
    double eta0 = 0.0;    // required observations per seed column

    double p0_min = 0.0;           // sampling threshold from the main bound
    double n_min_main = 0.0;       // column-count bound, exponent mu0^2 log(1/p0)
    double n_min_refined = 0.0;    // same base, exponent 2 mu0^2 log(1/p0)
    double mc_prob_bound = 0.0;    // lower bound on simultaneous completion prob.

    bool thinning_enabled = true;

    // Practical-mode overrides. The theory constants are not estimable from
    // data, so real runs may pin these directly.
    std::optional<Index> seed_count_override;
    std::optional<Index> ell0_override;
    std::optional<Index> t0_override;
    std::optional<double> eta0_override;
    std::optional<double> eps0_override;  // data-scale neighborhood radius
    std::optional<Index> neighborhood_size_override;  // ball size, default n

    std::vector<std::string> warnings;

    Index effective_s0() const { return seed_count_override.value_or(s0); }
    Index effective_ell0() const { return ell0_override.value_or(ell0); }
    Index effective_t0() const { return t0_override.value_or(t0); }
    double effective_eta0() const { return eta0_override.value_or(eta0); }
    double effective_eps0() const { return eps0_override.value_or(in.eps0); }
    Index effective_neighborhood_size() const {
        return neighborhood_size_override.value_or(in.n);
    }
    /// Squared partial-distance threshold for neighborhood membership
    /// (the squared form of "partial distance less than eps0/sqrt(2)").
    double ball_threshold_sq() const {
        double e = effective_eps0();
        return e * e / 2.0;
    }
};

double derive_delta0(Index n, double beta);
Index derive_s0(Index k, double delta0, double nu0);
Index derive_ell0(Index k, Index n, Index r, double nu0, double eps0, Index s0,
                  double delta0);
Index derive_t0(double mu0, Index s0, Index ell0, Index n, double delta0);
double derive_eta0(double beta, double mu0, double mu1, Index r, Index n, double nu0);
double derive_p0_min(double beta, double mu0, double mu1, Index r, Index n,
                     double nu0);
/// Column-count bound; `doubled_exponent` selects the 2*mu0^2 variant.
double derive_n_min(Index n, double mu0, double p0, Index s0, Index ell0,
                    double delta0, bool doubled_exponent);

/// Validates the inputs and fills every derived quantity, recording
/// warnings (never errors) when the inputs fall below the recovery
/// thresholds.
PipelineParams derive_params(const ParamInputs& in);

}  // namespace hrmc
