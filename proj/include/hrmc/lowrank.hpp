#pragma once

#include <cstdint>

#include "hrmc/observed.hpp"
#include "hrmc/subspace.hpp"
#include "hrmc/types.hpp"

namespace hrmc {

enum class SolverBackend { Als, Grassmann };

struct SolverConfig {
    /// Residual tolerance for declaring an exact fit, relative to the RMS
    /// magnitude of the observed entries.
    double exact_tol = 1e-6;
    Index max_iterations = 500;  // per restart
    Index max_restarts = 5;
    /// Relative residual improvement below which an iteration has converged.
    double convergence_tol = 1e-10;
    SolverBackend backend = SolverBackend::Als;
    std::uint64_t seed = 0;
    /// Try ranks 1..max_rank ascending and accept the first exact fit.
    /// When false, fit max_rank directly (e.g. for full-rank baselines).
    bool ascending_rank_search = true;
};

struct CompletionResult {
    Subspace basis;        // column span of the completed matrix
    Matrix completed;      // dense n x m
    double observed_rmse = 0.0;  // RMS of (completed - observed) over the mask
    double observed_rms = 0.0;   // RMS magnitude of the observations
    bool converged = false;
    Index iterations = 0;  // total iterations across ranks and restarts
};

/// Absolute residual threshold corresponding to cfg.exact_tol.
inline double exact_threshold(const SolverConfig& cfg, double observed_rms) {
    return cfg.exact_tol * (observed_rms > 0.0 ? observed_rms : 1.0);
}

/// Rank-bounded matrix completion by alternating least squares on an
/// explicit factorization (or incremental Grassmannian gradient descent when
/// cfg.backend is Grassmann). Tries ranks 1..max_rank ascending and returns
/// the smallest rank whose observed residual passes the exact-fit test; if
/// none passes, returns the best max_rank attempt with converged = false.
/// Throws UnsamplableLineError when a row or column has no observations.
CompletionResult complete_lowrank(const ObservedMatrix& m, Index max_rank,
                                  const SolverConfig& cfg);

/// The discard test for candidate subspaces: the completion disagrees with
/// the observations, or its rank exceeds the bound.
bool completion_failed(const CompletionResult& res, const SolverConfig& cfg,
                       Index rank_bound);

}  // namespace hrmc
