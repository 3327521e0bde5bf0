#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hrmc/core.hpp"
#include "hrmc/lowrank.hpp"
#include "hrmc/params.hpp"
#include "hrmc/rng.hpp"

namespace hrmc {

/// A seed column's local neighborhood: the member columns selected by the
/// overlap and partial-distance filters, and their observations as a
/// submatrix over all ambient rows. The seed itself is never a member.
struct Neighborhood {
    Index seed_col = -1;
    std::vector<Index> member_cols;
    ObservedMatrix submatrix;  // n x |member_cols|
    std::vector<Index> seed_support;
};

struct CandidateProvenance {
    Index seed_col = -1;
    Index rank = 0;
    bool had_empty_rows = false;
    bool had_empty_cols = false;
};

/// Subspaces recovered from successfully completed neighborhoods. Failed
/// completions are excluded on construction.
struct CandidateSet {
    std::vector<Subspace> subspaces;
    std::vector<CandidateProvenance> provenance;
};

enum class ColumnStatus { Completed, Ambiguous, InsufficientSamples, Degenerate };

std::string to_string(ColumnStatus s);

struct CompletionReport {
    Index column = -1;
    std::optional<Index> assigned_subspace;
    std::vector<double> residuals;  // one per refined subspace; +inf = degenerate
    std::optional<Vector> completed;
    ColumnStatus status = ColumnStatus::Ambiguous;
    Index n_observed = 0;
};

struct StageTimings {
    double select_ms = 0.0;
    double neighborhoods_ms = 0.0;
    double completion_ms = 0.0;
    double refine_ms = 0.0;
    double assign_ms = 0.0;
};

struct RunDiagnostics {
    Index seeds_requested = 0;
    Index seeds_selected = 0;
    std::map<std::string, Index> seeds_discarded;  // reason -> count
    Index candidates_found = 0;
    Index candidates_pruned = 0;
    std::vector<Index> subspace_dims;
    std::map<std::string, Index> status_counts;
    StageTimings timings;
};

struct PipelineConfig {
    SolverConfig solver;
    /// Residual acceptance threshold, relative to ||x_Omega||^2.
    double assign_tol = 1e-8;
    /// Containment tolerance for subspace refinement; <= 0 selects the
    /// per-candidate default of 1e-8 * sqrt(dim).
    double containment_tol = 1e-6;
    Index threads = 0;  // 0 = hardware concurrency
};

/// Draws seed columns uniformly at random without replacement, keeping
/// columns with at least eta0 observations, until s0 seeds are found.
/// Throws InsufficientSeedsError when the matrix is exhausted first.
std::vector<Index> select_seeds(const ObservedMatrix& m, const PipelineParams& params,
                                Rng& rng);

/// Local neighborhood procedure for one seed: filter columns by support
/// overlap >= t0, sample ell0*n of them, keep those with partial distance
/// estimate below eps0^2/2, and sample the neighborhood from those.
/// Returns nullopt (with a reason) when the seed must be discarded.
std::optional<Neighborhood> form_neighborhood(const ObservedMatrix& m, Index seed,
                                              const PipelineParams& params, Rng& rng,
                                              std::string* discard_reason = nullptr);

/// Thins one column's on-support observations so the post-selection sample
/// count is Binomial(t, p0) distributed: with probability rho all t' samples
/// are kept, otherwise a random subset of size Z < q survives. Returns the
/// positions (into `on_support`) that survive.
std::vector<Index> thin_on_support(Index t, Index q, double p0,
                                   std::span<const Index> on_support, Rng& rng);

/// Applies the thinning correction to every member column of a neighborhood;
/// observations off the seed support are untouched.
Neighborhood thin_neighborhood(const Neighborhood& nb,
                               std::span<const Index> seed_support, double p0,
                               Index t0, Rng& rng);

/// Completes every neighborhood at rank bound r and keeps the column spans
/// of the completions that pass the exact-fit test. Rows or columns of a
/// neighborhood submatrix with no observations are excluded from the solve,
/// re-embedded as zero rows, and flagged in the provenance.
CandidateSet complete_neighborhoods(const std::vector<Neighborhood>& nbs,
                                    const PipelineParams& params,
                                    const PipelineConfig& cfg);

/// Rank-ascending sequential pruning: accept a candidate iff it is not
/// contained in the span of the union of already accepted candidates.
std::vector<Subspace> refine_subspaces(const CandidateSet& cands, double tol);

struct AssignResult {
    std::optional<Index> index;
    std::vector<double> residuals;
    ColumnStatus status = ColumnStatus::Ambiguous;
};

/// Computes the projection residual of x against every subspace and assigns
/// the unique subspace whose residual passes the relative tolerance; zero or
/// multiple passes report ambiguity instead of guessing.
AssignResult assign_column(const ObservedVector& x, std::span<const Subspace> subspaces,
                           const PipelineConfig& cfg);

struct PipelineResult {
    std::vector<CompletionReport> reports;
    std::vector<Subspace> subspaces;
    RunDiagnostics diagnostics;
};

/// The full pipeline: seed selection, neighborhood formation, thinning,
/// local completion, refinement, and per-column assignment/completion.
/// Per-column failures become report statuses; the run itself fails only
/// when no candidate subspace survives.
PipelineResult complete_matrix(const ObservedMatrix& m, const PipelineParams& params,
                               const PipelineConfig& cfg, std::uint64_t master_seed);

}  // namespace hrmc
