#include "hrmc/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "hrmc/parallel.hpp"

namespace hrmc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<double> binomial_pmf(Index t, double p) {
    std::vector<double> pmf(static_cast<std::size_t>(t) + 1, 0.0);
    if (p >= 1.0) {
        pmf.back() = 1.0;
        return pmf;
    }
    if (p <= 0.0) {
        pmf.front() = 1.0;
        return pmf;
    }
    double lp = std::log(p), lq = std::log1p(-p);
    for (Index j = 0; j <= t; ++j) {
        double lchoose = std::lgamma(static_cast<double>(t) + 1.0) -
                         std::lgamma(static_cast<double>(j) + 1.0) -
                         std::lgamma(static_cast<double>(t - j) + 1.0);
        pmf[static_cast<std::size_t>(j)] =
            std::exp(lchoose + static_cast<double>(j) * lp +
                     static_cast<double>(t - j) * lq);
    }
    return pmf;
}

}  // namespace

std::string to_string(ColumnStatus s) {
    switch (s) {
        case ColumnStatus::Completed: return "completed";
        case ColumnStatus::Ambiguous: return "ambiguous";
        case ColumnStatus::InsufficientSamples: return "insufficient-samples";
        case ColumnStatus::Degenerate: return "degenerate";
    }
    return "unknown";
}

std::vector<Index> select_seeds(const ObservedMatrix& m, const PipelineParams& params,
                                Rng& rng) {
    Index want = params.effective_s0();
    double eta0 = params.effective_eta0();
    std::vector<Index> order = sample_without_replacement(m.n_cols(), m.n_cols(), rng);
    std::vector<Index> seeds;
    seeds.reserve(static_cast<std::size_t>(want));
    for (Index col : order) {
        if (static_cast<double>(m.column_count(col)) >= eta0) {
            seeds.push_back(col);
            if (static_cast<Index>(seeds.size()) == want) return seeds;
        }
    }
    throw InsufficientSeedsError(want, static_cast<Index>(seeds.size()));
}

std::optional<Neighborhood> form_neighborhood(const ObservedMatrix& m, Index seed,
                                              const PipelineParams& params, Rng& rng,
                                              std::string* discard_reason) {
    auto discard = [&](const char* why) -> std::optional<Neighborhood> {
        if (discard_reason) *discard_reason = why;
        return std::nullopt;
    };
    if (seed < 0 || seed >= m.n_cols()) throw Error("form_neighborhood: bad seed index");

    std::vector<Index> support = m.column_support(seed);
    if (static_cast<double>(support.size()) < params.effective_eta0())
        return discard("seed below eta0");

    std::vector<char> on_support(static_cast<std::size_t>(m.n_rows()), 0);
    for (Index row : support) on_support[static_cast<std::size_t>(row)] = 1;

    // step 2: columns with at least t0 observations on the seed's support
    Index t0 = params.effective_t0();
    std::vector<Index> pool;
    for (Index col = 0; col < m.n_cols(); ++col) {
        if (col == seed) continue;  // the seed must not complete itself
        Index overlap = 0;
        for (const auto& [row, value] : m.column_entries(col))
            overlap += on_support[static_cast<std::size_t>(row)];
        if (overlap >= t0) pool.push_back(col);
    }

    // step 3: sample ell0 * n of the qualifying columns
    Index pool_target = params.effective_ell0() * params.in.n;
    if (static_cast<Index>(pool.size()) < pool_target)
        return discard("insufficient overlap pool");
    std::vector<Index> picks =
        sample_without_replacement(static_cast<Index>(pool.size()), pool_target, rng);

    // step 4: partial-distance ball around the seed
    ObservedVector seed_vec = m.column(seed);
    double threshold = params.ball_threshold_sq();
    std::vector<Index> ball;
    for (Index p : picks) {
        Index col = pool[static_cast<std::size_t>(p)];
        PartialDistance pd = partial_distance(seed_vec, m.column(col), t0);
        if (pd.sufficient && pd.estimate < threshold) ball.push_back(col);
    }
    Index ball_size = params.effective_neighborhood_size();
    if (static_cast<Index>(ball.size()) < ball_size) return discard("sparse ball");
    std::vector<Index> chosen =
        sample_without_replacement(static_cast<Index>(ball.size()), ball_size, rng);

    Neighborhood nb;
    nb.seed_col = seed;
    nb.seed_support = std::move(support);
    nb.member_cols.reserve(static_cast<std::size_t>(ball_size));
    for (Index c : chosen) nb.member_cols.push_back(ball[static_cast<std::size_t>(c)]);
    std::sort(nb.member_cols.begin(), nb.member_cols.end());

    nb.submatrix = ObservedMatrix(m.n_rows(), ball_size);
    for (Index j = 0; j < ball_size; ++j)
        for (const auto& [row, value] :
             m.column_entries(nb.member_cols[static_cast<std::size_t>(j)]))
            nb.submatrix.insert(row, j, value);
    return nb;
}

std::vector<Index> thin_on_support(Index t, Index q, double p0,
                                   std::span<const Index> on_support, Rng& rng) {
    if (static_cast<Index>(on_support.size()) < q)
        throw Error("thin_on_support: column has fewer than q on-support samples");
    std::vector<Index> all(on_support.begin(), on_support.end());
    if (q <= 0) return all;  // rho = 1, thinning is the identity

    std::vector<double> pmf = binomial_pmf(t, p0);
    double rho = 0.0;
    for (Index j = q; j <= t; ++j) rho += pmf[static_cast<std::size_t>(j)];
    if (1.0 - rho < 1e-300) return all;

    std::bernoulli_distribution keep_all(std::min(rho, 1.0));
    if (keep_all(rng)) return all;

    std::discrete_distribution<Index> z_dist(pmf.begin(),
                                             pmf.begin() + static_cast<long>(q));
    Index z = z_dist(rng);
    std::vector<Index> picks =
        sample_without_replacement(static_cast<Index>(all.size()), z, rng);
    std::vector<Index> kept;
    kept.reserve(static_cast<std::size_t>(z));
    for (Index p : picks) kept.push_back(all[static_cast<std::size_t>(p)]);
    std::sort(kept.begin(), kept.end());
    return kept;
}

Neighborhood thin_neighborhood(const Neighborhood& nb,
                               std::span<const Index> seed_support, double p0,
                               Index t0, Rng& rng) {
    Index t = static_cast<Index>(seed_support.size());
    std::vector<char> on_support(static_cast<std::size_t>(nb.submatrix.n_rows()), 0);
    for (Index row : seed_support) on_support[static_cast<std::size_t>(row)] = 1;

    Neighborhood out;
    out.seed_col = nb.seed_col;
    out.member_cols = nb.member_cols;
    out.seed_support.assign(seed_support.begin(), seed_support.end());
    out.submatrix = ObservedMatrix(nb.submatrix.n_rows(), nb.submatrix.n_cols());

    for (Index j = 0; j < nb.submatrix.n_cols(); ++j) {
        const auto& entries = nb.submatrix.column_entries(j);
        std::vector<Index> support_rows;
        for (const auto& [row, value] : entries)
            if (on_support[static_cast<std::size_t>(row)]) support_rows.push_back(row);
        std::vector<Index> kept = thin_on_support(t, t0, p0, support_rows, rng);
        std::vector<char> keep_row(static_cast<std::size_t>(nb.submatrix.n_rows()), 0);
        for (Index row : kept) keep_row[static_cast<std::size_t>(row)] = 1;
        for (const auto& [row, value] : entries) {
            if (!on_support[static_cast<std::size_t>(row)] ||
                keep_row[static_cast<std::size_t>(row)])
                out.submatrix.insert(row, j, value);
        }
    }
    return out;
}

namespace {

struct NeighborhoodSolve {
    std::optional<Subspace> basis;
    CandidateProvenance provenance;
    bool failed = false;
};

NeighborhoodSolve solve_neighborhood(const Neighborhood& nb,
                                     const PipelineParams& params,
                                     const PipelineConfig& cfg) {
    NeighborhoodSolve out;
    out.provenance.seed_col = nb.seed_col;

    // Drop unobserved rows/columns before the solve; basis rows for dropped
    // ambient rows are re-embedded as zeros below and the candidate flagged.
    std::vector<Index> row_map, col_map;
    std::vector<Index> row_of(static_cast<std::size_t>(nb.submatrix.n_rows()), -1);
    std::vector<char> row_seen(static_cast<std::size_t>(nb.submatrix.n_rows()), 0);
    std::vector<char> col_seen(static_cast<std::size_t>(nb.submatrix.n_cols()), 0);
    nb.submatrix.for_each_entry([&](Index i, Index j, double) {
        row_seen[static_cast<std::size_t>(i)] = 1;
        col_seen[static_cast<std::size_t>(j)] = 1;
    });
    for (Index i = 0; i < nb.submatrix.n_rows(); ++i)
        if (row_seen[static_cast<std::size_t>(i)]) {
            row_of[static_cast<std::size_t>(i)] = static_cast<Index>(row_map.size());
            row_map.push_back(i);
        }
    for (Index j = 0; j < nb.submatrix.n_cols(); ++j)
        if (col_seen[static_cast<std::size_t>(j)]) col_map.push_back(j);
    out.provenance.had_empty_rows =
        static_cast<Index>(row_map.size()) != nb.submatrix.n_rows();
    out.provenance.had_empty_cols =
        static_cast<Index>(col_map.size()) != nb.submatrix.n_cols();
    if (row_map.empty() || col_map.empty()) {
        out.failed = true;
        return out;
    }

    ObservedMatrix reduced(static_cast<Index>(row_map.size()),
                           static_cast<Index>(col_map.size()));
    for (std::size_t jj = 0; jj < col_map.size(); ++jj)
        for (const auto& [row, value] : nb.submatrix.column_entries(col_map[jj]))
            reduced.insert(row_of[static_cast<std::size_t>(row)],
                           static_cast<Index>(jj), value);

    SolverConfig solver = cfg.solver;
    solver.seed = derive_seed(cfg.solver.seed, 0x6e62,
                              static_cast<std::uint64_t>(nb.seed_col));
    CompletionResult res = complete_lowrank(reduced, params.in.r, solver);
    if (completion_failed(res, solver, params.in.r)) {
        out.failed = true;
        return out;
    }

    Matrix embedded = Matrix::Zero(nb.submatrix.n_rows(), res.basis.dim());
    for (std::size_t i = 0; i < row_map.size(); ++i)
        embedded.row(row_map[i]) = res.basis.basis().row(static_cast<Index>(i));
    out.basis = Subspace(std::move(embedded));
    out.provenance.rank = out.basis->dim();
    return out;
}

}  // namespace

CandidateSet complete_neighborhoods(const std::vector<Neighborhood>& nbs,
                                    const PipelineParams& params,
                                    const PipelineConfig& cfg) {
    std::vector<NeighborhoodSolve> solved(nbs.size());
    parallel_for(static_cast<Index>(nbs.size()), cfg.threads, [&](Index i) {
        solved[static_cast<std::size_t>(i)] =
            solve_neighborhood(nbs[static_cast<std::size_t>(i)], params, cfg);
    });
    CandidateSet out;
    for (auto& s : solved) {
        if (s.failed || !s.basis) continue;
        out.subspaces.push_back(std::move(*s.basis));
        out.provenance.push_back(s.provenance);
    }
    if (out.subspaces.empty())
        throw NoCandidatesError("no candidate subspaces: every local completion failed");
    return out;
}

std::vector<Subspace> refine_subspaces(const CandidateSet& cands, double tol) {
    if (cands.subspaces.empty()) throw Error("refine_subspaces: empty candidate set");
    std::vector<Index> order(cands.subspaces.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Index>(i);
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        const auto& sa = cands.subspaces[static_cast<std::size_t>(a)];
        const auto& sb = cands.subspaces[static_cast<std::size_t>(b)];
        if (sa.dim() != sb.dim()) return sa.dim() < sb.dim();
        Index seed_a = cands.provenance.size() == cands.subspaces.size()
                           ? cands.provenance[static_cast<std::size_t>(a)].seed_col
                           : a;
        Index seed_b = cands.provenance.size() == cands.subspaces.size()
                           ? cands.provenance[static_cast<std::size_t>(b)].seed_col
                           : b;
        return seed_a < seed_b;
    });
    std::vector<Subspace> accepted;
    for (Index i : order) {
        const Subspace& cand = cands.subspaces[static_cast<std::size_t>(i)];
        double eff_tol = tol > 0.0 ? tol : default_containment_tol(cand.dim());
        if (!contained_in_union(cand, accepted, eff_tol)) accepted.push_back(cand);
    }
    return accepted;
}

AssignResult assign_column(const ObservedVector& x, std::span<const Subspace> subspaces,
                           const PipelineConfig& cfg) {
    AssignResult out;
    if (subspaces.empty()) throw Error("assign_column: no subspaces");
    if (x.n_observed() == 0) {
        out.status = ColumnStatus::InsufficientSamples;
        return out;
    }
    double scale = x.restricted().squaredNorm();
    out.residuals.reserve(subspaces.size());
    Index passes = 0;
    for (const auto& s : subspaces) {
        double res;
        try {
            res = projection_residual(x, s);
        } catch (const DegenerateRestrictionError&) {
            res = std::numeric_limits<double>::infinity();  // non-membership
        }
        out.residuals.push_back(res);
        if (res <= cfg.assign_tol * scale) {
            ++passes;
            out.index = static_cast<Index>(out.residuals.size()) - 1;
        }
    }
    if (passes == 1) {
        out.status = ColumnStatus::Completed;
    } else {
        out.index.reset();
        out.status = ColumnStatus::Ambiguous;
    }
    return out;
}

PipelineResult complete_matrix(const ObservedMatrix& m, const PipelineParams& params,
                               const PipelineConfig& cfg, std::uint64_t master_seed) {
    PipelineResult result;
    RunDiagnostics& diag = result.diagnostics;
    diag.seeds_requested = params.effective_s0();

    auto t_select = Clock::now();
    Rng seed_rng = make_rng(master_seed, 0);
    std::vector<Index> seeds = select_seeds(m, params, seed_rng);
    diag.seeds_selected = static_cast<Index>(seeds.size());
    diag.timings.select_ms = ms_since(t_select);

    // form (and thin) one neighborhood per seed
    auto t_nb = Clock::now();
    std::vector<std::optional<Neighborhood>> formed(seeds.size());
    std::vector<std::string> reasons(seeds.size());
    parallel_for(static_cast<Index>(seeds.size()), cfg.threads, [&](Index i) {
        Rng rng = make_rng(master_seed, 1, static_cast<std::uint64_t>(i));
        std::string reason;
        auto nb = form_neighborhood(m, seeds[static_cast<std::size_t>(i)], params,
                                    rng, &reason);
        if (nb && params.thinning_enabled)
            nb = thin_neighborhood(*nb, nb->seed_support, params.in.p0,
                                   params.effective_t0(), rng);
        formed[static_cast<std::size_t>(i)] = std::move(nb);
        reasons[static_cast<std::size_t>(i)] = std::move(reason);
    });
    std::vector<Neighborhood> neighborhoods;
    for (std::size_t i = 0; i < formed.size(); ++i) {
        if (formed[i])
            neighborhoods.push_back(std::move(*formed[i]));
        else
            ++diag.seeds_discarded[reasons[i]];
    }
    diag.timings.neighborhoods_ms = ms_since(t_nb);

    auto t_complete = Clock::now();
    PipelineConfig cfg_local = cfg;
    cfg_local.solver.seed = derive_seed(master_seed, 2);
    Index attempted = static_cast<Index>(neighborhoods.size());
    CandidateSet candidates = complete_neighborhoods(neighborhoods, params, cfg_local);
    diag.candidates_found = static_cast<Index>(candidates.subspaces.size());
    if (attempted > diag.candidates_found)
        diag.seeds_discarded["completion failed"] += attempted - diag.candidates_found;
    diag.timings.completion_ms = ms_since(t_complete);

    auto t_refine = Clock::now();
    result.subspaces = refine_subspaces(candidates, cfg.containment_tol);
    diag.candidates_pruned =
        diag.candidates_found - static_cast<Index>(result.subspaces.size());
    for (const auto& s : result.subspaces) diag.subspace_dims.push_back(s.dim());
    diag.timings.refine_ms = ms_since(t_refine);

    auto t_assign = Clock::now();
    result.reports.resize(static_cast<std::size_t>(m.n_cols()));
    parallel_for(m.n_cols(), cfg.threads, [&](Index col) {
        CompletionReport& report = result.reports[static_cast<std::size_t>(col)];
        report.column = col;
        ObservedVector x = m.column(col);
        report.n_observed = x.n_observed();
        AssignResult assign = assign_column(x, result.subspaces, cfg);
        report.residuals = std::move(assign.residuals);
        report.status = assign.status;
        if (assign.index) {
            try {
                Vector filled = complete_column(
                    x, result.subspaces[static_cast<std::size_t>(*assign.index)]);
                // observed entries are known; imputation only fills the rest
                for (std::size_t e = 0; e < x.indices.size(); ++e)
                    filled[x.indices[e]] = x.values[e];
                report.completed = std::move(filled);
                report.assigned_subspace = assign.index;
                report.status = ColumnStatus::Completed;
            } catch (const Error&) {
                report.status = ColumnStatus::Degenerate;
            }
        }
    });
    for (const auto& report : result.reports)
        ++diag.status_counts[to_string(report.status)];
    diag.timings.assign_ms = ms_since(t_assign);
    return result;
}

}  // namespace hrmc
