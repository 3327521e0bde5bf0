#include "hrmc/lowrank.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "hrmc/rng.hpp"

namespace hrmc {

namespace {

struct Observations {
    Index rows = 0, cols = 0, nnz = 0;
    std::vector<std::vector<std::pair<Index, double>>> by_col;
    std::vector<std::vector<std::pair<Index, double>>> by_row;
    double rms = 0.0;
};

Observations gather(const ObservedMatrix& m) {
    Observations o;
    o.rows = m.n_rows();
    o.cols = m.n_cols();
    o.nnz = m.nnz();
    o.by_col.resize(static_cast<std::size_t>(o.cols));
    o.by_row.resize(static_cast<std::size_t>(o.rows));
    double sq = 0.0;
    m.for_each_entry([&](Index i, Index j, double v) {
        o.by_col[static_cast<std::size_t>(j)].emplace_back(i, v);
        o.by_row[static_cast<std::size_t>(i)].emplace_back(j, v);
        sq += v * v;
    });
    for (Index j = 0; j < o.cols; ++j)
        if (o.by_col[static_cast<std::size_t>(j)].empty())
            throw UnsamplableLineError(false, j);
    for (Index i = 0; i < o.rows; ++i)
        if (o.by_row[static_cast<std::size_t>(i)].empty())
            throw UnsamplableLineError(true, i);
    o.rms = o.nnz > 0 ? std::sqrt(sq / static_cast<double>(o.nnz)) : 0.0;
    return o;
}

double observed_rmse(const Observations& o, const Matrix& a, const Matrix& b) {
    double sq = 0.0;
    for (Index j = 0; j < o.cols; ++j) {
        for (const auto& [i, v] : o.by_col[static_cast<std::size_t>(j)]) {
            double e = a.row(i).dot(b.row(j)) - v;
            sq += e * e;
        }
    }
    return std::sqrt(sq / static_cast<double>(o.nnz));
}

// Solve one factor given the other by per-line least squares
// (minimum-norm solution when the line is underdetermined).
void solve_factor(const std::vector<std::vector<std::pair<Index, double>>>& lines,
                  const Matrix& fixed, Matrix& out) {
    Index d = fixed.cols();
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const auto& entries = lines[li];
        Matrix sys(static_cast<Index>(entries.size()), d);
        Vector rhs(static_cast<Index>(entries.size()));
        for (std::size_t e = 0; e < entries.size(); ++e) {
            sys.row(static_cast<Index>(e)) = fixed.row(entries[e].first);
            rhs[static_cast<Index>(e)] = entries[e].second;
        }
        out.row(static_cast<Index>(li)) =
            sys.completeOrthogonalDecomposition().solve(rhs).transpose();
    }
}

Matrix spectral_init(const Observations& o, Index d) {
    // Fill the mask with zeros and rescale by the sampling density, then take
    // the top-d left singular directions.
    double p_hat = static_cast<double>(o.nnz) /
                   (static_cast<double>(o.rows) * static_cast<double>(o.cols));
    Matrix filled = Matrix::Zero(o.rows, o.cols);
    for (Index j = 0; j < o.cols; ++j)
        for (const auto& [i, v] : o.by_col[static_cast<std::size_t>(j)])
            filled(i, j) = v / p_hat;
    Eigen::BDCSVD<Matrix> svd(filled, Eigen::ComputeThinU);
    Index avail = std::min<Index>(d, svd.matrixU().cols());
    Matrix a(o.rows, d);
    a.leftCols(avail) = svd.matrixU().leftCols(avail);
    for (Index c = 0; c < avail; ++c)
        a.col(c) *= std::sqrt(std::max(svd.singularValues()[c], 1e-12));
    for (Index c = avail; c < d; ++c) a.col(c).setZero();
    return a;
}

Matrix gaussian_init(const Observations& o, Index d, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix a(o.rows, d);
    for (Index i = 0; i < o.rows; ++i)
        for (Index c = 0; c < d; ++c) a(i, c) = gauss(rng) * std::max(o.rms, 1.0);
    return a;
}

struct Fit {
    Matrix a, b;
    double rmse = std::numeric_limits<double>::infinity();
    Index iterations = 0;
};

Fit als_fit(const Observations& o, Matrix a0, const SolverConfig& cfg,
            double threshold) {
    Fit fit;
    fit.a = std::move(a0);
    fit.b = Matrix::Zero(o.cols, fit.a.cols());
    double prev = std::numeric_limits<double>::infinity();
    Index stalled = 0;
    for (Index it = 0; it < cfg.max_iterations; ++it) {
        solve_factor(o.by_col, fit.a, fit.b);
        solve_factor(o.by_row, fit.b, fit.a);
        fit.rmse = observed_rmse(o, fit.a, fit.b);
        ++fit.iterations;
        double improvement = (prev - fit.rmse) / std::max(prev, 1e-300);
        if (improvement < cfg.convergence_tol) break;
        // hopeless fits plateau far above the threshold; cut them short
        if (fit.rmse > 100.0 * threshold && improvement < 1e-4) {
            if (++stalled >= 3) break;
        } else {
            stalled = 0;
        }
        prev = fit.rmse;
    }
    return fit;
}

// One pass of incremental gradient steps on the Grassmannian, one column at
// a time with greedy step sizes.
void grassmann_pass(const Observations& o, Matrix& u, Rng& rng) {
    std::vector<Index> order(static_cast<std::size_t>(o.cols));
    for (Index j = 0; j < o.cols; ++j) order[static_cast<std::size_t>(j)] = j;
    std::shuffle(order.begin(), order.end(), rng);
    Index d = u.cols();
    for (Index j : order) {
        const auto& entries = o.by_col[static_cast<std::size_t>(j)];
        Matrix uo(static_cast<Index>(entries.size()), d);
        Vector v(static_cast<Index>(entries.size()));
        for (std::size_t e = 0; e < entries.size(); ++e) {
            uo.row(static_cast<Index>(e)) = u.row(entries[e].first);
            v[static_cast<Index>(e)] = entries[e].second;
        }
        Vector w = uo.completeOrthogonalDecomposition().solve(v);
        Vector resid = v - uo * w;
        double rn = resid.norm();
        double wn = w.norm();
        if (rn < 1e-14 || wn < 1e-14) continue;
        Vector p = u * w;
        double pn = p.norm();
        double theta = std::atan2(rn, pn);
        Vector resid_full = Vector::Zero(o.rows);
        for (std::size_t e = 0; e < entries.size(); ++e)
            resid_full[entries[e].first] = resid[static_cast<Index>(e)];
        u += ((std::cos(theta) - 1.0) / pn * p + std::sin(theta) / rn * resid_full) *
             (w.transpose() / wn);
    }
    // counteract drift from the incremental updates
    Eigen::HouseholderQR<Matrix> qr(u);
    u = Matrix(qr.householderQ()).leftCols(d);
}

Fit grassmann_fit(const Observations& o, Index d, Rng& rng, const SolverConfig& cfg,
                  double threshold) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix u(o.rows, d);
    for (Index i = 0; i < o.rows; ++i)
        for (Index c = 0; c < d; ++c) u(i, c) = gauss(rng);
    Eigen::HouseholderQR<Matrix> qr(u);
    u = Matrix(qr.householderQ()).leftCols(d);

    Fit fit;
    fit.b = Matrix::Zero(o.cols, d);
    double prev = std::numeric_limits<double>::infinity();
    Index stalled = 0;
    for (Index pass = 0; pass < cfg.max_iterations; ++pass) {
        grassmann_pass(o, u, rng);
        fit.a = u;
        solve_factor(o.by_col, fit.a, fit.b);
        fit.rmse = observed_rmse(o, fit.a, fit.b);
        ++fit.iterations;
        double improvement = (prev - fit.rmse) / std::max(prev, 1e-300);
        if (improvement < cfg.convergence_tol) break;
        if (fit.rmse > 100.0 * threshold && improvement < 1e-4) {
            if (++stalled >= 3) break;
        } else {
            stalled = 0;
        }
        prev = fit.rmse;
    }
    if (fit.a.size() == 0) {
        fit.a = u;
        solve_factor(o.by_col, fit.a, fit.b);
        fit.rmse = observed_rmse(o, fit.a, fit.b);
    }
    return fit;
}

CompletionResult package(const Observations& o, const Fit& fit, double rms,
                         bool converged, Index total_iterations) {
    CompletionResult res{Subspace::from_span(fit.a), fit.a * fit.b.transpose(),
                         fit.rmse, rms, converged, total_iterations};
    return res;
}

}  // namespace

CompletionResult complete_lowrank(const ObservedMatrix& m, Index max_rank,
                                  const SolverConfig& cfg) {
    if (max_rank < 1) throw Error("complete_lowrank: max_rank must be at least 1");
    if (m.n_rows() == 0 || m.n_cols() == 0 || m.nnz() == 0)
        throw Error("complete_lowrank: empty matrix");
    Observations o = gather(m);
    double threshold = exact_threshold(cfg, o.rms);
    Index rank_cap = std::min<Index>(max_rank, std::min(o.rows, o.cols));

    Index total_iterations = 0;
    Fit best;
    Index first_rank = cfg.ascending_rank_search ? 1 : rank_cap;
    for (Index d = first_rank; d <= rank_cap; ++d) {
        for (Index restart = 0; restart < std::max<Index>(1, cfg.max_restarts);
             ++restart) {
            Rng rng = make_rng(cfg.seed, static_cast<std::uint64_t>(d),
                               static_cast<std::uint64_t>(restart));
            Fit fit;
            if (cfg.backend == SolverBackend::Grassmann) {
                fit = grassmann_fit(o, d, rng, cfg, threshold);
            } else {
                Matrix a0 = restart == 0 ? spectral_init(o, d)
                                         : gaussian_init(o, d, rng);
                fit = als_fit(o, std::move(a0), cfg, threshold);
            }
            total_iterations += fit.iterations;
            if (fit.rmse < best.rmse) best = fit;
            if (fit.rmse <= threshold)
                return package(o, fit, o.rms, true, total_iterations);
        }
    }
    return package(o, best, o.rms, false, total_iterations);
}

bool completion_failed(const CompletionResult& res, const SolverConfig& cfg,
                       Index rank_bound) {
    return res.observed_rmse > exact_threshold(cfg, res.observed_rms) ||
           res.basis.dim() > rank_bound;
}

}  // namespace hrmc
