#include "hrmc/core.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>

namespace hrmc {

double coherence(const Subspace& s) {
    if (s.dim() == 0) throw Error("coherence: empty basis");
    // ||P_S e_j||^2 = ||U^T e_j||^2 = squared norm of the j-th basis row
    double max_row = s.basis().rowwise().squaredNorm().maxCoeff();
    return (static_cast<double>(s.ambient_dim()) / static_cast<double>(s.dim())) *
           max_row;
}

double vector_coherence(const Vector& x) {
    double nrm2 = x.squaredNorm();
    if (nrm2 <= 0.0) throw Error("zero vector has undefined coherence");
    double inf = x.cwiseAbs().maxCoeff();
    return static_cast<double>(x.size()) * inf * inf / nrm2;
}

PartialDistance partial_distance(const ObservedVector& x1, const ObservedVector& x2,
                                 Index min_overlap) {
    if (x1.ambient_dim != x2.ambient_dim)
        throw Error("partial_distance: ambient dimension mismatch");
    PartialDistance out;
    double sum = 0.0;
    std::size_t i = 0, j = 0;
    while (i < x1.indices.size() && j < x2.indices.size()) {
        if (x1.indices[i] < x2.indices[j]) {
            ++i;
        } else if (x1.indices[i] > x2.indices[j]) {
            ++j;
        } else {
            double d = x1.values[i] - x2.values[j];
            sum += d * d;
            ++out.overlap;
            ++i;
            ++j;
        }
    }
    out.sufficient = out.overlap >= min_overlap && out.overlap > 0;
    if (out.sufficient)
        out.estimate = (static_cast<double>(x1.ambient_dim) /
                        static_cast<double>(out.overlap)) *
                       sum;
    return out;
}

namespace {

// Least-squares weights for U_Omega w ~= x_Omega via column-pivoted QR,
// with a condition estimate from the R diagonal.
Vector restricted_weights(const ObservedVector& x, const Subspace& s,
                          const Matrix& u_omega) {
    Eigen::ColPivHouseholderQR<Matrix> qr(u_omega);
    const Matrix& qrm = qr.matrixQR();
    Index d = u_omega.cols();
    double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < std::min(qrm.rows(), d); ++i) {
        double v = std::abs(qrm(i, i));
        dmax = std::max(dmax, v);
        dmin = std::min(dmin, v);
    }
    if (u_omega.rows() < d || dmin == 0.0 || dmax / dmin > kSingularConditionLimit)
        throw DegenerateRestrictionError(
            "degenerate restriction: U_Omega^T U_Omega numerically singular");
    return qr.solve(x.restricted());
}

}  // namespace

double projection_residual(const ObservedVector& x, const Subspace& s) {
    if (x.ambient_dim != s.ambient_dim())
        throw Error("projection_residual: ambient dimension mismatch");
    if (x.n_observed() < 1) throw Error("projection_residual: empty observation set");
    Vector xo = x.restricted();
    if (s.dim() == 0) return xo.squaredNorm();
    Matrix u_omega = s.restricted(x.indices);
    Vector w = restricted_weights(x, s, u_omega);
    return (xo - u_omega * w).squaredNorm();
}

Vector complete_column(const ObservedVector& x, const Subspace& s) {
    if (x.ambient_dim != s.ambient_dim())
        throw Error("complete_column: ambient dimension mismatch");
    if (x.n_observed() < s.dim())
        throw UnderdeterminedError("underdetermined: " +
                                   std::to_string(x.n_observed()) +
                                   " observations for a " + std::to_string(s.dim()) +
                                   "-dimensional subspace");
    if (s.dim() == 0) return Vector::Zero(x.ambient_dim);
    Matrix u_omega = s.restricted(x.indices);
    Vector w = restricted_weights(x, s, u_omega);
    return s.basis() * w;
}

bool contained_in_union(const Subspace& s, std::span<const Subspace> others,
                        double tol) {
    if (others.empty()) return s.dim() == 0;
    Index n = s.ambient_dim();
    Index total = 0;
    for (const auto& o : others) {
        if (o.ambient_dim() != n)
            throw Error("contained_in_union: ambient dimension mismatch");
        total += o.dim();
    }
    if (s.dim() == 0) return true;
    Matrix stacked(n, total);
    Index at = 0;
    for (const auto& o : others) {
        stacked.middleCols(at, o.dim()) = o.basis();
        at += o.dim();
    }
    Subspace w = Subspace::from_span(stacked);
    Matrix residual = s.basis() - w.basis() * (w.basis().transpose() * s.basis());
    return residual.norm() <= tol;
}

}  // namespace hrmc
