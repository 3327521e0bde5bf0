#include "hrmc/subspace.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace hrmc {

Subspace::Subspace(Matrix orthonormal_basis) : basis_(std::move(orthonormal_basis)) {
    if (basis_.rows() <= 0)
        throw Error("Subspace: empty ambient dimension");
    if (basis_.cols() > basis_.rows())
        throw Error("Subspace: more basis vectors than ambient dimensions");
    if (basis_.cols() > 0) {
        Matrix gram = basis_.transpose() * basis_;
        gram.diagonal().array() -= 1.0;
        if (gram.norm() > 1e-10)
            throw Error("Subspace: basis is not orthonormal (||U^T U - I||_F = " +
                        std::to_string(gram.norm()) + ")");
    }
}

Subspace Subspace::from_span(const Matrix& span_columns) {
    if (span_columns.rows() <= 0)
        throw Error("Subspace::from_span: empty ambient dimension");
    if (span_columns.cols() == 0)
        return Subspace(Matrix(span_columns.rows(), 0));
    Eigen::JacobiSVD<Matrix> svd(span_columns, Eigen::ComputeThinU);
    const auto& sigma = svd.singularValues();
    double tol = std::max(span_columns.rows(), span_columns.cols()) *
                 std::numeric_limits<double>::epsilon() *
                 (sigma.size() > 0 ? sigma[0] : 0.0);
    Index rank = 0;
    for (Index i = 0; i < sigma.size(); ++i)
        if (sigma[i] > tol) ++rank;
    return Subspace(svd.matrixU().leftCols(rank));
}

Matrix Subspace::restricted(std::span<const Index> rows) const {
    Matrix out(static_cast<Index>(rows.size()), basis_.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0 || rows[i] >= basis_.rows())
            throw Error("Subspace::restricted: row index out of range");
        out.row(static_cast<Index>(i)) = basis_.row(rows[i]);
    }
    return out;
}

double max_principal_angle(const Subspace& a, const Subspace& b) {
    if (a.ambient_dim() != b.ambient_dim())
        throw Error("max_principal_angle: ambient dimension mismatch");
    const Subspace& small = a.dim() <= b.dim() ? a : b;
    const Subspace& large = a.dim() <= b.dim() ? b : a;
    if (small.dim() == 0) return 0.0;
    Matrix m = small.basis().transpose() * large.basis();
    Eigen::JacobiSVD<Matrix> svd(m);
    // cosines of the principal angles, descending; the smallest cosine gives
    // the largest angle
    double c = svd.singularValues().minCoeff();
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

}  // namespace hrmc
