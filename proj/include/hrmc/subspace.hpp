#pragma once

#include <span>
#include <vector>

#include "hrmc/types.hpp"

namespace hrmc {

/// A linear subspace of R^n represented by a column-orthonormal basis.
class Subspace {
public:
    /// Wraps an already orthonormal basis. Throws if basis^T basis deviates
    /// from the identity by more than 1e-10 in Frobenius norm.
    explicit Subspace(Matrix orthonormal_basis);

    /// Orthonormalizes an arbitrary spanning set (SVD, rank-truncated).
    static Subspace from_span(const Matrix& span_columns);

    Index ambient_dim() const { return basis_.rows(); }
    Index dim() const { return basis_.cols(); }
    const Matrix& basis() const { return basis_; }

    /// Rows of the basis indexed by Omega: U_Omega.
    Matrix restricted(std::span<const Index> rows) const;

private:
    Matrix basis_;
};

/// Largest principal angle (radians) between two subspaces of equal dimension;
/// for unequal dimensions, the largest angle from the smaller into the larger.
double max_principal_angle(const Subspace& a, const Subspace& b);

}  // namespace hrmc
