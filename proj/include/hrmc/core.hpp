#pragma once

#include <span>
#include <vector>

#include "hrmc/observed.hpp"
#include "hrmc/subspace.hpp"
#include "hrmc/types.hpp"

namespace hrmc {

/// Coherence of a subspace: (n/d) * max_j ||P_S e_j||^2. Always in [1, n/d].
double coherence(const Subspace& s);

/// Coherence of a single nonzero vector: n * ||x||_inf^2 / ||x||_2^2.
/// Equals the coherence of the one-dimensional subspace spanned by x.
double vector_coherence(const Vector& x);

/// Rescaled restricted squared distance between two partially observed
/// columns, computed over their common support.
struct PartialDistance {
    Index overlap = 0;        // q = |Omega_1 ∩ Omega_2|
    double estimate = 0.0;    // (n/q) * sum over common support of (x1_i - x2_i)^2
    bool sufficient = false;  // overlap >= min_overlap
};

/// Estimates ||x1 - x2||^2 from commonly observed coordinates. When the
/// overlap is below min_overlap the estimate is not meaningful and
/// `sufficient` is false; callers filter on it.
PartialDistance partial_distance(const ObservedVector& x1, const ObservedVector& x2,
                                 Index min_overlap);

/// Incomplete-data projection residual ||x_Omega - P_{Omega,S} x_Omega||^2,
/// computed by QR least squares (never by forming (U_Omega^T U_Omega)^{-1}).
/// Zero exactly when the column is consistent with S on its observed rows.
/// Throws DegenerateRestrictionError when U_Omega is numerically singular.
double projection_residual(const ObservedVector& x, const Subspace& s);

/// Completes a column from a known subspace:
///   x_hat = U (U_Omega^T U_Omega)^{-1} U_Omega^T x_Omega,
/// solved by least squares. Requires |Omega| >= dim(S) and a nonsingular
/// restriction.
Vector complete_column(const ObservedVector& x, const Subspace& s);

/// True iff s lies in the span of the union of `others`, i.e.
/// ||(I - P_W) U_s||_F <= tol with W an orthonormal basis of the union.
bool contained_in_union(const Subspace& s, std::span<const Subspace> others,
                        double tol);

/// Default containment tolerance: scales Frobenius slack with basis size.
inline double default_containment_tol(Index dim) {
    return 1e-8 * std::sqrt(static_cast<double>(dim > 0 ? dim : 1));
}

}  // namespace hrmc
