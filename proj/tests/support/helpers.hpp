#pragma once

#include <Eigen/QR>
#include <vector>

#include "hrmc/observed.hpp"
#include "hrmc/rng.hpp"
#include "hrmc/subspace.hpp"

namespace testutil {

using hrmc::Index;
using hrmc::Matrix;
using hrmc::Vector;

/// Subspace spanned by the given canonical axes of R^n.
inline hrmc::Subspace axis_subspace(Index n, std::initializer_list<Index> axes) {
    Matrix basis = Matrix::Zero(n, static_cast<Index>(axes.size()));
    Index c = 0;
    for (Index a : axes) basis(a, c++) = 1.0;
    return hrmc::Subspace(std::move(basis));
}

inline hrmc::Subspace random_subspace(Index n, Index d, hrmc::Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    return hrmc::Subspace(Matrix(qr.householderQ()).leftCols(d));
}

inline Vector random_vector(Index n, hrmc::Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = gauss(rng);
    return v;
}

/// Observed vector holding `values` at the given rows of an n-vector.
inline hrmc::ObservedVector observe(Index n, std::vector<Index> rows,
                                    std::vector<double> values) {
    hrmc::ObservedVector v;
    v.ambient_dim = n;
    v.indices = std::move(rows);
    v.values = std::move(values);
    v.validate();
    return v;
}

/// Fully observed view of a dense vector.
inline hrmc::ObservedVector observe_all(const Vector& x) {
    hrmc::ObservedVector v;
    v.ambient_dim = x.size();
    for (Index i = 0; i < x.size(); ++i) {
        v.indices.push_back(i);
        v.values.push_back(x[i]);
    }
    return v;
}

/// Restriction of a dense vector to a sorted support.
inline hrmc::ObservedVector observe_at(const Vector& x, std::vector<Index> rows) {
    hrmc::ObservedVector v;
    v.ambient_dim = x.size();
    for (Index r : rows) {
        v.indices.push_back(r);
        v.values.push_back(x[r]);
    }
    return v;
}

inline hrmc::ObservedMatrix observe_dense(const Matrix& m) {
    hrmc::ObservedMatrix out(m.rows(), m.cols());
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i) out.insert(i, j, m(i, j));
    return out;
}

inline hrmc::ObservedMatrix observe_bernoulli(const Matrix& m, double p0,
                                              hrmc::Rng& rng) {
    hrmc::ObservedMatrix out(m.rows(), m.cols());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            if (unif(rng) < p0) out.insert(i, j, m(i, j));
    return out;
}

}  // namespace testutil
