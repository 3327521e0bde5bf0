#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "hrmc/types.hpp"

namespace hrmc {

/// One column of a partially observed matrix, restricted to its observed
/// index set Omega.
struct ObservedVector {
    Index ambient_dim = 0;
    std::vector<Index> indices;  // strictly increasing, all < ambient_dim
    std::vector<double> values;  // aligned with indices

    Index n_observed() const { return static_cast<Index>(indices.size()); }

    /// Observed values as a dense vector of length |Omega|.
    Vector restricted() const {
        Vector v(n_observed());
        for (Index i = 0; i < v.size(); ++i) v[i] = values[static_cast<std::size_t>(i)];
        return v;
    }

    /// Throws if the invariants (sorted indices, bounds, alignment) are violated.
    void validate() const;
};

/// Partially observed n x N matrix stored as a coordinate map with
/// column-major access. Only observed entries are present; the observation
/// pattern can be arbitrarily sparse.
class ObservedMatrix {
public:
    using Entry = std::pair<Index, double>;  // (row, value)

    ObservedMatrix() = default;
    ObservedMatrix(Index n_rows, Index n_cols);

    Index n_rows() const { return n_rows_; }
    Index n_cols() const { return n_cols_; }
    Index nnz() const { return nnz_; }

    /// Inserts an observation. Throws on out-of-range or duplicate (row, col).
    void insert(Index row, Index col, double value);

    bool has(Index row, Index col) const;
    std::optional<double> value_at(Index row, Index col) const;

    /// Observed entries of a column, sorted by row.
    const std::vector<Entry>& column_entries(Index col) const;

    Index column_count(Index col) const {
        return static_cast<Index>(column_entries(col).size());
    }

    /// Observed row indices of a column (the column's Omega).
    std::vector<Index> column_support(Index col) const;

    ObservedVector column(Index col) const;

    void for_each_entry(const std::function<void(Index, Index, double)>& f) const;

private:
    void check_col(Index col) const;

    Index n_rows_ = 0;
    Index n_cols_ = 0;
    Index nnz_ = 0;
    std::vector<std::vector<Entry>> cols_;
};

}  // namespace hrmc
