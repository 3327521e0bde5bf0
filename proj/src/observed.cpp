#include "hrmc/observed.hpp"

#include <algorithm>

namespace hrmc {

void ObservedVector::validate() const {
    if (ambient_dim < 0) throw Error("ObservedVector: negative ambient dimension");
    if (indices.size() != values.size())
        throw Error("ObservedVector: indices/values length mismatch");
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] < 0 || indices[i] >= ambient_dim)
            throw Error("ObservedVector: index out of range");
        if (i > 0 && indices[i] <= indices[i - 1])
            throw Error("ObservedVector: indices not strictly increasing");
    }
}

ObservedMatrix::ObservedMatrix(Index n_rows, Index n_cols)
    : n_rows_(n_rows), n_cols_(n_cols), cols_(static_cast<std::size_t>(n_cols)) {
    if (n_rows < 0 || n_cols < 0)
        throw Error("ObservedMatrix: negative dimensions");
}

void ObservedMatrix::check_col(Index col) const {
    if (col < 0 || col >= n_cols_)
        throw Error("ObservedMatrix: column index " + std::to_string(col) +
                    " out of range [0, " + std::to_string(n_cols_) + ")");
}

void ObservedMatrix::insert(Index row, Index col, double value) {
    check_col(col);
    if (row < 0 || row >= n_rows_)
        throw Error("ObservedMatrix: row index " + std::to_string(row) +
                    " out of range [0, " + std::to_string(n_rows_) + ")");
    auto& c = cols_[static_cast<std::size_t>(col)];
    auto it = std::lower_bound(c.begin(), c.end(), row,
                               [](const Entry& e, Index r) { return e.first < r; });
    if (it != c.end() && it->first == row)
        throw Error("ObservedMatrix: duplicate entry at (" + std::to_string(row) +
                    ", " + std::to_string(col) + ")");
    c.insert(it, {row, value});
    ++nnz_;
}

bool ObservedMatrix::has(Index row, Index col) const {
    return value_at(row, col).has_value();
}

std::optional<double> ObservedMatrix::value_at(Index row, Index col) const {
    check_col(col);
    const auto& c = cols_[static_cast<std::size_t>(col)];
    auto it = std::lower_bound(c.begin(), c.end(), row,
                               [](const Entry& e, Index r) { return e.first < r; });
    if (it != c.end() && it->first == row) return it->second;
    return std::nullopt;
}

const std::vector<ObservedMatrix::Entry>& ObservedMatrix::column_entries(Index col) const {
    check_col(col);
    return cols_[static_cast<std::size_t>(col)];
}

std::vector<Index> ObservedMatrix::column_support(Index col) const {
    const auto& c = column_entries(col);
    std::vector<Index> out;
    out.reserve(c.size());
    for (const auto& [row, value] : c) out.push_back(row);
    return out;
}

ObservedVector ObservedMatrix::column(Index col) const {
    const auto& c = column_entries(col);
    ObservedVector v;
    v.ambient_dim = n_rows_;
    v.indices.reserve(c.size());
    v.values.reserve(c.size());
    for (const auto& [row, value] : c) {
        v.indices.push_back(row);
        v.values.push_back(value);
    }
    return v;
}

void ObservedMatrix::for_each_entry(
    const std::function<void(Index, Index, double)>& f) const {
    for (Index j = 0; j < n_cols_; ++j)
        for (const auto& [row, value] : cols_[static_cast<std::size_t>(j)])
            f(row, j, value);
}

}  // namespace hrmc
