#pragma once

#include <string>
#include <vector>

#include "hrmc/observed.hpp"
#include "hrmc/types.hpp"

namespace hrmc {

/// 17 significant digits, enough to round-trip any double exactly.
std::string format_double(double v);

/// Writes content to a temporary file in the same directory, then renames it
/// over the target path.
void atomic_write_text(const std::string& path, const std::string& content);

/// Coordinate format:
///   %%sparse-matrix <n_rows> <n_cols> <nnz>
///   <row> <col> <value>     (1-based indices, one triple per line)
/// Lines starting with % are comments.
void write_observed(const std::string& path, const ObservedMatrix& m);
ObservedMatrix read_observed(const std::string& path);

/// Dense format: "%%dense-matrix <n_rows> <n_cols>" then one row per line.
void write_dense(const std::string& path, const Matrix& m);
Matrix read_dense(const std::string& path);

/// Labels sidecar: one integer per line.
void write_labels(const std::string& path, const std::vector<Index>& labels);
std::vector<Index> read_labels(const std::string& path);

}  // namespace hrmc
