#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace hrmc {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Condition-number estimate above which a restricted basis U_Omega is
/// treated as numerically singular.
inline constexpr double kSingularConditionLimit = 1e12;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// U_Omega^T U_Omega is numerically singular; callers performing subspace
/// assignment treat this as non-membership rather than a fault.
class DegenerateRestrictionError : public Error {
public:
    using Error::Error;
};

/// Fewer observations than subspace dimensions: the completion weights are
/// not identifiable.
class UnderdeterminedError : public Error {
public:
    using Error::Error;
};

/// A row or column of the matrix carries no observations at all.
class UnsamplableLineError : public Error {
public:
    UnsamplableLineError(bool is_row, Index index)
        : Error(std::string("unsamplable ") + (is_row ? "row " : "column ") +
                std::to_string(index) + ": no observed entries"),
          is_row(is_row),
          index(index) {}

    bool is_row;
    Index index;
};

class InsufficientSeedsError : public Error {
public:
    InsufficientSeedsError(Index requested, Index achieved)
        : Error("insufficient seed candidates: requested " +
                std::to_string(requested) + ", only " + std::to_string(achieved) +
                " columns qualify"),
          requested(requested),
          achieved(achieved) {}

    Index requested;
    Index achieved;
};

class NoCandidatesError : public Error {
public:
    using Error::Error;
};

}  // namespace hrmc
