#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "hrmc/datagen.hpp"
#include "hrmc/pipeline.hpp"

namespace hrmc {

enum class Method { Highrank, LowrankBaseline };

std::string to_string(Method m);

/// One experiment: a generator, a sweep over sampling density, a set of
/// methods, and the tolerances that define a correctly completed column.
struct ExperimentSpec {
    std::variant<SyntheticConfig, HopcountConfig> generator;
    /// Sweep grid: average observations per column, or p0 values directly
    /// when sweep_is_p0 is set.
    std::vector<double> sweep{50.0};
    bool sweep_is_p0 = false;
    std::vector<Method> methods{Method::Highrank, Method::LowrankBaseline};
    std::vector<double> tolerances{1e-5, 0.01};
    Index trials = 1;
    std::uint64_t master_seed = 0;

    /// Practical pipeline knobs (overrides, thinning) applied on top of the
    /// generator's dimensions at every sweep point.
    PipelineParams params;
    PipelineConfig pipeline;
    SolverConfig baseline_solver;
    Index baseline_rank = 0;  // 0 = the true global rank k*r
    /// Score "exact" after rounding completions to the nearest integer
    /// (hop counts are integers).
    bool integer_rounding = false;
};

struct TrialRecord {
    Method method = Method::Highrank;
    double sweep_value = 0.0;
    Index trial = 0;
    std::vector<Index> correct_per_tol;
    Index total_columns = 0;
    double exact_missing_fraction = 0.0;
    double runtime_sec = 0.0;
    bool failed = false;
    std::string error;
};

struct ExperimentResult {
    std::vector<double> tolerances;
    std::vector<TrialRecord> records;
    /// Pooled absolute errors over unobserved entries, per (method, sweep).
    std::map<std::pair<std::string, double>, std::vector<double>> missing_errors;
};

/// Columns whose maximum absolute entry error is within tol.
Index score_columns(const Matrix& completed, const Matrix& truth, double tol);

/// Sampled CDF of absolute errors over unobserved entries: sorted
/// (error, cumulative fraction) pairs. Empty when nothing is missing.
std::vector<std::pair<double, double>> error_cdf(const Matrix& completed,
                                                 const Matrix& truth,
                                                 const ObservedMatrix& observed);

/// Fraction of unobserved entries recovered exactly, optionally after
/// rounding to the nearest integer.
double exact_missing_fraction(const Matrix& completed, const Matrix& truth,
                              const ObservedMatrix& observed, bool round_to_int);

/// Runs every (sweep point, trial, method) cell; method errors become
/// per-trial failure records and never abort the sweep. Both methods see the
/// same generated instance and mask within a trial.
ExperimentResult run_experiment(const ExperimentSpec& spec);

void write_records_csv(const std::string& path, const ExperimentResult& result);
void write_cdf_csv(const std::string& path, const ExperimentResult& result);

/// Self-contained SVG line plots (plain path elements, no external renderer).
void write_sweep_svg(const std::string& path, const ExperimentResult& result,
                     std::size_t tol_index = 0);
void write_cdf_svg(const std::string& path, const ExperimentResult& result);

}  // namespace hrmc
