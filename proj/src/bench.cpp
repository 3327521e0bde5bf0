#include "hrmc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hrmc/matrix_io.hpp"

namespace hrmc {

std::string to_string(Method m) {
    return m == Method::Highrank ? "highrank" : "lowrank-baseline";
}

Index score_columns(const Matrix& completed, const Matrix& truth, double tol) {
    if (completed.rows() != truth.rows() || completed.cols() != truth.cols())
        throw Error("score_columns: shape mismatch");
    Index correct = 0;
    for (Index j = 0; j < truth.cols(); ++j)
        if ((completed.col(j) - truth.col(j)).cwiseAbs().maxCoeff() <= tol) ++correct;
    return correct;
}

namespace {

std::vector<double> missing_abs_errors(const Matrix& completed, const Matrix& truth,
                                       const ObservedMatrix& observed) {
    if (completed.rows() != truth.rows() || completed.cols() != truth.cols() ||
        observed.n_rows() != truth.rows() || observed.n_cols() != truth.cols())
        throw Error("missing-entry scoring: shape mismatch");
    std::vector<char> mask(static_cast<std::size_t>(truth.size()), 0);
    observed.for_each_entry([&](Index i, Index j, double) {
        mask[static_cast<std::size_t>(j * truth.rows() + i)] = 1;
    });
    std::vector<double> errors;
    errors.reserve(static_cast<std::size_t>(truth.size()) -
                   static_cast<std::size_t>(observed.nnz()));
    for (Index j = 0; j < truth.cols(); ++j)
        for (Index i = 0; i < truth.rows(); ++i)
            if (!mask[static_cast<std::size_t>(j * truth.rows() + i)])
                errors.push_back(std::abs(completed(i, j) - truth(i, j)));
    return errors;
}

}  // namespace

std::vector<std::pair<double, double>> error_cdf(const Matrix& completed,
                                                 const Matrix& truth,
                                                 const ObservedMatrix& observed) {
    std::vector<double> errors = missing_abs_errors(completed, truth, observed);
    std::vector<std::pair<double, double>> cdf;
    if (errors.empty()) return cdf;  // no missing entries
    std::sort(errors.begin(), errors.end());
    cdf.reserve(errors.size());
    double n = static_cast<double>(errors.size());
    for (std::size_t i = 0; i < errors.size(); ++i)
        cdf.emplace_back(errors[i], static_cast<double>(i + 1) / n);
    return cdf;
}

double exact_missing_fraction(const Matrix& completed, const Matrix& truth,
                              const ObservedMatrix& observed, bool round_to_int) {
    std::vector<double> errors;
    if (round_to_int) {
        Matrix rounded = completed.array().round().matrix();
        errors = missing_abs_errors(rounded, truth, observed);
    } else {
        errors = missing_abs_errors(completed, truth, observed);
    }
    if (errors.empty()) return 1.0;
    Index exact = 0;
    for (double e : errors)
        if (e == 0.0) ++exact;
    return static_cast<double>(exact) / static_cast<double>(errors.size());
}

namespace {

Matrix assemble_highrank(const PipelineResult& res, const ObservedMatrix& observed) {
    Matrix out = Matrix::Zero(observed.n_rows(), observed.n_cols());
    for (const auto& report : res.reports)
        if (report.completed) out.col(report.column) = *report.completed;
    // columns without a completion keep their observations and zeros elsewhere
    observed.for_each_entry([&](Index i, Index j, double v) {
        if (!res.reports[static_cast<std::size_t>(j)].completed) out(i, j) = v;
    });
    return out;
}

struct GeneratorInfo {
    Index n = 0, N = 0, k = 0, r = 0;
};

GeneratorInfo generator_info(const ExperimentSpec& spec) {
    GeneratorInfo gi;
    if (std::holds_alternative<SyntheticConfig>(spec.generator)) {
        const auto& g = std::get<SyntheticConfig>(spec.generator);
        gi = {g.n, g.N, g.k, g.r};
    } else {
        const auto& g = std::get<HopcountConfig>(spec.generator);
        gi = {g.n_monitors, g.n_hosts, g.k_subnets, 2};
    }
    return gi;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    if (spec.sweep.empty()) throw Error("run_experiment: empty sweep grid");
    if (spec.trials < 1) throw Error("run_experiment: trials must be >= 1");
    ExperimentResult result;
    result.tolerances = spec.tolerances;
    GeneratorInfo gi = generator_info(spec);

    for (std::size_t si = 0; si < spec.sweep.size(); ++si) {
        double sweep_value = spec.sweep[si];
        double p0 = spec.sweep_is_p0 ? sweep_value
                                     : sweep_value / static_cast<double>(gi.n);
        if (!(p0 > 0.0 && p0 <= 1.0))
            throw Error("run_experiment: sweep point yields p0 outside (0, 1]");

        for (Index trial = 0; trial < spec.trials; ++trial) {
            Rng gen_rng = make_rng(spec.master_seed, 1000 + si,
                                   static_cast<std::uint64_t>(trial));
            GroundTruth truth;
            if (std::holds_alternative<SyntheticConfig>(spec.generator))
                truth = gen_union_of_subspaces(std::get<SyntheticConfig>(spec.generator),
                                               gen_rng);
            else
                truth = gen_hopcount_matrix(std::get<HopcountConfig>(spec.generator),
                                            gen_rng);
            Rng mask_rng = make_rng(spec.master_seed, 2000 + si,
                                    static_cast<std::uint64_t>(trial));
            ObservedMatrix observed = apply_bernoulli_mask(truth, p0, mask_rng);

            for (Method method : spec.methods) {
                TrialRecord rec;
                rec.method = method;
                rec.sweep_value = sweep_value;
                rec.trial = trial;
                rec.total_columns = gi.N;
                auto t0 = std::chrono::steady_clock::now();
                try {
                    Matrix completed;
                    if (method == Method::Highrank) {
                        PipelineParams params = spec.params;
                        params.in.n = gi.n;
                        params.in.N = gi.N;
                        params.in.k = gi.k;
                        params.in.r = gi.r;
                        params.in.p0 = p0;
                        PipelineResult res = complete_matrix(
                            observed, params, spec.pipeline,
                            derive_seed(spec.master_seed, 3000 + si,
                                        static_cast<std::uint64_t>(trial)));
                        completed = assemble_highrank(res, observed);
                    } else {
                        SolverConfig solver = spec.baseline_solver;
                        solver.ascending_rank_search = false;
                        solver.seed = derive_seed(spec.master_seed, 4000 + si,
                                                  static_cast<std::uint64_t>(trial));
                        Index rank = spec.baseline_rank > 0 ? spec.baseline_rank
                                                            : gi.k * gi.r;
                        completed = complete_lowrank(observed, rank, solver).completed;
                    }
                    for (double tol : spec.tolerances)
                        rec.correct_per_tol.push_back(
                            score_columns(completed, truth.full, tol));
                    rec.exact_missing_fraction = exact_missing_fraction(
                        completed, truth.full, observed, spec.integer_rounding);
                    auto& pool =
                        result.missing_errors[{to_string(method), sweep_value}];
                    Matrix scored = spec.integer_rounding
                                        ? Matrix(completed.array().round().matrix())
                                        : completed;
                    for (double e : missing_abs_errors(scored, truth.full, observed))
                        pool.push_back(e);
                } catch (const std::exception& ex) {
                    rec.failed = true;
                    rec.error = ex.what();
                    rec.correct_per_tol.assign(spec.tolerances.size(), 0);
                }
                rec.runtime_sec = std::chrono::duration<double>(
                                      std::chrono::steady_clock::now() - t0)
                                      .count();
                result.records.push_back(std::move(rec));
            }
        }
    }
    return result;
}

void write_records_csv(const std::string& path, const ExperimentResult& result) {
    std::ostringstream os;
    os << "method,sweep,trial,tolerance,correct_columns,total_columns,"
          "exact_missing_fraction,runtime_sec,failed,error\n";
    for (const auto& rec : result.records) {
        for (std::size_t ti = 0; ti < result.tolerances.size(); ++ti) {
            os << to_string(rec.method) << ',' << format_double(rec.sweep_value) << ','
               << rec.trial << ',' << format_double(result.tolerances[ti]) << ','
               << (ti < rec.correct_per_tol.size() ? rec.correct_per_tol[ti] : 0)
               << ',' << rec.total_columns << ','
               << format_double(rec.exact_missing_fraction) << ','
               << format_double(rec.runtime_sec) << ',' << (rec.failed ? 1 : 0) << ','
               << '"' << rec.error << '"' << '\n';
        }
    }
    atomic_write_text(path, os.str());
}

void write_cdf_csv(const std::string& path, const ExperimentResult& result) {
    std::ostringstream os;
    os << "method,sweep,error,cum_fraction\n";
    for (const auto& [key, errors_in] : result.missing_errors) {
        std::vector<double> errors = errors_in;
        std::sort(errors.begin(), errors.end());
        if (errors.empty()) continue;
        double n = static_cast<double>(errors.size());
        // at most ~1024 quantile points per series
        std::size_t step = std::max<std::size_t>(1, errors.size() / 1024);
        for (std::size_t i = 0; i < errors.size(); i += step)
            os << key.first << ',' << format_double(key.second) << ','
               << format_double(errors[i]) << ','
               << format_double(static_cast<double>(i + 1) / n) << '\n';
        os << key.first << ',' << format_double(key.second) << ','
           << format_double(errors.back()) << ',' << format_double(1.0) << '\n';
    }
    atomic_write_text(path, os.str());
}

namespace {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

void write_line_svg(const std::string& path, const std::string& title,
                    const std::vector<Series>& series) {
    const double width = 640, height = 480, margin = 60;
    double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymax = std::max(ymax, y);
        }
    if (series.empty() || xmin > xmax) {
        xmin = 0;
        xmax = 1;
        ymax = 1;
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    auto sx = [&](double x) {
        return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin);
    };
    auto sy = [&](double y) {
        return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin);
    };
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";
    // axes
    os << "<path d=\"M " << margin << ' ' << margin << " L " << margin << ' '
       << height - margin << " L " << width - margin << ' ' << height - margin
       << "\" stroke=\"black\" fill=\"none\"/>\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", xmin);
    os << "<text x=\"" << margin << "\" y=\"" << height - margin + 18
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", xmax);
    os << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 18
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << buf
       << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", ymax);
    os << "<text x=\"" << margin - 6 << "\" y=\"" << margin
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << buf
       << "</text>\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        if (s.points.empty()) continue;
        os << "<path d=\"";
        for (std::size_t i = 0; i < s.points.size(); ++i)
            os << (i == 0 ? "M " : "L ") << sx(s.points[i].first) << ' '
               << sy(s.points[i].second) << ' ';
        os << "\" stroke=\"" << colors[si % 4] << "\" fill=\"none\" stroke-width=\"1.5\"/>\n";
        os << "<text x=\"" << width - margin - 4 << "\" y=\""
           << margin + 16 * static_cast<double>(si + 1)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
           << colors[si % 4] << "\">" << s.name << "</text>\n";
    }
    os << "</svg>\n";
    atomic_write_text(path, os.str());
}

}  // namespace

void write_sweep_svg(const std::string& path, const ExperimentResult& result,
                     std::size_t tol_index) {
    std::map<std::string, std::map<double, std::pair<double, Index>>> agg;
    for (const auto& rec : result.records) {
        if (rec.failed || tol_index >= rec.correct_per_tol.size()) continue;
        auto& cell = agg[to_string(rec.method)][rec.sweep_value];
        cell.first += static_cast<double>(rec.correct_per_tol[tol_index]);
        cell.second += 1;
    }
    std::vector<Series> series;
    for (const auto& [name, by_sweep] : agg) {
        Series s{name, {}};
        for (const auto& [sweep, cell] : by_sweep)
            s.points.emplace_back(sweep, cell.first / static_cast<double>(cell.second));
        series.push_back(std::move(s));
    }
    std::string title = "correct columns vs sweep";
    if (tol_index < result.tolerances.size()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " (tol %.3g)", result.tolerances[tol_index]);
        title += buf;
    }
    write_line_svg(path, title, series);
}

void write_cdf_svg(const std::string& path, const ExperimentResult& result) {
    std::vector<Series> series;
    for (const auto& [key, errors_in] : result.missing_errors) {
        std::vector<double> errors = errors_in;
        std::sort(errors.begin(), errors.end());
        if (errors.empty()) continue;
        Series s{key.first, {}};
        double n = static_cast<double>(errors.size());
        std::size_t step = std::max<std::size_t>(1, errors.size() / 512);
        for (std::size_t i = 0; i < errors.size(); i += step)
            s.points.emplace_back(errors[i], static_cast<double>(i + 1) / n);
        s.points.emplace_back(errors.back(), 1.0);
        series.push_back(std::move(s));
    }
    write_line_svg(path, "missing-entry error CDF", series);
}

}  // namespace hrmc
