#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "hrmc/bench.hpp"
#include "hrmc/datagen.hpp"
#include "hrmc/matrix_io.hpp"
#include "hrmc/params.hpp"
#include "hrmc/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::uint64_t seed = 0;
    hrmc::Index threads = 0;
    bool explain = false;
};

struct PipelineOpts {
    hrmc::Index k = 0;
    hrmc::Index r = 0;
    double mu0 = 1.0, mu1 = 1.0, nu0 = 0.5, beta = 1.5;
    double eps0 = 0.0;  // 0 = keep the theory default
    double p0 = 0.0;    // 0 = estimate from the observed density
    hrmc::Index s0_override = 0, l0_override = 0, t0_override = 0;
    double eta0_override = 0.0;
    hrmc::Index neighborhood_size = 0;
    bool no_thinning = false;
    double assign_tol = 1e-8;
    double containment_tol = 1e-6;
};

struct SolverOpts {
    double tol = 1e-6;
    hrmc::Index max_iter = 500;
    hrmc::Index restarts = 5;
    std::string backend = "als";
};

void add_solver_options(CLI::App* cmd, SolverOpts& o) {
    cmd->add_option("--mc-tol", o.tol, "exact-fit tolerance, relative to observed RMS")
        ->capture_default_str();
    cmd->add_option("--mc-max-iter", o.max_iter, "completion iterations per restart")
        ->capture_default_str();
    cmd->add_option("--mc-restarts", o.restarts, "completion restarts per rank")
        ->capture_default_str();
    cmd->add_option("--mc-backend", o.backend, "completion backend")
        ->check(CLI::IsMember({"als", "grassmann"}))
        ->capture_default_str();
}

hrmc::SolverConfig make_solver(const SolverOpts& o) {
    hrmc::SolverConfig cfg;
    cfg.exact_tol = o.tol;
    cfg.max_iterations = o.max_iter;
    cfg.max_restarts = o.restarts;
    cfg.backend = o.backend == "grassmann" ? hrmc::SolverBackend::Grassmann
                                           : hrmc::SolverBackend::Als;
    return cfg;
}

void add_pipeline_options(CLI::App* cmd, PipelineOpts& o) {
    cmd->add_option("-k,--subspaces", o.k, "number of subspaces")->required();
    cmd->add_option("-r,--rank", o.r, "maximum subspace dimension")->required();
    cmd->add_option("--mu0", o.mu0, "subspace coherence bound")->capture_default_str();
    cmd->add_option("--mu1", o.mu1, "column coherence bound")->capture_default_str();
    cmd->add_option("--nu0", o.nu0, "subspace representation constant")
        ->capture_default_str();
    cmd->add_option("--beta", o.beta, "confidence exponent (> 1)")
        ->capture_default_str();
    cmd->add_option("--eps0", o.eps0,
                    "separation radius; also used as the data-scale "
                    "neighborhood radius");
    cmd->add_option("--p0", o.p0,
                    "per-entry observation probability (default: estimated "
                    "from the observed density)");
    cmd->add_option("--s0", o.s0_override, "override: number of seeds");
    cmd->add_option("--l0", o.l0_override, "override: pool factor ell0");
    cmd->add_option("--t0", o.t0_override, "override: required seed-support overlap");
    cmd->add_option("--eta0", o.eta0_override,
                    "override: required observations per seed");
    cmd->add_option("--neighborhood-size", o.neighborhood_size,
                    "override: columns per local neighborhood (default n)");
    cmd->add_flag("--no-thinning", o.no_thinning,
                  "disable the neighborhood thinning correction");
    cmd->add_option("--assign-tol", o.assign_tol,
                    "residual acceptance threshold, relative to ||x_Omega||^2")
        ->capture_default_str();
    cmd->add_option("--containment-tol", o.containment_tol,
                    "containment tolerance for subspace refinement")
        ->capture_default_str();
}

hrmc::PipelineParams make_params(const PipelineOpts& o, hrmc::Index n, hrmc::Index N,
                                 double observed_density) {
    hrmc::ParamInputs in;
    in.n = n;
    in.N = N;
    in.k = o.k;
    in.r = o.r;
    in.mu0 = o.mu0;
    in.mu1 = o.mu1;
    in.nu0 = o.nu0;
    in.beta = o.beta;
    if (o.eps0 > 0.0 && o.eps0 < 1.0) in.eps0 = o.eps0;
    in.p0 = o.p0 > 0.0 ? o.p0 : observed_density;
    hrmc::PipelineParams params = hrmc::derive_params(in);
    if (o.eps0 > 0.0) params.eps0_override = o.eps0;
    if (o.s0_override > 0) params.seed_count_override = o.s0_override;
    if (o.l0_override > 0) params.ell0_override = o.l0_override;
    if (o.t0_override > 0) params.t0_override = o.t0_override;
    if (o.eta0_override > 0.0) params.eta0_override = o.eta0_override;
    if (o.neighborhood_size > 0)
        params.neighborhood_size_override = o.neighborhood_size;
    params.thinning_enabled = !o.no_thinning;
    return params;
}

void print_warnings(const hrmc::PipelineParams& params) {
    for (const auto& w : params.warnings) std::cout << "warning: " << w << "\n";
}

json params_to_json(const hrmc::PipelineParams& p) {
    json j;
    j["n"] = p.in.n;
    j["N"] = p.in.N;
    j["k"] = p.in.k;
    j["r"] = p.in.r;
    j["mu0"] = p.in.mu0;
    j["mu1"] = p.in.mu1;
    j["nu0"] = p.in.nu0;
    j["eps0"] = p.in.eps0;
    j["beta"] = p.in.beta;
    j["p0"] = p.in.p0;
    j["delta0"] = p.delta0;
    j["s0"] = p.s0;
    j["ell0"] = p.ell0;
    j["t0"] = p.t0;
    j["eta0"] = p.eta0;
    j["p0_min"] = p.p0_min;
    j["thinning"] = p.thinning_enabled;
    j["effective"] = {{"s0", p.effective_s0()},
                      {"ell0", p.effective_ell0()},
                      {"t0", p.effective_t0()},
                      {"eta0", p.effective_eta0()},
                      {"eps0", p.effective_eps0()},
                      {"neighborhood_size", p.effective_neighborhood_size()}};
    j["warnings"] = p.warnings;
    return j;
}

void maybe_explain(const CLI::App& app, const CommonOpts& common) {
    if (!common.explain) return;
    for (const CLI::App* sub : app.get_subcommands()) {
        std::cout << "# effective configuration for '" << sub->get_name() << "'\n";
        std::cout << sub->config_to_str(true, true);
    }
}

int run_params(const PipelineOpts& po, hrmc::Index n, hrmc::Index N) {
    hrmc::PipelineParams p = make_params(po, n, N, po.p0 > 0 ? po.p0 : 0.5);
    auto line = [](const char* name, const std::string& value) {
        std::printf("%-14s %s\n", name, value.c_str());
    };
    line("delta0", hrmc::format_double(p.delta0));
    line("s0", std::to_string(p.s0));
    line("ell0", std::to_string(p.ell0));
    line("t0", std::to_string(p.t0));
    line("eta0", hrmc::format_double(p.eta0));
    line("p0_min", hrmc::format_double(p.p0_min));
    line("N_min", hrmc::format_double(p.n_min_main));
    line("N_min_alt", hrmc::format_double(p.n_min_refined));
    line("mc_prob_bound", hrmc::format_double(p.mc_prob_bound));
    if (p.seed_count_override)
        line("s0_override", std::to_string(*p.seed_count_override));
    print_warnings(p);
    return 0;
}

std::string status_csv_field(const hrmc::CompletionReport& r) {
    if (r.assigned_subspace) return std::to_string(*r.assigned_subspace);
    return "";
}

int run_complete(const std::string& input, const std::string& outdir,
                 const PipelineOpts& po, const SolverOpts& so,
                 const CommonOpts& common) {
    hrmc::ObservedMatrix observed = hrmc::read_observed(input);
    double density =
        static_cast<double>(observed.nnz()) /
        (static_cast<double>(observed.n_rows()) * static_cast<double>(observed.n_cols()));
    hrmc::PipelineParams params =
        make_params(po, observed.n_rows(), observed.n_cols(), density);
    if (po.p0 <= 0.0)
        std::cout << "note: p0 estimated from observed density: "
                  << hrmc::format_double(density) << "\n";
    print_warnings(params);

    hrmc::PipelineConfig cfg;
    cfg.solver = make_solver(so);
    cfg.assign_tol = po.assign_tol;
    cfg.containment_tol = po.containment_tol;
    cfg.threads = common.threads;

    hrmc::PipelineResult result =
        hrmc::complete_matrix(observed, params, cfg, common.seed);

    // assembled dense output: observed entries verbatim, imputed elsewhere
    hrmc::Matrix completed = hrmc::Matrix::Zero(observed.n_rows(), observed.n_cols());
    for (const auto& rep : result.reports)
        if (rep.completed) completed.col(rep.column) = *rep.completed;
    observed.for_each_entry([&](hrmc::Index i, hrmc::Index j, double v) {
        if (!result.reports[static_cast<std::size_t>(j)].completed) completed(i, j) = v;
    });

    fs::create_directories(outdir);
    hrmc::write_dense((fs::path(outdir) / "completed.txt").string(), completed);

    std::ostringstream report;
    report << "column,status,assigned_subspace,n_observed";
    for (std::size_t s = 0; s < result.subspaces.size(); ++s) report << ",res_" << s;
    report << "\n";
    for (const auto& rep : result.reports) {
        report << rep.column << ',' << hrmc::to_string(rep.status) << ','
               << status_csv_field(rep) << ',' << rep.n_observed;
        for (double res : rep.residuals) report << ',' << hrmc::format_double(res);
        report << "\n";
    }
    hrmc::atomic_write_text((fs::path(outdir) / "report.csv").string(), report.str());

    for (std::size_t s = 0; s < result.subspaces.size(); ++s) {
        char name[32];
        std::snprintf(name, sizeof name, "subspace_%02zu.txt", s);
        hrmc::write_dense((fs::path(outdir) / name).string(),
                          result.subspaces[s].basis());
    }

    json summary;
    summary["command"] = "complete";
    summary["input"] = input;
    summary["seed"] = common.seed;
    summary["params"] = params_to_json(params);
    summary["subspace_dims"] = result.diagnostics.subspace_dims;
    summary["seeds"] = {{"requested", result.diagnostics.seeds_requested},
                        {"selected", result.diagnostics.seeds_selected},
                        {"discarded", result.diagnostics.seeds_discarded}};
    summary["candidates"] = {{"found", result.diagnostics.candidates_found},
                             {"pruned", result.diagnostics.candidates_pruned}};
    summary["statuses"] = result.diagnostics.status_counts;
    summary["timings_ms"] = {{"select", result.diagnostics.timings.select_ms},
                             {"neighborhoods", result.diagnostics.timings.neighborhoods_ms},
                             {"completion", result.diagnostics.timings.completion_ms},
                             {"refine", result.diagnostics.timings.refine_ms},
                             {"assign", result.diagnostics.timings.assign_ms}};
    hrmc::atomic_write_text((fs::path(outdir) / "summary.json").string(),
                            summary.dump(2) + "\n");

    hrmc::Index completed_count = 0;
    for (const auto& rep : result.reports)
        if (rep.status == hrmc::ColumnStatus::Completed) ++completed_count;
    std::cout << "completed " << completed_count << "/" << observed.n_cols()
              << " columns with " << result.subspaces.size() << " subspaces\n";
    return completed_count == observed.n_cols() ? 0 : 2;
}

int run_complete_lowrank(const std::string& input, const std::string& outdir,
                         hrmc::Index rank, bool fixed_rank, const SolverOpts& so,
                         const CommonOpts& common) {
    hrmc::ObservedMatrix observed = hrmc::read_observed(input);
    hrmc::SolverConfig cfg = make_solver(so);
    cfg.seed = common.seed;
    cfg.ascending_rank_search = !fixed_rank;
    hrmc::CompletionResult result = hrmc::complete_lowrank(observed, rank, cfg);
    fs::create_directories(outdir);
    hrmc::write_dense((fs::path(outdir) / "completed.txt").string(), result.completed);
    json summary;
    summary["command"] = "complete-lowrank";
    summary["input"] = input;
    summary["rank_bound"] = rank;
    summary["rank"] = result.basis.dim();
    summary["observed_rmse"] = result.observed_rmse;
    summary["converged"] = result.converged;
    summary["iterations"] = result.iterations;
    hrmc::atomic_write_text((fs::path(outdir) / "summary.json").string(),
                            summary.dump(2) + "\n");
    std::cout << "rank " << result.basis.dim() << ", observed rmse "
              << hrmc::format_double(result.observed_rmse)
              << (result.converged ? " (exact fit)" : " (no exact fit)") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hrmc: completion of matrices whose columns lie in a union of "
                 "low-rank subspaces"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file");
    app.allow_config_extras(CLI::config_extras_mode::error);

    CommonOpts common;
    app.add_option("--seed", common.seed, "master RNG seed")
        ->envname("UOS_SEED")
        ->capture_default_str();
    app.add_option("--threads", common.threads, "worker thread cap (0 = auto)")
        ->capture_default_str();
    app.add_flag("--explain", common.explain,
                 "print the effective configuration, including defaults");

    // --- params ---
    auto* cmd_params = app.add_subcommand("params", "derive and print the pipeline parameters");
    PipelineOpts params_po;
    hrmc::Index params_n = 100, params_N = 5000;
    cmd_params->add_option("-n,--rows", params_n, "ambient dimension")->required();
    cmd_params->add_option("-N,--cols", params_N, "number of columns")
        ->capture_default_str();
    add_pipeline_options(cmd_params, params_po);

    // --- generate ---
    auto* cmd_gen = app.add_subcommand("generate", "generate a ground-truth instance and mask");
    std::string gen_model = "synthetic", gen_prefix;
    hrmc::SyntheticConfig syn;
    hrmc::HopcountConfig hop;
    double gen_p0 = 0.5;
    cmd_gen->add_option("--model", gen_model, "generator")
        ->check(CLI::IsMember({"synthetic", "hopcount", "hopcount-graph"}))
        ->capture_default_str();
    cmd_gen->add_option("-n,--rows", syn.n, "rows / monitors")->capture_default_str();
    cmd_gen->add_option("-N,--cols", syn.N, "columns / hosts")->capture_default_str();
    cmd_gen->add_option("-k,--subspaces", syn.k, "subspaces / subnets")
        ->capture_default_str();
    cmd_gen->add_option("-r,--rank", syn.r, "subspace dimension (synthetic)")
        ->capture_default_str();
    cmd_gen->add_option("--min-angle", syn.min_principal_angle,
                        "minimum pairwise principal angle (synthetic)")
        ->capture_default_str();
    cmd_gen->add_option("--border-min", hop.border_hop_min, "hop-count range (direct)")
        ->capture_default_str();
    cmd_gen->add_option("--border-max", hop.border_hop_max, "hop-count range (direct)")
        ->capture_default_str();
    cmd_gen->add_option("--offset-min", hop.offset_min, "host offset range")
        ->capture_default_str();
    cmd_gen->add_option("--offset-max", hop.offset_max, "host offset range")
        ->capture_default_str();
    cmd_gen->add_option("--routers", hop.graph_routers, "router count (graph backend)")
        ->capture_default_str();
    cmd_gen->add_option("--p0", gen_p0, "observation probability")
        ->capture_default_str();
    cmd_gen->add_option("-o,--output", gen_prefix, "output path prefix")->required();

    // --- complete ---
    auto* cmd_complete = app.add_subcommand("complete", "run the full completion pipeline");
    std::string complete_in, complete_out;
    PipelineOpts complete_po;
    SolverOpts complete_so;
    cmd_complete->add_option("-i,--input", complete_in, "observed matrix file")
        ->required();
    cmd_complete->add_option("-o,--output", complete_out, "output directory")
        ->required();
    add_pipeline_options(cmd_complete, complete_po);
    add_solver_options(cmd_complete, complete_so);

    // --- complete-lowrank ---
    auto* cmd_lowrank = app.add_subcommand(
        "complete-lowrank", "baseline: plain rank-bounded completion");
    std::string lowrank_in, lowrank_out;
    hrmc::Index lowrank_rank = 0;
    bool lowrank_fixed = false;
    SolverOpts lowrank_so;
    cmd_lowrank->add_option("-i,--input", lowrank_in, "observed matrix file")
        ->required();
    cmd_lowrank->add_option("-o,--output", lowrank_out, "output directory")
        ->required();
    cmd_lowrank->add_option("--rank", lowrank_rank, "rank bound")->required();
    cmd_lowrank->add_flag("--fixed-rank", lowrank_fixed,
                          "fit the rank bound directly instead of searching "
                          "ranks ascending");
    add_solver_options(cmd_lowrank, lowrank_so);

    // --- bench ---
    auto* cmd_bench = app.add_subcommand("bench", "experiment harness with CSV/SVG output");
    std::string bench_experiment = "synthetic", bench_out;
    std::vector<double> bench_spc, bench_p0_grid, bench_tols{1e-5, 0.01};
    std::vector<std::string> bench_methods{"highrank", "lowrank-baseline"};
    hrmc::Index bench_trials = 1, bench_baseline_rank = 0;
    bool bench_svg = false, bench_rounding = false;
    PipelineOpts bench_po;
    SolverOpts bench_so;
    cmd_bench->add_option("--experiment", bench_experiment, "generator")
        ->check(CLI::IsMember({"synthetic", "hopcount", "hopcount-graph"}))
        ->capture_default_str();
    cmd_bench->add_option("-n,--rows", syn.n, "rows / monitors")->capture_default_str();
    cmd_bench->add_option("-N,--cols", syn.N, "columns / hosts")->capture_default_str();
    cmd_bench->add_option("--spc", bench_spc, "sweep: average observations per column")
        ->delimiter(',');
    cmd_bench->add_option("--p0-grid", bench_p0_grid, "sweep: observation probabilities")
        ->delimiter(',');
    cmd_bench->add_option("--tols", bench_tols, "correctness tolerances")
        ->delimiter(',')
        ->capture_default_str();
    cmd_bench->add_option("--methods", bench_methods, "methods to run")
        ->delimiter(',')
        ->check(CLI::IsMember({"highrank", "lowrank-baseline"}));
    cmd_bench->add_option("--trials", bench_trials, "independent trials per sweep point")
        ->capture_default_str();
    cmd_bench->add_option("--baseline-rank", bench_baseline_rank,
                          "baseline rank bound (default k*r)");
    cmd_bench->add_flag("--svg", bench_svg, "also write SVG plots");
    cmd_bench->add_flag("--integer-rounding", bench_rounding,
                        "score exactness after rounding to integers "
                        "(default for hop counts)");
    cmd_bench->add_option("-o,--output", bench_out, "output directory")->required();
    add_pipeline_options(cmd_bench, bench_po);
    add_solver_options(cmd_bench, bench_so);

    CLI11_PARSE(app, argc, argv);
    maybe_explain(app, common);

    try {
        if (app.got_subcommand(cmd_params)) {
            return run_params(params_po, params_n, params_N);
        }
        if (app.got_subcommand(cmd_gen)) {
            hrmc::Rng rng(common.seed);
            hrmc::GroundTruth truth;
            if (gen_model == "synthetic") {
                truth = hrmc::gen_union_of_subspaces(syn, rng);
            } else {
                hop.n_monitors = syn.n;
                hop.n_hosts = syn.N;
                hop.k_subnets = syn.k;
                hop.backend = gen_model == "hopcount-graph"
                                  ? hrmc::HopcountConfig::Backend::Graph
                                  : hrmc::HopcountConfig::Backend::Direct;
                truth = hrmc::gen_hopcount_matrix(hop, rng);
            }
            hrmc::Rng mask_rng = hrmc::make_rng(common.seed, 1);
            hrmc::ObservedMatrix observed =
                hrmc::apply_bernoulli_mask(truth, gen_p0, mask_rng);
            hrmc::write_dense(gen_prefix + ".truth.txt", truth.full);
            hrmc::write_labels(gen_prefix + ".labels.txt", truth.labels);
            hrmc::write_observed(gen_prefix + ".observed.txt", observed);
            std::cout << "wrote " << gen_prefix << ".{truth,labels,observed}.txt ("
                      << truth.model << ", " << observed.nnz() << "/"
                      << truth.full.size() << " entries observed)\n";
            return 0;
        }
        if (app.got_subcommand(cmd_complete)) {
            return run_complete(complete_in, complete_out, complete_po, complete_so,
                                common);
        }
        if (app.got_subcommand(cmd_lowrank)) {
            return run_complete_lowrank(lowrank_in, lowrank_out, lowrank_rank,
                                        lowrank_fixed, lowrank_so, common);
        }
        if (app.got_subcommand(cmd_bench)) {
            hrmc::ExperimentSpec spec;
            syn.k = bench_po.k;
            syn.r = bench_po.r;
            hop.k_subnets = bench_po.k;
            if (bench_experiment == "synthetic") {
                spec.generator = syn;
            } else {
                hop.n_monitors = syn.n;
                hop.n_hosts = syn.N;
                hop.k_subnets = syn.k;
                hop.backend = bench_experiment == "hopcount-graph"
                                  ? hrmc::HopcountConfig::Backend::Graph
                                  : hrmc::HopcountConfig::Backend::Direct;
                spec.generator = hop;
                spec.integer_rounding = true;
            }
            if (bench_rounding) spec.integer_rounding = true;
            if (!bench_p0_grid.empty()) {
                spec.sweep = bench_p0_grid;
                spec.sweep_is_p0 = true;
            } else if (!bench_spc.empty()) {
                spec.sweep = bench_spc;
            } else {
                spec.sweep = {20, 30, 40, 50, 60, 80, 120, 200, 400};
            }
            spec.methods.clear();
            for (const auto& m : bench_methods)
                spec.methods.push_back(m == "highrank" ? hrmc::Method::Highrank
                                                       : hrmc::Method::LowrankBaseline);
            spec.tolerances = bench_tols;
            spec.trials = bench_trials;
            spec.master_seed = common.seed;
            spec.baseline_rank = bench_baseline_rank;
            spec.params = make_params(
                bench_po,
                bench_experiment == "synthetic" ? syn.n : hop.n_monitors,
                bench_experiment == "synthetic" ? syn.N : hop.n_hosts, 0.5);
            spec.pipeline.solver = make_solver(bench_so);
            spec.pipeline.assign_tol = bench_po.assign_tol;
            spec.pipeline.containment_tol = bench_po.containment_tol;
            spec.pipeline.threads = common.threads;
            spec.baseline_solver = make_solver(bench_so);
            hrmc::ExperimentResult result = hrmc::run_experiment(spec);
            fs::create_directories(bench_out);
            hrmc::write_records_csv((fs::path(bench_out) / "results.csv").string(),
                                    result);
            hrmc::write_cdf_csv((fs::path(bench_out) / "cdf.csv").string(), result);
            if (bench_svg) {
                hrmc::write_sweep_svg((fs::path(bench_out) / "sweep.svg").string(),
                                      result);
                hrmc::write_cdf_svg((fs::path(bench_out) / "cdf.svg").string(), result);
            }
            hrmc::Index failures = 0;
            for (const auto& rec : result.records)
                if (rec.failed) ++failures;
            std::cout << "ran " << result.records.size() << " method-trials, "
                      << failures << " failed; results in " << bench_out << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
