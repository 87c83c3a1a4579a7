// aplab: command-line laboratory for l-vertex random graph processes.
// Simulation runs, branching-process limits, and the experiment suite.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aplab/experiments.hpp"
#include "aplab/io.hpp"
#include "aplab/parallel.hpp"
#include "aplab/process.hpp"
#include "aplab/stitch.hpp"

namespace {

using namespace aplab;

int g_exit_code = 0;

void note_verdict(const ExperimentReport& report) {
    std::cout << "VERDICT " << report.id << " " << report.verdict << "\n";
    if (report.verdict == "FAIL") g_exit_code = std::max(g_exit_code, 2);
}

void write_artifact(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << content;
}

std::string render_series(const StatsSeries& series, const std::string& format) {
    if (format == "json") return series_to_json(series);
    std::ostringstream os;
    write_series_csv(os, series);
    return os.str();
}

std::string render_report(const ExperimentReport& report, const std::string& format) {
    if (format == "json") return report_to_json(report);
    std::ostringstream os;
    write_report_csv(os, report);
    return os.str();
}

std::vector<std::uint64_t> parse_u64_list(const std::string& text) {
    std::vector<std::uint64_t> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(std::stoull(item));
    return values;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
    return values;
}

struct CommonOpts {
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
    unsigned workers = default_worker_count();

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "master seed; all randomness derives from it");
        cmd->add_option("--out", out, "output path (stdout if omitted)");
        cmd->add_option("--format", format, "output format: csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--workers", workers,
                        "worker threads (default: APLAB_WORKERS or hardware)");
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aplab: l-vertex random graph process laboratory"};
    app.require_subcommand(1);

    // ---- run ----
    auto* cmd_run = app.add_subcommand("run", "discrete-step process run");
    struct {
        std::string rule = "er";
        std::uint64_t n = 100000;
        std::uint64_t steps = 0;
        double t = -1.0;
        std::string snap_steps, snap_times;
        std::string sampling = "iid", duplicates = "count";
        std::uint32_t census_limit = 0;
        std::string config_path;
        std::string tail_fit_model;
        std::uint32_t tail_kmin = 5;
        std::uint32_t tail_kmax = 0;
        CommonOpts common;
    } run_opts;
    cmd_run->add_option("--rule", run_opts.rule, "rule name, e.g. product or r_sum:r=3");
    cmd_run->add_option("--n", run_opts.n, "vertex count");
    cmd_run->add_option("--steps", run_opts.steps, "number of steps");
    cmd_run->add_option("--t", run_opts.t, "run to floor(t*n) steps instead of --steps");
    cmd_run->add_option("--snap-steps", run_opts.snap_steps, "snapshot steps, comma separated");
    cmd_run->add_option("--snap-t", run_opts.snap_times, "snapshot times, comma separated");
    cmd_run->add_option("--sampling", run_opts.sampling, "iid or distinct")
        ->check(CLI::IsMember({"iid", "distinct"}));
    cmd_run->add_option("--duplicates", run_opts.duplicates, "count or ignore")
        ->check(CLI::IsMember({"count", "ignore"}));
    cmd_run->add_option("--census-limit", run_opts.census_limit,
                        "cycle census size limit (0: (log n)^2)");
    cmd_run->add_option("--config", run_opts.config_path,
                        "JSON run config (overrides the flags above except --out/--format)");
    cmd_run->add_option("--tail-fit", run_opts.tail_fit_model,
                        "fit the final snapshot's N_{>=k} tail: exponential or polynomial")
        ->check(CLI::IsMember({"exponential", "polynomial"}));
    cmd_run->add_option("--tail-kmin", run_opts.tail_kmin, "fit window lower end");
    cmd_run->add_option("--tail-kmax", run_opts.tail_kmax, "fit window upper end (0: none)");
    run_opts.common.attach(cmd_run);

    // ---- poisson ----
    auto* cmd_poisson = app.add_subcommand("poisson", "continuous-time run (Poisson step count)");
    struct {
        std::string rule = "er";
        std::uint64_t n = 100000;
        double t = 0.25;
        CommonOpts common;
    } poisson_opts;
    cmd_poisson->add_option("--rule", poisson_opts.rule, "rule name");
    cmd_poisson->add_option("--n", poisson_opts.n, "vertex count");
    cmd_poisson->add_option("--t", poisson_opts.t, "time horizon; steps ~ Poisson(t*n)");
    poisson_opts.common.attach(cmd_poisson);

    // ---- rho ----
    auto* cmd_rho = app.add_subcommand("rho", "branching-process component-size law at one time");
    struct {
        std::string rule = "er";
        std::uint32_t ell = 0;
        double t = 0.25;
        std::uint64_t samples = 1000000;
        std::uint64_t cap = 100000;
        std::string pmf_path;
        CommonOpts common;
    } rho_opts;
    cmd_rho->add_option("--rule", rho_opts.rule, "size rule");
    cmd_rho->add_option("--ell", rho_opts.ell, "expected arity; checked against the rule");
    cmd_rho->add_option("--t", rho_opts.t, "time");
    cmd_rho->add_option("--samples", rho_opts.samples, "Monte Carlo samples");
    cmd_rho->add_option("--cap", rho_opts.cap, "vertex-node budget per tree");
    cmd_rho->add_option("--pmf", rho_opts.pmf_path, "root-size pmf JSON (default: point mass at 1)");
    rho_opts.common.attach(cmd_rho);

    // ---- stitch ----
    auto* cmd_stitch = app.add_subcommand("stitch", "interval-stitched law out to a target time");
    struct {
        std::string rule = "er";
        std::uint32_t ell = 0;
        double t = 0.4;
        std::uint64_t samples = 200000;
        std::uint64_t cap = 100000;
        double gamma = 1.0;
        double floor = 1e-3;
        std::string curve;
        std::string curve_out;
        CommonOpts common;
    } stitch_opts;
    cmd_stitch->add_option("--rule", stitch_opts.rule, "size rule");
    cmd_stitch->add_option("--ell", stitch_opts.ell, "expected arity; checked against the rule");
    cmd_stitch->add_option("--t", stitch_opts.t, "target time");
    cmd_stitch->add_option("--samples", stitch_opts.samples, "samples per stage");
    cmd_stitch->add_option("--cap", stitch_opts.cap, "vertex-node budget per tree");
    cmd_stitch->add_option("--gamma", stitch_opts.gamma, "stage-length safety factor in (0,1]");
    cmd_stitch->add_option("--floor", stitch_opts.floor, "stop once a stage would be shorter");
    cmd_stitch->add_option("--curve", stitch_opts.curve,
                           "also evaluate s_hat at these times, comma separated");
    cmd_stitch->add_option("--curve-out", stitch_opts.curve_out, "path for the s_hat curve CSV");
    stitch_opts.common.attach(cmd_stitch);

    // ---- scan ----
    auto* cmd_scan = app.add_subcommand("scan", "susceptibility blow-up and giant-component scans");
    struct {
        std::string rule = "er";
        std::string n_grid = "20000,50000";
        double t_max = 1.04, t_step = 0.02;
        std::uint32_t reps = 6;
        double threshold_exp = 0.25, cutoff = 0.05;
        bool with_concentration = false;
        double conc_t = 0.3;
        std::uint32_t conc_reps = 200;
        std::uint32_t conc_k = 1;
        CommonOpts common;
    } scan_opts;
    cmd_scan->add_option("--rule", scan_opts.rule, "rule name");
    cmd_scan->add_option("--n-grid,--n", scan_opts.n_grid, "increasing vertex counts, comma separated");
    cmd_scan->add_option("--t-max", scan_opts.t_max, "largest grid time");
    cmd_scan->add_option("--t-step", scan_opts.t_step, "grid resolution");
    cmd_scan->add_option("--reps", scan_opts.reps, "replicas per cell");
    cmd_scan->add_option("--threshold-exp", scan_opts.threshold_exp,
                         "susceptibility threshold n^exp");
    cmd_scan->add_option("--cutoff", scan_opts.cutoff, "giant fraction cutoff");
    cmd_scan->add_flag("--with-concentration", scan_opts.with_concentration,
                       "also fit the sd(N_k) scaling exponent over the n grid");
    cmd_scan->add_option("--conc-t", scan_opts.conc_t, "time for the concentration check");
    cmd_scan->add_option("--conc-reps", scan_opts.conc_reps, "replicas for the concentration check");
    cmd_scan->add_option("--conc-k", scan_opts.conc_k, "largest component size k to check");
    scan_opts.common.attach(cmd_scan);

    // ---- delayed ----
    auto* cmd_delayed = app.add_subcommand("delayed", "delayed percolation protocol");
    struct {
        std::uint32_t r = 3;
        double delta = 0.01;
        std::string n_grid = "10000,100000,1000000";
        std::uint32_t reps = 50;
        std::uint64_t tail_n = 100000;
        std::uint32_t tail_reps = 100;
        double growth_min = 2.0;
        double giant_floor = 0.01;
        CommonOpts common;
    } delayed_opts;
    cmd_delayed->add_option("--r", delayed_opts.r, "sum-rule parameter (2r vertices)");
    cmd_delayed->add_option("--delta", delayed_opts.delta, "post-switch step fraction");
    cmd_delayed->add_option("--n-grid,--n", delayed_opts.n_grid, "vertex counts");
    cmd_delayed->add_option("--reps", delayed_opts.reps, "replicas per size");
    cmd_delayed->add_option("--tail-n", delayed_opts.tail_n, "size for the tail-envelope check");
    cmd_delayed->add_option("--tail-reps", delayed_opts.tail_reps, "replicas for the tail check");
    cmd_delayed->add_option("--growth-min", delayed_opts.growth_min,
                            "required median-S factor per decade");
    cmd_delayed->add_option("--giant-floor", delayed_opts.giant_floor,
                            "control-arm L1/n floor at the largest n");
    delayed_opts.common.attach(cmd_delayed);

    // ---- cycles ----
    auto* cmd_cycles = app.add_subcommand("cycles", "cycle-structure census for an acyclic rule");
    struct {
        std::string rule = "er";
        double t = 0.3;
        std::string n_grid = "100000";
        std::uint32_t reps = 100;
        std::uint32_t size_limit = 0;
        double delta_exp = 0.2;
        CommonOpts common;
    } cycles_opts;
    cmd_cycles->add_option("--rule", cycles_opts.rule, "acyclic rule");
    cmd_cycles->add_option("--t", cycles_opts.t, "time");
    cmd_cycles->add_option("--n-grid,--n", cycles_opts.n_grid, "vertex counts");
    cmd_cycles->add_option("--reps", cycles_opts.reps, "replicas per size");
    cmd_cycles->add_option("--u", cycles_opts.size_limit, "census size limit (0: (log n)^2)");
    cmd_cycles->add_option("--delta-exp", cycles_opts.delta_exp, "unicyclic envelope exponent");
    cycles_opts.common.attach(cmd_cycles);

    // ---- compare ----
    auto* cmd_compare = app.add_subcommand("compare", "simulation vs stitched law (TV distance)");
    struct {
        std::string rule = "product";
        double t = 0.3;
        std::string n_grid = "10000,100000";
        std::uint32_t sim_reps = 50;
        std::uint64_t bp_samples = 200000;
        std::uint64_t stitch_samples = 200000;
        std::uint64_t cap = 100000;
        double tol = 0.02;
        CommonOpts common;
    } compare_opts;
    cmd_compare->add_option("--rule", compare_opts.rule, "size rule");
    cmd_compare->add_option("--t", compare_opts.t, "time");
    cmd_compare->add_option("--n-grid,--n", compare_opts.n_grid, "vertex counts");
    cmd_compare->add_option("--sim-reps", compare_opts.sim_reps, "simulation replicas per size");
    cmd_compare->add_option("--samples", compare_opts.bp_samples, "evaluation samples at t");
    cmd_compare->add_option("--stitch-samples", compare_opts.stitch_samples, "samples per stage");
    cmd_compare->add_option("--cap", compare_opts.cap, "vertex-node budget per tree");
    cmd_compare->add_option("--tol", compare_opts.tol, "TV tolerance at the largest n");
    compare_opts.common.attach(cmd_compare);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_run) {
            RunConfig cfg;
            if (!run_opts.config_path.empty()) {
                std::ifstream is(run_opts.config_path);
                if (!is) throw std::runtime_error("cannot read config: " + run_opts.config_path);
                std::stringstream buffer;
                buffer << is.rdbuf();
                cfg = run_config_from_json(buffer.str());
            } else {
                cfg.rule = Rule::parse(run_opts.rule);
                cfg.n = run_opts.n;
                cfg.steps = run_opts.t >= 0 ? RunConfig::steps_for_time(run_opts.t, run_opts.n)
                                            : run_opts.steps;
                if (!run_opts.snap_steps.empty())
                    cfg.snapshot_steps = parse_u64_list(run_opts.snap_steps);
                for (const double t : parse_double_list(run_opts.snap_times))
                    cfg.snapshot_steps.push_back(RunConfig::steps_for_time(t, cfg.n));
                cfg.seed = run_opts.common.seed;
                cfg.sampling = run_opts.sampling == "distinct" ? TupleSampling::Distinct
                                                               : TupleSampling::Iid;
                cfg.duplicates = run_opts.duplicates == "ignore" ? DuplicateEdges::Ignore
                                                                 : DuplicateEdges::Count;
                cfg.census_limit = run_opts.census_limit;
            }
            const StatsSeries series = run(cfg);
            write_artifact(run_opts.common.out, render_series(series, run_opts.common.format));
            if (!run_opts.tail_fit_model.empty()) {
                TailFitOptions fit_opt;
                fit_opt.model = run_opts.tail_fit_model == "polynomial" ? TailModel::Polynomial
                                                                        : TailModel::Exponential;
                fit_opt.k_min = run_opts.tail_kmin;
                fit_opt.k_max = run_opts.tail_kmax;
                const ExperimentReport fit =
                    tail_fit(tail_profile(series.snapshots.back(), cfg.n), fit_opt);
                note_verdict(fit);
                std::cout << "tail_fit rate=" << format_double(fit.fitted_value("rate"))
                          << " amplitude=" << format_double(fit.fitted_value("amplitude"))
                          << " r_squared=" << format_double(fit.fitted_value("r_squared")) << "\n";
            }
        } else if (*cmd_poisson) {
            const StatsSeries series = run_poisson(Rule::parse(poisson_opts.rule), poisson_opts.n,
                                                   poisson_opts.t, poisson_opts.common.seed);
            write_artifact(poisson_opts.common.out,
                           render_series(series, poisson_opts.common.format));
        } else if (*cmd_rho) {
            SizePmf phi = SizePmf::delta(1);
            if (!rho_opts.pmf_path.empty()) {
                std::ifstream is(rho_opts.pmf_path);
                if (!is) throw std::runtime_error("cannot read pmf: " + rho_opts.pmf_path);
                std::stringstream buffer;
                buffer << is.rdbuf();
                phi = pmf_from_json(buffer.str());
            }
            const Rule rule = Rule::parse(rho_opts.rule);
            if (rho_opts.ell != 0 && rho_opts.ell != rule.arity())
                throw std::runtime_error("--ell does not match the rule's arity");
            RhoOptions opt;
            opt.samples = rho_opts.samples;
            opt.cap = rho_opts.cap;
            opt.workers = rho_opts.common.workers;
            const RhoEstimate est = estimate_rho(rule, phi, rho_opts.t, opt, rho_opts.common.seed);
            const std::string echo = "{\"rule\":\"" + rule.name() + "\",\"t\":" +
                                     format_double(rho_opts.t) + ",\"samples\":" +
                                     std::to_string(opt.samples) + ",\"cap\":" +
                                     std::to_string(opt.cap) + ",\"seed\":" +
                                     std::to_string(rho_opts.common.seed) + "}";
            write_artifact(rho_opts.common.out, rho_to_json(est, echo));
        } else if (*cmd_stitch) {
            const Rule rule = Rule::parse(stitch_opts.rule);
            if (stitch_opts.ell != 0 && stitch_opts.ell != rule.arity())
                throw std::runtime_error("--ell does not match the rule's arity");
            StitchOptions opt;
            opt.samples = stitch_opts.samples;
            opt.cap = stitch_opts.cap;
            opt.gamma = stitch_opts.gamma;
            opt.delta_floor = stitch_opts.floor;
            opt.workers = stitch_opts.common.workers;
            const StitchResult result = stitch(rule, stitch_opts.t, opt, stitch_opts.common.seed);
            std::ostringstream os;
            write_stitch_csv(os, result);
            write_artifact(stitch_opts.common.out, os.str());
            std::cout << "stitch: " << result.stages.size() << " stages, t_stop "
                      << format_double(result.t_stop)
                      << (result.exhausted ? " (exhausted)" : "") << "\n";
            if (!stitch_opts.curve.empty()) {
                std::ostringstream curve;
                curve << "# aplab csv v1\n# kind: stitch-curve\n";
                curve << "t,s_hat,chi_stderr\n";
                for (const double t : parse_double_list(stitch_opts.curve)) {
                    const RhoEstimate est = result.rho_at(t);
                    curve << format_double(t) << ',' << format_double(est.chi) << ','
                          << format_double(est.chi_stderr) << "\n";
                }
                write_artifact(stitch_opts.curve_out, curve.str());
            }
        } else if (*cmd_scan) {
            const Rule rule = Rule::parse(scan_opts.rule);
            BlowupOptions blowup;
            blowup.n_grid = parse_u64_list(scan_opts.n_grid);
            blowup.t_max = scan_opts.t_max;
            blowup.t_step = scan_opts.t_step;
            blowup.reps = scan_opts.reps;
            blowup.threshold_exponent = scan_opts.threshold_exp;
            blowup.seed = scan_opts.common.seed;
            blowup.workers = scan_opts.common.workers;
            const ExperimentReport blowup_report = detect_blowup(rule, blowup);
            note_verdict(blowup_report);

            ScanL1Options l1;
            l1.n_grid = blowup.n_grid;
            l1.t_max = scan_opts.t_max;
            l1.t_step = scan_opts.t_step;
            l1.reps = scan_opts.reps;
            l1.cutoff = scan_opts.cutoff;
            l1.seed = scan_opts.common.seed;
            l1.workers = scan_opts.common.workers;
            const ExperimentReport l1_report = scan_l1(rule, l1);
            note_verdict(l1_report);

            std::vector<ExperimentReport> reports{blowup_report, l1_report};
            if (scan_opts.with_concentration) {
                ConcentrationOptions conc;
                conc.t = scan_opts.conc_t;
                conc.n_grid = blowup.n_grid;
                conc.reps = scan_opts.conc_reps;
                conc.k_max = scan_opts.conc_k;
                conc.seed = scan_opts.common.seed;
                conc.workers = scan_opts.common.workers;
                reports.push_back(concentration_check(rule, conc));
                note_verdict(reports.back());
            }

            std::string content;
            if (scan_opts.common.format == "json") {
                content = "[\n";
                for (std::size_t i = 0; i < reports.size(); ++i)
                    content += report_to_json(reports[i]) + (i + 1 < reports.size() ? ",\n" : "\n");
                content += "]\n";
            } else {
                for (const auto& report : reports) content += render_report(report, "csv");
            }
            write_artifact(scan_opts.common.out, content);
        } else if (*cmd_delayed) {
            DelayedOptions opt;
            opt.r = delayed_opts.r;
            opt.delta = delayed_opts.delta;
            opt.n_grid = parse_u64_list(delayed_opts.n_grid);
            opt.reps = delayed_opts.reps;
            opt.growth_min = delayed_opts.growth_min;
            opt.giant_floor = delayed_opts.giant_floor;
            opt.seed = delayed_opts.common.seed;
            opt.workers = delayed_opts.common.workers;
            const ExperimentReport delay_report = delayed_percolation(opt);
            note_verdict(delay_report);

            TailPreservationOptions tail;
            tail.r = delayed_opts.r;
            tail.delta = delayed_opts.delta;
            tail.n = delayed_opts.tail_n;
            tail.reps = delayed_opts.tail_reps;
            tail.seed = hash_combine(delayed_opts.common.seed, 0x7A11u);
            tail.workers = delayed_opts.common.workers;
            const ExperimentReport tail_report = tail_preservation(tail);
            note_verdict(tail_report);

            std::string content;
            if (delayed_opts.common.format == "json") {
                content = "[\n" + report_to_json(delay_report) + ",\n" +
                          report_to_json(tail_report) + "\n]\n";
            } else {
                content = render_report(delay_report, "csv") + render_report(tail_report, "csv");
            }
            write_artifact(delayed_opts.common.out, content);
        } else if (*cmd_cycles) {
            CycleCheckOptions opt;
            opt.t = cycles_opts.t;
            opt.n_grid = parse_u64_list(cycles_opts.n_grid);
            opt.reps = cycles_opts.reps;
            opt.size_limit = cycles_opts.size_limit;
            opt.delta_exponent = cycles_opts.delta_exp;
            opt.seed = cycles_opts.common.seed;
            opt.workers = cycles_opts.common.workers;
            const ExperimentReport report = cycle_check(Rule::parse(cycles_opts.rule), opt);
            note_verdict(report);
            write_artifact(cycles_opts.common.out,
                           render_report(report, cycles_opts.common.format));
        } else if (*cmd_compare) {
            CompareRhoOptions opt;
            opt.t = compare_opts.t;
            opt.n_grid = parse_u64_list(compare_opts.n_grid);
            opt.sim_reps = compare_opts.sim_reps;
            opt.bp_samples = compare_opts.bp_samples;
            opt.stitch.samples = compare_opts.stitch_samples;
            opt.stitch.cap = compare_opts.cap;
            opt.tolerance = compare_opts.tol;
            opt.seed = compare_opts.common.seed;
            opt.workers = compare_opts.common.workers;
            const ExperimentReport report = compare_rho(Rule::parse(compare_opts.rule), opt);
            note_verdict(report);
            write_artifact(compare_opts.common.out,
                           render_report(report, compare_opts.common.format));
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return g_exit_code;
}
