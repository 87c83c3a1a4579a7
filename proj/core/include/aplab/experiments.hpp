#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aplab/process.hpp"
#include "aplab/rules.hpp"
#include "aplab/stitch.hpp"

namespace aplab {

// Long-form numeric table: named columns, double-valued rows.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
    std::size_t column(std::string_view name) const;  // throws if missing
    double at(std::size_t row, std::string_view name) const;
};

// Self-contained experiment result: the verdict is a pure function of the
// stored measurements and the echoed configuration.
struct ExperimentReport {
    std::string id;
    std::string config_json;  // resolved configuration echo
    Table table;
    std::vector<std::pair<std::string, double>> fitted;
    std::string verdict;  // PASS | FAIL | OPEN
    std::vector<std::string> notes;

    double fitted_value(std::string_view name) const;  // throws if missing
    bool has_fitted(std::string_view name) const;
};

// Least-squares line y = intercept + slope*x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// ---- blow-up / percolation scans --------------------------------------

struct BlowupOptions {
    std::vector<std::uint64_t> n_grid;  // increasing
    double t_max = 1.04;
    double t_step = 0.02;
    std::uint32_t reps = 6;
    double threshold_exponent = 0.25;  // susceptibility threshold n^exponent
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

// Smallest grid time at which the mean susceptibility crosses the
// size-dependent threshold, per n; the largest n gives the estimate.
// Verdict checks the crossing against [1/(ell(ell-1)) - step, 1 + step].
ExperimentReport detect_blowup(const Rule& rule, const BlowupOptions& opt);

struct ScanL1Options {
    std::vector<std::uint64_t> n_grid;
    double t_max = 1.04;
    double t_step = 0.02;
    std::uint32_t reps = 6;
    double cutoff = 0.05;  // giant fraction defining the crossing
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

// Crossing of mean L1/n over the cutoff (sensitivity also reported at 0.02
// and 0.10). Same seeds as detect_blowup produce the same trajectories.
ExperimentReport scan_l1(const Rule& rule, const ScanL1Options& opt);

// ---- tail fitting -------------------------------------------------------

struct TailProfile {
    std::uint64_t n = 0;
    // (k, N_{>=k}) at the occupied sizes, ascending k
    std::vector<std::pair<std::uint32_t, std::uint64_t>> n_geq;
};

TailProfile tail_profile(const Snapshot& snap, std::uint64_t n);

enum class TailModel : std::uint8_t { Exponential, Polynomial };

struct TailFitOptions {
    TailModel model = TailModel::Exponential;
    std::uint32_t k_min = 1;
    std::uint32_t k_max = 0;  // 0: no upper limit
    std::uint32_t exclude_top = 2;  // drop the largest occupied bins
    double envelope_factor = 2.0;   // verdict: no bin may exceed fit * factor
};

// Least squares of log N_{>=k} against k (exponential) or log k
// (polynomial). fitted: rate (a or x), amplitude, r_squared; verdict
// compares the observed profile against the fitted envelope.
ExperimentReport tail_fit(const TailProfile& profile, const TailFitOptions& opt);

// Smallest constant C with N_{>=k} <= C k^{-x} n on 1 <= k <= k_max.
double tail_envelope_constant(const TailProfile& profile, double exponent, std::uint32_t k_max);

// ---- concentration ------------------------------------------------------

struct ConcentrationOptions {
    double t = 0.3;
    std::vector<std::uint64_t> n_grid;
    std::uint32_t reps = 200;
    std::uint32_t k_max = 1;  // exponent fitted for each k = 1..k_max
    double slack = 0.15;      // exponent must land in [0.5-slack, 0.5+slack]
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

// Scaling exponent of sd(N_k) across the n grid.
ExperimentReport concentration_check(const Rule& rule, const ConcentrationOptions& opt);

// ---- limit vs simulation ------------------------------------------------

struct CompareRhoOptions {
    double t = 0.3;
    std::vector<std::uint64_t> n_grid;
    std::uint32_t sim_reps = 50;
    std::uint64_t bp_samples = 200000;  // evaluation samples at t
    StitchOptions stitch;               // per-stage estimation parameters
    double tolerance = 0.02;            // total-variation target at the largest n
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

// Total-variation distance between the mean empirical N_k/n and the
// stitched idealized law at time t, per n. Verdict requires the distance
// to shrink with n and to land under the tolerance at the largest n.
ExperimentReport compare_rho(const Rule& rule, const CompareRhoOptions& opt);

// ---- delayed percolation --------------------------------------------------

struct DelayedOptions {
    std::uint32_t r = 3;
    double delta = 0.01;
    std::vector<std::uint64_t> n_grid;
    std::uint32_t reps = 50;
    double growth_min = 2.0;    // required median-S factor per decade of n
    double giant_floor = 0.01;  // control-arm L1/n floor at the largest n
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

// Switch-at-n/2 rule: median susceptibility at the switch grows with n
// while the median giant fraction shortly after the switch shrinks; the
// control arm keeps adding uniform pairs instead and must retain a giant.
ExperimentReport delayed_percolation(const DelayedOptions& opt);

struct TailPreservationOptions {
    std::uint32_t r = 3;
    double delta = 0.01;
    std::uint64_t n = 100000;
    std::uint32_t reps = 100;
    double exponent = 0.5;         // polynomial tail exponent of the seed
    double envelope_factor = 2.0;  // post-switch envelope N_{>=k} <= f*C k^-x n
    double hold_min = 0.95;        // fraction of reps that must hold
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

// From the critical uniform seed, delta*n minimum-sum steps must leave the
// polynomial tail within its doubled envelope for all k up to n^(1/3).
ExperimentReport tail_preservation(const TailPreservationOptions& opt);

// ---- cycle structure ------------------------------------------------------

struct CycleCheckOptions {
    double t = 0.3;
    std::vector<std::uint64_t> n_grid;
    std::uint32_t reps = 100;
    std::uint32_t size_limit = 0;  // 0: ceil(log(n)^2) per n
    double delta_exponent = 0.2;   // unicyclic envelope U^2 n^(2*delta)
    double zero_complex_min = 0.99;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

// For acyclic rules below blow-up: no small complex components in almost
// every rep, and few vertices on small unicyclic components. Non-acyclic
// rules are rejected up front.
ExperimentReport cycle_check(const Rule& rule, const CycleCheckOptions& opt);

}  // namespace aplab
