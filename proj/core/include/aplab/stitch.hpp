#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "aplab/exploration.hpp"
#include "aplab/rules.hpp"
#include "aplab/size_pmf.hpp"

namespace aplab {

// Empirical law of the root component size |C^R(BP[phi,t])|, with the mass
// of truncated and degenerate samples accounted separately (never folded
// into a size bin), so pmf bins + remainder always sum to exactly 1.
struct RhoEstimate {
    SizePmf pmf;
    std::uint64_t samples = 0;
    double truncated_mass = 0.0;
    double degenerate_mass = 0.0;
    double chi = 0.0;         // sum k*pmf(k) over attributed bins
    double chi_stderr = 0.0;  // Monte Carlo standard error of chi

    // binomial standard error of one bin
    double stderr_at(std::uint32_t k) const;
};

struct RhoOptions {
    std::uint64_t samples = 200000;
    std::uint64_t cap = 100000;  // vertex-node budget per tree
    unsigned workers = 1;
};

// Monte Carlo estimate of Pr(|C^R(BP[phi,t])| = k). Sample s draws from
// stream (seed, s), so the result is independent of the worker count.
RhoEstimate estimate_rho(const Rule& rule, const SizePmf& phi, double t, const RhoOptions& opt,
                         std::uint64_t seed);

// The interval length the recursion uses at susceptibility bound L.
inline double stage_delta(std::uint32_t ell, double big_l, double gamma = 1.0) {
    return gamma / (static_cast<double>(ell) * static_cast<double>(ell - 1) * (big_l + 1.0));
}

struct StitchStage {
    std::uint32_t index = 1;  // 1-based stage number j
    double chi_start = 1.0;   // chi of the stage input pmf
    double big_l = 2.0;       // L_j = chi_start + 1
    double delta = 0.0;       // stage length
    double t_start = 0.0;
    double t_end = 0.0;
    double chi_end = 1.0;  // chi of the estimated law at the stage end
    double chi_stderr = 0.0;
    double truncated_mass = 0.0;
    SizePmf phi;      // stage input
    SizePmf rho_end;  // normalized stage-end law (next stage's input)
};

struct StitchOptions {
    std::uint64_t samples = 200000;  // Monte Carlo samples per stage
    std::uint64_t cap = 100000;
    double gamma = 1.0;        // optional safety factor multiplying each stage length
    double delta_floor = 1e-3; // stop once the next stage would be shorter
    double truncation_budget = 5e-3;
    std::uint32_t max_stages = 200;
    unsigned workers = 1;
};

class StitchError : public std::runtime_error {
public:
    StitchError(std::uint32_t stage, const std::string& what)
        : std::runtime_error("stitch stage " + std::to_string(stage) + ": " + what),
          stage_(stage) {}
    std::uint32_t stage() const { return stage_; }

private:
    std::uint32_t stage_;
};

// Interval-stitched component-size law: stage j runs the branching-process
// estimate over [0, Delta_j] starting from the previous stage's end law,
// with L_j = chi(previous end) + 1 and Delta_j = 1/(ell(ell-1)(L_j+1)).
// Stitching stops at t_target, or earlier ("exhausted") once Delta falls
// below the floor; the exhaustion point is a lower estimate of the blow-up
// time.
class StitchResult {
public:
    Rule rule = Rule::er();
    StitchOptions options;
    std::uint64_t seed = 0;
    double t_target = 0.0;
    std::vector<StitchStage> stages;
    double t_stop = 0.0;
    bool reached_target = false;
    bool exhausted = false;

    // stage whose interval contains t (1-based index into stages)
    std::uint32_t stage_for(double t) const;

    // law at arbitrary t <= t_stop, re-estimated by Monte Carlo from the
    // containing stage's input pmf; deterministic in (seed, t)
    RhoEstimate rho_at(double t) const;
    RhoEstimate rho_at(double t, std::uint64_t samples) const;

    double susceptibility_at(double t) const { return rho_at(t).chi; }
};

StitchResult stitch(const Rule& rule, double t_target, const StitchOptions& opt,
                    std::uint64_t seed);

}  // namespace aplab
