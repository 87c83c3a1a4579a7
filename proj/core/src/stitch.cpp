#include "aplab/stitch.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "aplab/parallel.hpp"

namespace aplab {

double RhoEstimate::stderr_at(std::uint32_t k) const {
    if (samples == 0) return 0.0;
    const double p = pmf.mass(k);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
}

RhoEstimate estimate_rho(const Rule& rule, const SizePmf& phi, double t, const RhoOptions& opt,
                         std::uint64_t seed) {
    if (opt.samples == 0) throw std::invalid_argument("estimate_rho: need at least one sample");
    phi.validate(1e-6);

    const unsigned workers = std::max(1u, opt.workers);
    const std::uint64_t samples = opt.samples;

    struct WorkerTally {
        std::vector<std::uint64_t> counts;  // counts[k], k <= cap
        std::uint64_t truncated = 0;
        std::uint64_t degenerate = 0;
        double sum_k = 0.0;
        double sum_k2 = 0.0;
    };
    std::vector<WorkerTally> tallies(workers);

    // samples are split into contiguous blocks; sample s always draws from
    // stream (seed, s), so the tally is invariant under the worker count
    const std::uint64_t block = (samples + workers - 1) / workers;
    parallel_for(workers, workers, [&](std::size_t w) {
        const std::uint64_t begin = w * block;
        const std::uint64_t end = std::min(samples, begin + block);
        if (begin >= end) return;
        WorkerTally& tally = tallies[w];
        BpSampler sampler(phi, t, rule.arity(), opt.cap);
        ComponentEvaluator evaluator(rule);
        ReconstructedTuples rec;
        std::vector<std::uint32_t> scratch;
        for (std::uint64_t s = begin; s < end; ++s) {
            RngStream rng(seed, s);
            const ExplorationTree& tree = sampler.sample(rng);
            if (tree.truncated) {
                ++tally.truncated;
                continue;
            }
            reconstruct_into(tree, rec, scratch);
            if (rec.degenerate) {
                ++tally.degenerate;
                continue;
            }
            const std::uint64_t k = evaluator.eval(rec, rng);
            if (k >= tally.counts.size()) tally.counts.resize(k + 1, 0);
            ++tally.counts[k];
            const auto kd = static_cast<double>(k);
            tally.sum_k += kd;
            tally.sum_k2 += kd * kd;
        }
    });

    std::size_t max_k = 0;
    for (const auto& tally : tallies) max_k = std::max(max_k, tally.counts.size());
    std::vector<std::uint64_t> counts(max_k, 0);
    std::uint64_t truncated = 0, degenerate = 0;
    double sum_k = 0.0, sum_k2 = 0.0;
    for (const auto& tally : tallies) {
        for (std::size_t k = 0; k < tally.counts.size(); ++k) counts[k] += tally.counts[k];
        truncated += tally.truncated;
        degenerate += tally.degenerate;
        sum_k += tally.sum_k;
        sum_k2 += tally.sum_k2;
    }

    std::vector<std::pair<std::uint32_t, std::uint64_t>> bins;
    for (std::size_t k = 1; k < counts.size(); ++k)
        if (counts[k] > 0) bins.emplace_back(static_cast<std::uint32_t>(k), counts[k]);

    RhoEstimate est;
    est.samples = samples;
    est.pmf = SizePmf::from_counts(bins, samples);
    est.truncated_mass = static_cast<double>(truncated) / static_cast<double>(samples);
    est.degenerate_mass = static_cast<double>(degenerate) / static_cast<double>(samples);
    const auto ns = static_cast<double>(samples);
    est.chi = sum_k / ns;
    const double var = std::max(0.0, sum_k2 / ns - est.chi * est.chi);
    est.chi_stderr = std::sqrt(var / ns);
    return est;
}

std::uint32_t StitchResult::stage_for(double t) const {
    if (t < 0.0) throw std::out_of_range("stitch: t must be >= 0");
    for (const auto& stage : stages)
        if (t <= stage.t_end + 1e-12) return stage.index;
    throw std::out_of_range("stitch: t beyond the stitched range");
}

RhoEstimate StitchResult::rho_at(double t) const { return rho_at(t, options.samples); }

RhoEstimate StitchResult::rho_at(double t, std::uint64_t samples) const {
    const std::uint32_t idx = stage_for(t);
    const StitchStage& stage = stages[idx - 1];
    const double local = std::min(std::max(t - stage.t_start, 0.0), stage.delta);
    RhoOptions opt;
    opt.samples = samples;
    opt.cap = options.cap;
    opt.workers = options.workers;
    const std::uint64_t eval_seed =
        hash_combine(hash_combine(seed, 0xE7A1u), std::bit_cast<std::uint64_t>(t));
    return estimate_rho(rule, stage.phi, local, opt, eval_seed);
}

StitchResult stitch(const Rule& rule, double t_target, const StitchOptions& opt,
                    std::uint64_t seed) {
    if (t_target < 0.0) throw std::invalid_argument("stitch: t_target must be >= 0");
    if (opt.gamma <= 0.0 || opt.gamma > 1.0)
        throw std::invalid_argument("stitch: gamma must be in (0,1]");

    StitchResult result;
    result.rule = rule;
    result.options = opt;
    result.seed = seed;
    result.t_target = t_target;

    const std::uint32_t ell = rule.arity();
    SizePmf phi = SizePmf::delta(1);
    double cum_t = 0.0;

    for (std::uint32_t j = 1;; ++j) {
        if (j > opt.max_stages)
            throw StitchError(j, "stage limit reached before t_target or exhaustion");

        const double chi_start = phi.chi();
        const double big_l = chi_start + 1.0;
        const double delta = stage_delta(ell, big_l, opt.gamma);
        if (delta < opt.delta_floor) {
            result.exhausted = true;
            break;
        }

        RhoOptions rho_opt;
        rho_opt.samples = opt.samples;
        rho_opt.cap = opt.cap;
        rho_opt.workers = opt.workers;
        const std::uint64_t stage_seed = hash_combine(seed, j);
        const RhoEstimate est = estimate_rho(rule, phi, delta, rho_opt, stage_seed);

        if (est.truncated_mass + est.degenerate_mass > opt.truncation_budget)
            throw StitchError(j, "unattributed mass " +
                                     std::to_string(est.truncated_mass + est.degenerate_mass) +
                                     " exceeds the budget; raise the cap or lower gamma");

        StitchStage stage;
        stage.index = j;
        stage.chi_start = chi_start;
        stage.big_l = big_l;
        stage.delta = delta;
        stage.t_start = cum_t;
        cum_t += delta;
        stage.t_end = cum_t;
        stage.chi_end = est.chi;
        stage.chi_stderr = est.chi_stderr;
        stage.truncated_mass = est.truncated_mass;
        stage.phi = phi;
        stage.rho_end = est.pmf.normalized();
        result.stages.push_back(stage);

        phi = result.stages.back().rho_end;
        if (cum_t >= t_target) {
            result.reached_target = true;
            break;
        }
    }
    result.t_stop = cum_t;
    return result;
}

}  // namespace aplab
