#include <doctest.h>

#include <cmath>
#include <vector>

#include "aplab/experiments.hpp"
#include "oracles.hpp"

using namespace aplab;

TEST_CASE("line fit recovers an exact line") {
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{3, 5, 7, 9};
    const LineFit fit = fit_line(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("blow-up scan brackets the uniform-pair threshold") {
    BlowupOptions opt;
    opt.n_grid = {10000, 30000};
    opt.reps = 4;
    opt.seed = 3;
    const ExperimentReport report = detect_blowup(Rule::er(), opt);
    CHECK(report.verdict == "PASS");
    const double t_hat = report.fitted_value("t_hat");
    CHECK(t_hat > 0.40);
    CHECK(t_hat < 0.60);
}

TEST_CASE("blow-up scan sees the all-edges rule diverge early") {
    BlowupOptions opt;
    opt.n_grid = {10000, 30000};
    opt.reps = 4;
    opt.seed = 5;
    const ExperimentReport report = detect_blowup(Rule::join_all(4), opt);
    CHECK(report.verdict == "PASS");
    const double t_hat = report.fitted_value("t_hat");
    // the idealized curve 1/(1-12t) crosses any slow threshold close to 1/12
    CHECK(t_hat >= 1.0 / 12 - 0.02);
    CHECK(t_hat < 0.16);
}

TEST_CASE("giant scan lands near the pair-process threshold and after blow-up") {
    ScanL1Options l1;
    l1.n_grid = {10000, 30000};
    l1.reps = 4;
    l1.seed = 3;
    const ExperimentReport giant = scan_l1(Rule::er(), l1);
    CHECK(giant.verdict == "PASS");
    const double t_c = giant.fitted_value("t_hat");
    CHECK(t_c > 0.44);
    CHECK(t_c < 0.62);

    BlowupOptions blowup;
    blowup.n_grid = l1.n_grid;
    blowup.reps = l1.reps;
    blowup.seed = l1.seed;
    const double t_chi = detect_blowup(Rule::er(), blowup).fitted_value("t_hat");
    CHECK(t_chi <= t_c + blowup.t_step + 1e-12);
}

TEST_CASE("tail fit is exact on synthetic profiles") {
    TailProfile geometric;
    geometric.n = 1u << 20;
    for (std::uint32_t k = 1; k <= 16; ++k)
        geometric.n_geq.emplace_back(k, geometric.n >> k);
    TailFitOptions opt;
    opt.exclude_top = 0;
    const ExperimentReport report = tail_fit(geometric, opt);
    CHECK(report.verdict == "PASS");
    CHECK(report.fitted_value("rate") == doctest::Approx(std::log(2.0)).epsilon(1e-9));
    CHECK(report.fitted_value("r_squared") == doctest::Approx(1.0));

    TailProfile poly;
    poly.n = 1000000;
    for (std::uint32_t k = 1; k <= 64; ++k)
        poly.n_geq.emplace_back(
            k, static_cast<std::uint64_t>(poly.n / std::sqrt(static_cast<double>(k))));
    TailFitOptions popt;
    popt.model = TailModel::Polynomial;
    popt.exclude_top = 0;
    const ExperimentReport preport = tail_fit(poly, popt);
    CHECK(preport.fitted_value("rate") == doctest::Approx(0.5).epsilon(0.01));

    TailProfile tiny;
    tiny.n = 10;
    tiny.n_geq.emplace_back(1, 10);
    CHECK_THROWS_AS(tail_fit(tiny, opt), std::invalid_argument);
}

TEST_CASE("critical uniform-pair tail fits the half-power law") {
    RunConfig cfg;
    cfg.n = 100000;
    cfg.rule = Rule::er();
    cfg.steps = cfg.n / 2;
    cfg.seed = 14;
    cfg.with_census = false;
    const StatsSeries series = run(cfg);
    TailFitOptions opt;
    opt.model = TailModel::Polynomial;
    opt.k_min = 2;
    opt.k_max = 46;  // n^(1/3)
    const ExperimentReport report = tail_fit(tail_profile(series.snapshots.back(), cfg.n), opt);
    CHECK(report.fitted_value("rate") == doctest::Approx(0.5).epsilon(0.15));
    CHECK(report.fitted_value("r_squared") > 0.99);
}

TEST_CASE("subcritical uniform-pair tail fits an exponential envelope") {
    RunConfig cfg;
    cfg.n = 50000;
    cfg.rule = Rule::er();
    cfg.steps = RunConfig::steps_for_time(0.3, cfg.n);
    cfg.seed = 9;
    cfg.with_census = false;
    const StatsSeries series = run(cfg);
    TailFitOptions opt;
    opt.k_min = 5;  // skip the pre-asymptotic head
    const ExperimentReport report = tail_fit(tail_profile(series.snapshots.back(), cfg.n), opt);
    CHECK(report.verdict == "PASS");
    CHECK(report.fitted_value("rate") > 0.05);
}

TEST_CASE("envelope constant is the maximum of the rescaled suffix counts") {
    TailProfile profile;
    profile.n = 1000;
    profile.n_geq = {{1, 1000}, {3, 120}, {7, 30}};
    // at exponent 1/2 the k=1 bin dominates: max over k of N_{>=k} sqrt(k)/n
    const double c = tail_envelope_constant(profile, 0.5, 7);
    CHECK(c == doctest::Approx(1.0));
    // at exponent 2 the flat stretch up to k=7 wins: 30*49/1000
    const double c_above = tail_envelope_constant(profile, 2.0, 7);
    CHECK(c_above == doctest::Approx(1.47));
}

TEST_CASE("identical seeds give zero spread, distinct seeds the root-n law") {
    ConcentrationOptions opt;
    opt.t = 0.3;
    opt.n_grid = {4000, 16000};
    opt.reps = 60;
    opt.seed = 9;
    const ExperimentReport report = concentration_check(Rule::er(), opt);
    const double exponent = report.fitted_value("exponent_k1");
    CHECK(exponent > 0.2);
    CHECK(exponent < 0.8);
    CHECK((report.verdict == "PASS" || report.verdict == "FAIL"));
}

TEST_CASE("simulated histogram meets the closed-form cluster law head on") {
    // mean N_k/n for the uniform pair process vs the Borel pmf, total variation
    const std::uint64_t n = 100000;
    const double t = 0.25;
    const int reps = 20;
    std::map<std::uint32_t, double> mean;
    for (int rep = 0; rep < reps; ++rep) {
        RunConfig cfg;
        cfg.n = n;
        cfg.rule = Rule::er();
        cfg.steps = RunConfig::steps_for_time(t, n);
        cfg.seed = 2024;
        cfg.stream = rep;
        cfg.with_census = false;
        const StatsSeries series = run(cfg);
        for (const auto& [k, comps] : series.snapshots.back().components_by_size)
            mean[k] += static_cast<double>(k) * comps / static_cast<double>(n) / reps;
    }
    double tv = 0;
    for (std::uint32_t k = 1; k <= 60; ++k) {
        const auto it = mean.find(k);
        const double m = it == mean.end() ? 0.0 : it->second;
        tv += std::abs(m - oracle::borel_pmf(k, t));
        if (it != mean.end()) mean.erase(it);
    }
    for (const auto& [k, m] : mean) tv += m;
    tv *= 0.5;
    CHECK(tv < 0.01);
}

TEST_CASE("compare_rho at time zero is exact") {
    // zero steps leave every vertex isolated and every sampled tree a bare
    // root, so both sides are the point mass at 1
    CompareRhoOptions opt;
    opt.t = 0.0;
    opt.n_grid = {1000, 4000};
    opt.sim_reps = 5;
    opt.bp_samples = 20000;
    opt.stitch.samples = 20000;
    opt.seed = 61;
    const ExperimentReport report = compare_rho(Rule::product(), opt);
    CHECK(report.fitted_value("tv_final") == 0.0);
}

TEST_CASE("compare_rho at the origin and against the Borel law") {
    CompareRhoOptions opt;
    opt.t = 0.25;
    opt.n_grid = {5000, 20000};
    opt.sim_reps = 20;
    opt.bp_samples = 100000;
    opt.stitch.samples = 60000;
    opt.seed = 31;
    const ExperimentReport report = compare_rho(Rule::er(), opt);
    const double tv_final = report.fitted_value("tv_final");
    CHECK(tv_final < 0.03);

    // the idealized side alone against the closed form
    StitchOptions sopt;
    sopt.samples = 100000;
    const StitchResult limit = stitch(Rule::er(), 0.25, sopt, 33);
    const RhoEstimate rho = limit.rho_at(0.25, 100000);
    for (std::uint32_t k = 1; k <= 4; ++k)
        CHECK(std::abs(rho.pmf.mass(k) - oracle::borel_pmf(k, 0.25)) <
              5 * rho.stderr_at(k) + 0.002);
}

TEST_CASE("delayed percolation at desk scale") {
    DelayedOptions opt;
    opt.n_grid = {4000, 40000};
    opt.reps = 20;
    opt.growth_min = 1.5;  // loose at these sizes; the acceptance run uses 2
    opt.seed = 41;
    const ExperimentReport report = delayed_percolation(opt);
    const double s_small = report.table.at(0, "median_S_switch");
    const double s_large = report.table.at(1, "median_S_switch");
    CHECK(s_large > s_small);
    const double g_small = report.table.at(0, "median_giant_after");
    const double g_large = report.table.at(1, "median_giant_after");
    CHECK(g_large < g_small);
    CHECK(report.fitted_value("control_giant_median") > 0.005);
}

TEST_CASE("tail preservation holds at desk scale") {
    TailPreservationOptions opt;
    opt.n = 20000;
    opt.reps = 30;
    opt.seed = 43;
    const ExperimentReport report = tail_preservation(opt);
    CHECK(report.fitted_value("hold_fraction") >= 0.8);
    CHECK(report.fitted_value("k_max") == doctest::Approx(std::floor(std::cbrt(20000.0))));
}

TEST_CASE("cycle census verdicts and rejection of cyclic rules") {
    CycleCheckOptions opt;
    opt.t = 0.3;
    opt.n_grid = {30000};
    opt.reps = 30;
    opt.zero_complex_min = 0.9;
    opt.seed = 47;
    const ExperimentReport report = cycle_check(Rule::er(), opt);
    CHECK(report.verdict == "PASS");
    CHECK_THROWS_AS(cycle_check(Rule::join_all(3), opt), std::invalid_argument);
}

TEST_CASE("experiment reports are independent of the worker count") {
    BlowupOptions opt;
    opt.n_grid = {5000};
    opt.reps = 4;
    opt.seed = 77;
    opt.workers = 1;
    const ExperimentReport serial = detect_blowup(Rule::product(), opt);
    opt.workers = 3;
    const ExperimentReport threaded = detect_blowup(Rule::product(), opt);
    CHECK(serial.table.rows == threaded.table.rows);
    CHECK(serial.fitted == threaded.fitted);
    CHECK(serial.verdict == threaded.verdict);
}

TEST_CASE("verdicts are recomputable from the stored table") {
    BlowupOptions opt;
    opt.n_grid = {10000};
    opt.reps = 3;
    opt.seed = 51;
    const ExperimentReport report = detect_blowup(Rule::er(), opt);

    // re-derive the crossing from the stored rows alone
    double crossing = -1;
    for (std::size_t row = 0; row < report.table.rows.size(); ++row) {
        if (crossing < 0 &&
            report.table.at(row, "mean_S") >= report.table.at(row, "threshold"))
            crossing = report.table.at(row, "t");
    }
    CHECK(crossing == report.fitted_value("t_hat"));
    const bool pass = crossing >= report.fitted_value("bracket_lo") &&
                      crossing <= report.fitted_value("bracket_hi");
    CHECK((pass ? "PASS" : "FAIL") == report.verdict);
}
