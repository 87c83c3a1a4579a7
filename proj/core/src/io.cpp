#include "aplab/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace aplab {

using nlohmann::json;

std::string format_double(double value) {
    char buf[40];
    // shortest representation that parses back to the same double
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

namespace {

const char* sampling_name(TupleSampling mode) {
    return mode == TupleSampling::Iid ? "iid" : "distinct";
}

const char* duplicates_name(DuplicateEdges mode) {
    return mode == DuplicateEdges::Count ? "count" : "ignore";
}

json config_json(const RunConfig& cfg) {
    return json{{"rule", cfg.rule.name()},
                {"n", cfg.n},
                {"steps", cfg.steps},
                {"snapshot_steps", cfg.snapshot_steps},
                {"seed", cfg.seed},
                {"stream", cfg.stream},
                {"sampling", sampling_name(cfg.sampling)},
                {"duplicates", duplicates_name(cfg.duplicates)},
                {"census_limit", cfg.census_limit},
                {"with_census", cfg.with_census},
                {"record_tuples", cfg.record_tuples}};
}

json census_json(const CycleCensus& census) {
    return json{{"tree_vertices", census.tree_vertices},
                {"unicyclic_vertices", census.unicyclic_vertices},
                {"complex_vertices", census.complex_vertices},
                {"complex_small_count", census.complex_small_count},
                {"size_limit", census.size_limit}};
}

}  // namespace

std::string run_config_to_json(const RunConfig& cfg) { return config_json(cfg).dump(); }

RunConfig run_config_from_json(const std::string& text) {
    const json j = json::parse(text);
    RunConfig cfg;
    cfg.rule = Rule::parse(j.at("rule").get<std::string>());
    cfg.n = j.at("n").get<std::uint64_t>();
    cfg.steps = j.at("steps").get<std::uint64_t>();
    if (j.contains("snapshot_steps"))
        cfg.snapshot_steps = j.at("snapshot_steps").get<std::vector<std::uint64_t>>();
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.stream = j.value("stream", std::uint64_t{0});
    const std::string sampling = j.value("sampling", "iid");
    if (sampling == "iid")
        cfg.sampling = TupleSampling::Iid;
    else if (sampling == "distinct")
        cfg.sampling = TupleSampling::Distinct;
    else
        throw std::invalid_argument("config: unknown sampling mode " + sampling);
    const std::string duplicates = j.value("duplicates", "count");
    if (duplicates == "count")
        cfg.duplicates = DuplicateEdges::Count;
    else if (duplicates == "ignore")
        cfg.duplicates = DuplicateEdges::Ignore;
    else
        throw std::invalid_argument("config: unknown duplicate mode " + duplicates);
    cfg.census_limit = j.value("census_limit", std::uint32_t{0});
    cfg.with_census = j.value("with_census", true);
    cfg.record_tuples = j.value("record_tuples", false);
    return cfg;
}

void write_series_csv(std::ostream& os, const StatsSeries& series) {
    os << "# aplab csv v1\n";
    os << "# kind: series\n";
    os << "# config: " << run_config_to_json(series.config) << "\n";
    os << "step,t,S,L1,k,N_k\n";
    for (const Snapshot& snap : series.snapshots) {
        for (const auto& [k, comps] : snap.components_by_size) {
            os << snap.step << ',' << format_double(snap.t) << ','
               << format_double(snap.susceptibility) << ',' << snap.largest << ',' << k << ','
               << static_cast<std::uint64_t>(k) * comps << "\n";
        }
    }
}

std::string series_to_json(const StatsSeries& series) {
    json snaps = json::array();
    for (const Snapshot& snap : series.snapshots) {
        json hist = json::object();
        for (const auto& [k, comps] : snap.components_by_size)
            hist[std::to_string(k)] = comps;
        snaps.push_back(json{{"step", snap.step},
                             {"t", snap.t},
                             {"S", snap.susceptibility},
                             {"sum_sq", snap.sum_sq},
                             {"L1", snap.largest},
                             {"components_by_size", hist},
                             {"census", census_json(snap.census)}});
    }
    json j{{"config", config_json(series.config)}, {"snapshots", snaps}};
    if (series.tuples) {
        j["tuples"] = json{{"ell", series.tuples->ell}, {"count", series.tuples->count()}};
    }
    return j.dump(2);
}

std::string pmf_to_json(const SizePmf& pmf) {
    json bins = json::object();
    for (const auto& [k, p] : pmf.entries()) bins[std::to_string(k)] = p;
    return json{{"pmf", bins}, {"remainder", pmf.remainder()}}.dump(2);
}

SizePmf pmf_from_json(const std::string& text) {
    const json j = json::parse(text);
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (const auto& [key, value] : j.at("pmf").items())
        entries.emplace_back(static_cast<std::uint32_t>(std::stoul(key)), value.get<double>());
    return SizePmf::from_probabilities(std::move(entries), j.value("remainder", 0.0), 1e-6);
}

std::string rho_to_json(const RhoEstimate& est, const std::string& config_json) {
    json bins = json::object();
    json stderrs = json::object();
    for (const auto& [k, p] : est.pmf.entries()) {
        bins[std::to_string(k)] = p;
        stderrs[std::to_string(k)] = est.stderr_at(k);
    }
    return json{{"config", json::parse(config_json.empty() ? "{}" : config_json)},
                {"pmf", bins},
                {"stderr", stderrs},
                {"remainder", est.pmf.remainder()},
                {"samples", est.samples},
                {"truncated_mass", est.truncated_mass},
                {"degenerate_mass", est.degenerate_mass},
                {"chi", est.chi},
                {"chi_stderr", est.chi_stderr}}
        .dump(2);
}

void write_stitch_csv(std::ostream& os, const StitchResult& result) {
    os << "# aplab csv v1\n";
    os << "# kind: stitch\n";
    os << "# config: "
       << json{{"rule", result.rule.name()},
               {"t_target", result.t_target},
               {"samples", result.options.samples},
               {"cap", result.options.cap},
               {"gamma", result.options.gamma},
               {"delta_floor", result.options.delta_floor},
               {"seed", result.seed}}
              .dump()
       << "\n";
    os << "# t_stop: " << format_double(result.t_stop) << "\n";
    os << "# exhausted: " << (result.exhausted ? "true" : "false") << "\n";
    os << "j,L,delta,t_end,chi,chi_stderr,truncated_mass\n";
    for (const StitchStage& stage : result.stages) {
        os << stage.index << ',' << format_double(stage.big_l) << ','
           << format_double(stage.delta) << ',' << format_double(stage.t_end) << ','
           << format_double(stage.chi_end) << ',' << format_double(stage.chi_stderr) << ','
           << format_double(stage.truncated_mass) << "\n";
    }
}

void write_report_csv(std::ostream& os, const ExperimentReport& report) {
    os << "# aplab csv v1\n";
    os << "# kind: report\n";
    os << "# id: " << report.id << "\n";
    os << "# config: " << report.config_json << "\n";
    os << "# verdict: " << report.verdict << "\n";
    for (std::size_t i = 0; i < report.table.columns.size(); ++i)
        os << (i ? "," : "") << report.table.columns[i];
    os << "\n";
    for (const auto& row : report.table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << "\n";
    }
}

std::string report_to_json(const ExperimentReport& report) {
    json fitted = json::object();
    for (const auto& [key, value] : report.fitted) fitted[key] = value;
    json table = json::array();
    for (const auto& row : report.table.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[report.table.columns[i]] = row[i];
        table.push_back(obj);
    }
    return json{{"id", report.id},
                {"config", json::parse(report.config_json.empty() ? "{}" : report.config_json)},
                {"table", table},
                {"fitted", fitted},
                {"verdict", report.verdict},
                {"notes", report.notes}}
        .dump(2);
}

}  // namespace aplab
