#pragma once

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dirstep/error_metrics.hpp"
#include "dirstep/oracles.hpp"
#include "dirstep/procedures.hpp"
#include "dirstep/simulation.hpp"

namespace dirstep {

// All floating output carries 10 significant digits.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

namespace io {

using nlohmann::json;

inline FamilyLayout layout_from_json(const json& j, std::size_t n) {
    FamilyLayout layout;
    layout.n = n;
    if (!j.is_array()) throw std::invalid_argument("blocks must be an array of index arrays");
    for (const auto& blk : j) {
        layout.blocks.emplace_back();
        for (const auto& v : blk) {
            const long long idx = v.get<long long>();
            if (idx < 1) throw std::invalid_argument("block indices are 1-based");
            layout.blocks.back().push_back(static_cast<std::size_t>(idx - 1));
        }
    }
    if (auto err = validate_layout(layout))
        throw std::invalid_argument("invalid layout: " + *err);
    return layout;
}

inline json layout_to_json(const FamilyLayout& layout) {
    json blocks = json::array();
    for (const auto& blk : layout.blocks) {
        json b = json::array();
        for (std::size_t i : blk) b.push_back(i + 1);
        blocks.push_back(std::move(b));
    }
    return blocks;
}

// Input for a single procedure run: either raw statistics (plus an optional
// distribution tag, default normal) or 2n paired one-sided p-values.
struct RunRequest {
    ProcedureSpec spec;
    std::optional<StatisticVector> stats;
    std::optional<PairedPValues> pvalues;
};

inline RunRequest parse_run_request(const json& j) {
    RunRequest req;
    req.spec.id = procedure_from_name(j.at("procedure").get<std::string>());
    req.spec.alpha = j.at("alpha").get<double>();
    std::size_t n = 0;
    if (j.contains("statistics")) {
        StatisticVector s;
        s.t = j.at("statistics").get<std::vector<double>>();
        s.dist = NullDistribution::from_name(j.value("dist", std::string("normal")));
        validate_statistics(s);
        n = s.t.size();
        req.stats = std::move(s);
    } else if (j.contains("pvalues")) {
        PairedPValues pp;
        pp.p = j.at("pvalues").get<std::vector<double>>();
        validate_paired(pp);
        n = pp.pairs();
        req.pvalues = std::move(pp);
    } else {
        throw std::invalid_argument("run input needs either \"statistics\" or \"pvalues\"");
    }
    if (j.contains("blocks")) req.spec.layout = layout_from_json(j.at("blocks"), n);
    return req;
}

inline PairedPValues request_pvalues(const RunRequest& req) {
    if (req.pvalues) return *req.pvalues;
    return paired_pvalues(*req.stats);
}

inline const char* direction_name(Direction d) {
    switch (d) {
        case Direction::None: return "none";
        case Direction::Positive: return "positive";
        case Direction::Negative: return "negative";
    }
    throw std::invalid_argument("unknown direction");
}

inline Direction direction_from_name(const std::string& s) {
    if (s == "none") return Direction::None;
    if (s == "positive") return Direction::Positive;
    if (s == "negative") return Direction::Negative;
    throw std::invalid_argument("unknown direction: " + s);
}

inline json decision_to_json(const DecisionSet& d, const ProcedureSpec& spec) {
    json out;
    out["procedure"] = procedure_name(spec.id);
    out["alpha"] = spec.alpha;
    out["n"] = d.n;
    out["family"] = family_name(d.family);
    json rej = json::array();
    for (std::size_t idx : d.rejected) rej.push_back(hypothesis_label(d.family, d.n, idx));
    out["rejected"] = std::move(rej);
    out["rejected_count"] = d.rejected_count();
    json dirs = json::array();
    for (Direction dir : d.directions) dirs.push_back(direction_name(dir));
    out["directions"] = std::move(dirs);
    if (spec.layout) out["blocks"] = layout_to_json(*spec.layout);
    return out;
}

inline DecisionSet decision_from_json(const json& j) {
    const Family family = family_from_name(j.at("family").get<std::string>());
    const std::size_t n = j.at("n").get<std::size_t>();
    std::vector<std::size_t> rejected;
    for (const auto& label : j.at("rejected")) {
        const std::string s = label.get<std::string>();
        std::size_t param = 0;
        int kind = 0;
        if (std::sscanf(s.c_str(), "H_%zu_%d", &param, &kind) != 2 || param < 1)
            throw std::invalid_argument("bad hypothesis label: " + s);
        bool found = false;
        for (std::size_t idx = 0; idx < family_size(family, n); ++idx) {
            if (hypothesis_param(family, n, idx) == param - 1 &&
                hypothesis_kind(family, n, idx) == kind) {
                rejected.push_back(idx);
                found = true;
                break;
            }
        }
        if (!found) throw std::invalid_argument("label not in family: " + s);
    }
    DecisionSet d = make_decision_set(family, n, std::move(rejected));
    return d;
}

// Scenario JSON fields: generator, theta, rho, blocks, procedure, alpha,
// reps, seed. A config file holds one scenario object or an array of them.
inline ScenarioConfig parse_scenario(const json& j) {
    ScenarioConfig cfg;
    cfg.generator = generator_from_name(j.at("generator").get<std::string>());
    cfg.theta = j.at("theta").get<std::vector<double>>();
    if (j.contains("rho")) cfg.rho = j.at("rho").get<double>();
    if (j.contains("blocks")) cfg.layout = layout_from_json(j.at("blocks"), cfg.theta.size());
    cfg.procedure = procedure_from_name(j.at("procedure").get<std::string>());
    cfg.alpha = j.at("alpha").get<double>();
    cfg.reps = j.at("reps").get<std::uint64_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    validate_scenario(cfg);
    return cfg;
}

inline json scenario_to_json(const ScenarioConfig& cfg) {
    json j;
    j["generator"] = generator_name(cfg.generator);
    j["theta"] = cfg.theta;
    if (generator_uses_rho(cfg.generator)) j["rho"] = cfg.rho;
    if (cfg.layout) j["blocks"] = layout_to_json(*cfg.layout);
    j["procedure"] = procedure_name(cfg.procedure);
    j["alpha"] = cfg.alpha;
    j["reps"] = cfg.reps;
    j["seed"] = cfg.seed;
    return j;
}

inline std::vector<ScenarioConfig> parse_scenarios(const json& j) {
    std::vector<ScenarioConfig> out;
    if (j.is_array())
        for (const auto& item : j) out.push_back(parse_scenario(item));
    else
        out.push_back(parse_scenario(j));
    if (out.empty()) throw std::invalid_argument("no scenarios in config");
    return out;
}

inline const char* kEstimateCsvHeader = "metric,procedure,scenario,n,alpha,estimate,se,reps,seed";

inline std::string estimate_csv_rows(const SimulationResult& res) {
    std::ostringstream os;
    for (const auto& e : res.estimates) {
        os << metric_name(e.metric) << ',' << procedure_name(res.procedure) << ','
           << generator_name(res.generator) << ',' << res.n << ',' << format_double(res.alpha)
           << ',' << format_double(e.estimate) << ',' << format_double(e.se) << ',' << e.reps
           << ',' << res.seed << '\n';
    }
    return os.str();
}

inline std::string critvals_csv(ScheduleKind kind, std::size_t n, double level) {
    const CriticalSchedule sched = make_schedule(kind, n, level);
    std::ostringstream os;
    os << "kind,n,level,i,c_i\n";
    for (std::size_t i = 0; i < sched.constants.size(); ++i)
        os << schedule_kind_name(kind) << ',' << n << ',' << format_double(level) << ',' << i + 1
           << ',' << format_double(sched.constants[i]) << '\n';
    return os.str();
}

// Record of one CLI invocation: command, where input came from and output
// went, the exact resolved configuration, tool version and a timestamp.
struct RunManifest {
    std::string command;
    std::string input_path;
    std::string output_path;  // empty = stdout
    json resolved_config;
    std::string version;
    std::string timestamp;    // ISO 8601, UTC
};

inline json manifest_to_json(const RunManifest& m) {
    json j;
    j["command"] = m.command;
    j["input"] = m.input_path;
    j["output"] = m.output_path.empty() ? "-" : m.output_path;
    j["config"] = m.resolved_config;
    j["version"] = m.version;
    j["timestamp"] = m.timestamp;
    return j;
}

inline std::string oracle_csv(std::size_t n, double alpha) {
    const double exact = proc1_exact_fwer(n, alpha);
    const double bound = proc1_fwer_bound(n, alpha);
    std::ostringstream os;
    os << "n,alpha,exact_fwer,bound,difference\n";
    os << n << ',' << format_double(alpha) << ',' << format_double(exact) << ','
       << format_double(bound) << ',' << format_double(bound - exact) << '\n';
    return os.str();
}

}  // namespace io
}  // namespace dirstep
