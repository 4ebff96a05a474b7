// dirstep command-line front end.
//
// Subcommands:
//   critvals <kind> <n> <alpha>   print a critical-constant schedule as CSV
//   run <input.json>              run one procedure, emit a decision as JSON
//   simulate <config.json>        run Monte Carlo scenarios, emit CSV rows
//   oracle <n> <alpha>            closed-form FWER value and bound
//
// Exit codes: 0 success, 1 statistical/assertion failure, 2 usage or parse
// errors.

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dirstep/dirstep.hpp"
#include "dirstep/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << text;
}

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input file: " + path);
    return nlohmann::json::parse(in);
}

std::string utc_timestamp() {
    char buf[32];
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const std::string& manifest_path, const std::string& command,
                    const std::string& input_path, const std::string& out_path,
                    nlohmann::json resolved_config) {
    if (manifest_path.empty()) return;
    dirstep::io::RunManifest m;
    m.command = command;
    m.input_path = input_path;
    m.output_path = out_path;
    m.resolved_config = std::move(resolved_config);
    m.version = dirstep::kVersion;
    m.timestamp = utc_timestamp();
    std::ofstream out(manifest_path);
    if (!out) throw std::runtime_error("cannot open manifest file: " + manifest_path);
    out << dirstep::io::manifest_to_json(m).dump(2) << '\n';
}

unsigned resolve_threads(unsigned cli_threads) {
    if (cli_threads > 0) return cli_threads;
    if (const char* env = std::getenv("DIRSTEP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 0;  // auto
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stepwise multiple testing with directional decisions"};
    app.require_subcommand(1);

    std::string out_path;
    std::string manifest_path;
    const auto add_out = [&](CLI::App* sub) {
        sub->add_option("--out", out_path, "write output to this file instead of stdout");
        sub->add_option("--manifest", manifest_path,
                        "also write a JSON run manifest (resolved config, version, timestamp)");
    };

    // critvals
    auto* critvals = app.add_subcommand("critvals", "print a critical-constant schedule");
    add_out(critvals);
    std::string cv_kind;
    std::size_t cv_n = 0;
    double cv_alpha = 0.0;
    critvals->add_option("kind", cv_kind, "holm|hochberg|proc3|bh|proc5|bonferroni")->required();
    critvals->add_option("n", cv_n, "number of hypotheses (pairs for proc5)")->required();
    critvals->add_option("alpha", cv_alpha, "level in (0,1)")->required();

    // run
    auto* run = app.add_subcommand("run", "run one procedure on statistics or p-values");
    add_out(run);
    std::string run_input;
    run->add_option("input", run_input, "JSON input file")->required();

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run Monte Carlo scenarios");
    add_out(simulate);
    std::string sim_input;
    std::uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    unsigned sim_threads = 0;
    simulate->add_option("config", sim_input, "JSON scenario config file")->required();
    simulate->add_option("--seed", sim_seed, "override the config seed")
        ->each([&](const std::string&) { sim_seed_set = true; });
    simulate->add_option("--threads", sim_threads,
                         "worker thread count (DIRSTEP_THREADS as fallback; results do not "
                         "depend on it)");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "closed-form FWER of the two-stage procedure");
    add_out(oracle);
    std::size_t or_n = 0;
    double or_alpha = 0.0;
    oracle->add_option("n", or_n, "number of parameters")->required();
    oracle->add_option("alpha", or_alpha, "level in (0,1)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*critvals) {
            const auto kind = dirstep::schedule_kind_from_name(cv_kind);
            write_output(dirstep::io::critvals_csv(kind, cv_n, cv_alpha), out_path);
            write_manifest(manifest_path, "critvals", "",
                           out_path,
                           {{"kind", dirstep::schedule_kind_name(kind)},
                            {"n", cv_n},
                            {"alpha", cv_alpha}});
            return kExitOk;
        }
        if (*run) {
            const auto request = dirstep::io::parse_run_request(load_json(run_input));
            const auto pp = dirstep::io::request_pvalues(request);
            const auto decision = dirstep::run_procedure(request.spec, pp);
            write_output(dirstep::io::decision_to_json(decision, request.spec).dump(2) + "\n",
                         out_path);
            nlohmann::json cfg{{"procedure", dirstep::procedure_name(request.spec.id)},
                               {"alpha", request.spec.alpha},
                               {"n", pp.pairs()}};
            if (request.spec.layout)
                cfg["blocks"] = dirstep::io::layout_to_json(*request.spec.layout);
            write_manifest(manifest_path, "run", run_input, out_path, std::move(cfg));
            return kExitOk;
        }
        if (*simulate) {
            auto scenarios = dirstep::io::parse_scenarios(load_json(sim_input));
            const unsigned threads = resolve_threads(sim_threads);
            std::ostringstream os;
            os << dirstep::io::kEstimateCsvHeader << '\n';
            std::uint64_t violations = 0;
            for (auto& cfg : scenarios) {
                if (sim_seed_set) cfg.seed = sim_seed;
                const auto result = dirstep::run_experiment(cfg, threads);
                violations += result.invariant_violations;
                os << dirstep::io::estimate_csv_rows(result);
            }
            write_output(os.str(), out_path);
            nlohmann::json resolved = nlohmann::json::array();
            for (const auto& cfg : scenarios) resolved.push_back(dirstep::io::scenario_to_json(cfg));
            write_manifest(manifest_path, "simulate", sim_input, out_path, std::move(resolved));
            if (violations > 0) {
                std::cerr << "error: " << violations
                          << " replication(s) violated internal invariants\n";
                return kExitCheckFailure;
            }
            return kExitOk;
        }
        if (*oracle) {
            write_output(dirstep::io::oracle_csv(or_n, or_alpha), out_path);
            write_manifest(manifest_path, "oracle", "", out_path,
                           {{"n", or_n}, {"alpha", or_alpha}});
            return kExitOk;
        }
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheckFailure;
    }
    return kExitUsage;
}
