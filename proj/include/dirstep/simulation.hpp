#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dirstep/error_metrics.hpp"
#include "dirstep/procedures.hpp"
#include "dirstep/pvalues.hpp"

namespace dirstep {

enum class GeneratorKind { Independent, Equicorrelated, BetweenBlock, WithinBlock, CauchyIndependent };

inline const char* generator_name(GeneratorKind g) {
    switch (g) {
        case GeneratorKind::Independent: return "independent";
        case GeneratorKind::Equicorrelated: return "equicorrelated";
        case GeneratorKind::BetweenBlock: return "between_block";
        case GeneratorKind::WithinBlock: return "within_block";
        case GeneratorKind::CauchyIndependent: return "cauchy_independent";
    }
    throw std::invalid_argument("unknown generator");
}

inline GeneratorKind generator_from_name(const std::string& s) {
    if (s == "independent") return GeneratorKind::Independent;
    if (s == "equicorrelated") return GeneratorKind::Equicorrelated;
    if (s == "between_block") return GeneratorKind::BetweenBlock;
    if (s == "within_block") return GeneratorKind::WithinBlock;
    if (s == "cauchy_independent") return GeneratorKind::CauchyIndependent;
    throw std::invalid_argument("unknown generator: " + s);
}

inline bool generator_uses_rho(GeneratorKind g) {
    return g == GeneratorKind::Equicorrelated || g == GeneratorKind::BetweenBlock ||
           g == GeneratorKind::WithinBlock;
}

inline bool generator_uses_layout(GeneratorKind g) {
    return g == GeneratorKind::BetweenBlock || g == GeneratorKind::WithinBlock;
}

struct ScenarioConfig {
    GeneratorKind generator = GeneratorKind::Independent;
    std::vector<double> theta;
    double rho = 0.0;
    std::optional<FamilyLayout> layout;
    ProcedureId procedure = ProcedureId::P3;
    double alpha = 0.05;
    std::uint64_t reps = 1;
    std::uint64_t seed = 0;
};

inline void validate_scenario(const ScenarioConfig& cfg) {
    validate_theta(cfg.theta);
    if (!(cfg.alpha > 0.0 && cfg.alpha < 0.5))
        throw std::invalid_argument("alpha must lie in (0, 0.5)");
    if (cfg.reps < 1) throw std::invalid_argument("reps must be >= 1");
    if (generator_uses_rho(cfg.generator)) {
        if (!(cfg.rho >= 0.0 && cfg.rho < 1.0))
            throw std::invalid_argument("rho must lie in [0,1)");
    }
    const bool need_layout = generator_uses_layout(cfg.generator) || requires_layout(cfg.procedure);
    if (need_layout && !cfg.layout)
        throw std::invalid_argument("scenario requires a block layout");
    if (!need_layout && cfg.layout)
        throw std::invalid_argument("scenario does not use a block layout; remove blocks");
    if (cfg.layout) {
        if (auto err = validate_layout(*cfg.layout))
            throw std::invalid_argument("invalid layout: " + *err);
        if (cfg.layout->n != cfg.theta.size())
            throw std::invalid_argument("layout dimension differs from theta");
        if (cfg.generator == GeneratorKind::BetweenBlock && !cfg.layout->equal_block_sizes())
            throw std::invalid_argument("between_block generator requires equal block sizes");
    }
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

// Counter-based seed derivation: replication r of a run with master seed s
// always draws from the same stream, whatever thread executes it.
inline std::uint64_t child_seed(std::uint64_t master_seed, std::uint64_t replication) {
    return detail::splitmix64(master_seed ^ detail::splitmix64(replication));
}

// T_i = theta_i + Z_i with independent standard normal noise.
inline StatisticVector gen_independent(const std::vector<double>& theta, std::mt19937_64& rng) {
    StatisticVector s;
    s.dist = {DistFamily::Normal};
    s.t.resize(theta.size());
    std::normal_distribution<double> z(0.0, 1.0);
    for (std::size_t i = 0; i < theta.size(); ++i) s.t[i] = theta[i] + z(rng);
    return s;
}

// Equicorrelated normals: T_i = theta_i + sqrt(rho) W + sqrt(1-rho) Z_i with a
// factor shared by all coordinates. rho = 0 takes the independent path so the
// stream matches gen_independent draw for draw.
inline StatisticVector gen_equicorrelated(const std::vector<double>& theta, double rho,
                                          std::mt19937_64& rng) {
    if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0,1)");
    if (rho == 0.0) return gen_independent(theta, rng);
    StatisticVector s;
    s.dist = {DistFamily::Normal};
    s.t.resize(theta.size());
    std::normal_distribution<double> z(0.0, 1.0);
    const double a = std::sqrt(rho);
    const double b = std::sqrt(1.0 - rho);
    for (std::size_t i = 0; i < theta.size(); ++i) s.t[i] = theta[i] + b * z(rng);
    const double w = z(rng);
    for (double& t : s.t) t += a * w;
    return s;
}

// Between-block dependence: one shared factor per within-block position,
// so statistics are independent inside every block while blocks are
// positively dependent on each other. Requires equal block sizes.
inline StatisticVector gen_between_block(const std::vector<double>& theta, double rho,
                                         const FamilyLayout& layout, std::mt19937_64& rng) {
    if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0,1)");
    if (auto err = validate_layout(layout))
        throw std::invalid_argument("invalid layout: " + *err);
    if (layout.n != theta.size())
        throw std::invalid_argument("layout dimension differs from theta");
    if (!layout.equal_block_sizes())
        throw std::invalid_argument("between_block generator requires equal block sizes");
    if (rho == 0.0) return gen_independent(theta, rng);
    StatisticVector s;
    s.dist = {DistFamily::Normal};
    s.t.resize(theta.size());
    std::normal_distribution<double> z(0.0, 1.0);
    const double a = std::sqrt(rho);
    const double b = std::sqrt(1.0 - rho);
    for (std::size_t i = 0; i < theta.size(); ++i) s.t[i] = theta[i] + b * z(rng);
    const std::size_t width = layout.blocks.front().size();
    std::vector<double> w(width);
    for (double& v : w) v = z(rng);
    for (const auto& block : layout.blocks)
        for (std::size_t j = 0; j < block.size(); ++j) s.t[block[j]] += a * w[j];
    return s;
}

// Within-block dependence: one shared factor per block, blocks mutually
// independent.
inline StatisticVector gen_within_block(const std::vector<double>& theta, double rho,
                                        const FamilyLayout& layout, std::mt19937_64& rng) {
    if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0,1)");
    if (auto err = validate_layout(layout))
        throw std::invalid_argument("invalid layout: " + *err);
    if (layout.n != theta.size())
        throw std::invalid_argument("layout dimension differs from theta");
    if (rho == 0.0) return gen_independent(theta, rng);
    StatisticVector s;
    s.dist = {DistFamily::Normal};
    s.t.resize(theta.size());
    std::normal_distribution<double> z(0.0, 1.0);
    const double a = std::sqrt(rho);
    const double b = std::sqrt(1.0 - rho);
    for (std::size_t i = 0; i < theta.size(); ++i) s.t[i] = theta[i] + b * z(rng);
    for (const auto& block : layout.blocks) {
        const double w = z(rng);
        for (std::size_t j : block) s.t[j] += a * w;
    }
    return s;
}

// T_i = theta_i + C_i with independent standard Cauchy noise.
inline StatisticVector gen_cauchy_independent(const std::vector<double>& theta,
                                              std::mt19937_64& rng) {
    StatisticVector s;
    s.dist = {DistFamily::Cauchy};
    s.t.resize(theta.size());
    std::cauchy_distribution<double> c(0.0, 1.0);
    for (std::size_t i = 0; i < theta.size(); ++i) s.t[i] = theta[i] + c(rng);
    return s;
}

inline StatisticVector generate(const ScenarioConfig& cfg, std::mt19937_64& rng) {
    switch (cfg.generator) {
        case GeneratorKind::Independent: return gen_independent(cfg.theta, rng);
        case GeneratorKind::Equicorrelated: return gen_equicorrelated(cfg.theta, cfg.rho, rng);
        case GeneratorKind::BetweenBlock:
            return gen_between_block(cfg.theta, cfg.rho, *cfg.layout, rng);
        case GeneratorKind::WithinBlock:
            return gen_within_block(cfg.theta, cfg.rho, *cfg.layout, rng);
        case GeneratorKind::CauchyIndependent: return gen_cauchy_independent(cfg.theta, rng);
    }
    throw std::invalid_argument("unknown generator");
}

struct SimulationResult {
    std::vector<ErrorRateEstimate> estimates;   // one per metric in kAllMetrics
    GeneratorKind generator = GeneratorKind::Independent;
    ProcedureId procedure = ProcedureId::P3;
    std::size_t n = 0;
    double alpha = 0.0;
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
    std::uint64_t invariant_violations = 0;
    double wall_seconds = 0.0;

    const ErrorRateEstimate& metric(Metric m) const {
        for (const auto& e : estimates)
            if (e.metric == m) return e;
        throw std::logic_error("metric not present in result");
    }
};

namespace detail {

inline constexpr std::size_t kMetricCount = 4;
inline constexpr std::uint64_t kChunkReps = 4096;

struct ChunkAccum {
    RunningStat stats[kMetricCount];
    std::uint64_t violations = 0;
};

}  // namespace detail

// Runs `reps` independent replications: generate statistics, form paired
// p-values, apply the procedure, tally errors. Replications are split into
// fixed chunks whose partial results merge in chunk order, so the outcome is
// bit-identical for any thread count. threads = 0 picks the hardware count.
inline SimulationResult run_experiment(const ScenarioConfig& cfg, unsigned threads = 0) {
    validate_scenario(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

    const std::uint64_t nchunks = (cfg.reps + detail::kChunkReps - 1) / detail::kChunkReps;
    std::vector<detail::ChunkAccum> parts(nchunks);

    ProcedureSpec spec{cfg.procedure, cfg.alpha,
                       requires_layout(cfg.procedure) ? cfg.layout : std::nullopt};
    const Family family = decision_family(cfg.procedure);
    bool theta_has_zero = false;
    for (double th : cfg.theta) theta_has_zero |= (th == 0.0);

    std::atomic<std::uint64_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::uint64_t chunk = next.fetch_add(1);
            if (chunk >= nchunks) return;
            detail::ChunkAccum& acc = parts[chunk];
            const std::uint64_t lo = chunk * detail::kChunkReps;
            const std::uint64_t hi = std::min(cfg.reps, lo + detail::kChunkReps);
            for (std::uint64_t r = lo; r < hi; ++r) {
                std::mt19937_64 rng(child_seed(cfg.seed, r));
                const StatisticVector stats = generate(cfg, rng);
                const PairedPValues pp = paired_pvalues(stats);
                const DecisionSet decision = run_procedure(spec, pp);
                const ErrorTally t = tally(decision, cfg.theta);
                if (!tally_consistent(t, family, theta_has_zero)) ++acc.violations;
                for (std::size_t m = 0; m < detail::kMetricCount; ++m)
                    acc.stats[m].add(metric_value(t, kAllMetrics[m]));
            }
        }
    };

    if (threads <= 1 || nchunks <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const unsigned used = static_cast<unsigned>(std::min<std::uint64_t>(threads, nchunks));
        pool.reserve(used);
        for (unsigned i = 0; i < used; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    SimulationResult res;
    res.generator = cfg.generator;
    res.procedure = cfg.procedure;
    res.n = cfg.theta.size();
    res.alpha = cfg.alpha;
    res.reps = cfg.reps;
    res.seed = cfg.seed;
    for (std::size_t m = 0; m < detail::kMetricCount; ++m) {
        RunningStat total;
        for (const auto& part : parts) total.merge(part.stats[m]);
        res.estimates.push_back(
            {kAllMetrics[m], total.mean, total.standard_error(), total.count});
    }
    for (const auto& part : parts) res.invariant_violations += part.violations;
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace dirstep
