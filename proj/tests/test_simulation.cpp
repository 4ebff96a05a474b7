#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "dirstep/simulation.hpp"

using namespace dirstep;

namespace {

double ks_statistic(std::vector<double> x, const NullDistribution& dist, double shift) {
    std::sort(x.begin(), x.end());
    const double m = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = dist.cdf(x[i] - shift);
        d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / m - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / m));
    }
    return d;
}

double ks_threshold(std::size_t m) {
    return 1.9495 / std::sqrt(static_cast<double>(m));  // significance 1e-3
}

double sample_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const double m = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= m;
    mb /= m;
    double saa = 0, sbb = 0, sab = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
        sab += (a[i] - ma) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("independent generator marginals") {
    const std::size_t m = 100000;
    std::mt19937_64 rng(404);
    std::vector<double> t1(m), t2(m);
    for (std::size_t r = 0; r < m; ++r) {
        const auto s = gen_independent({0.0, 1.5}, rng);
        t1[r] = s.t[0];
        t2[r] = s.t[1];
    }
    const NullDistribution normal{DistFamily::Normal};
    REQUIRE(ks_statistic(t1, normal, 0.0) <= ks_threshold(m));
    REQUIRE(ks_statistic(t2, normal, 1.5) <= ks_threshold(m));

    const double tol = 4.0 / std::sqrt(static_cast<double>(m));
    double mean2 = 0;
    for (double v : t2) mean2 += v;
    mean2 /= static_cast<double>(m);
    REQUIRE(std::abs(mean2 - 1.5) <= tol);
    REQUIRE(std::abs(sample_correlation(t1, t2)) <= tol);
}

TEST_CASE("equicorrelated generator") {
    const std::size_t m = 100000;
    const double tol = 4.0 / std::sqrt(static_cast<double>(m));
    std::mt19937_64 rng(405);
    std::vector<double> t1(m), t2(m);
    for (std::size_t r = 0; r < m; ++r) {
        const auto s = gen_equicorrelated({0.0, 0.0}, 0.5, rng);
        t1[r] = s.t[0];
        t2[r] = s.t[1];
    }
    REQUIRE(std::abs(sample_correlation(t1, t2) - 0.5) <= tol);
    // marginal stays standard normal for any rho
    REQUIRE(ks_statistic(t1, {DistFamily::Normal}, 0.0) <= ks_threshold(m));
    double var = 0, mean = 0;
    for (double v : t2) mean += v;
    mean /= static_cast<double>(m);
    for (double v : t2) var += (v - mean) * (v - mean);
    var /= static_cast<double>(m - 1);
    REQUIRE(std::abs(var - 1.0) <= 2.0 * tol);

    SECTION("rho = 0 matches the independent stream bit for bit") {
        std::mt19937_64 a(42), b(42);
        const auto x = gen_equicorrelated({0.5, -0.5, 0.0}, 0.0, a);
        const auto y = gen_independent({0.5, -0.5, 0.0}, b);
        REQUIRE(x.t == y.t);
    }
    SECTION("rho out of range") {
        std::mt19937_64 a(1);
        REQUIRE_THROWS_AS(gen_equicorrelated({0.0}, 1.0, a), std::invalid_argument);
        REQUIRE_THROWS_AS(gen_equicorrelated({0.0}, -0.1, a), std::invalid_argument);
    }
}

TEST_CASE("between-block generator correlation structure") {
    const std::size_t m = 100000;
    const double tol = 4.0 / std::sqrt(static_cast<double>(m));
    const FamilyLayout layout{4, {{0, 1}, {2, 3}}};
    std::mt19937_64 rng(406);
    std::vector<std::vector<double>> t(4, std::vector<double>(m));
    for (std::size_t r = 0; r < m; ++r) {
        const auto s = gen_between_block({0.0, 0.0, 0.0, 0.0}, 0.5, layout, rng);
        for (int i = 0; i < 4; ++i) t[i][r] = s.t[i];
    }
    // independent inside a block
    REQUIRE(std::abs(sample_correlation(t[0], t[1])) <= tol);
    REQUIRE(std::abs(sample_correlation(t[2], t[3])) <= tol);
    // same position across blocks shares a factor
    REQUIRE(std::abs(sample_correlation(t[0], t[2]) - 0.5) <= tol);
    REQUIRE(std::abs(sample_correlation(t[1], t[3]) - 0.5) <= tol);
    REQUIRE(ks_statistic(t[0], {DistFamily::Normal}, 0.0) <= ks_threshold(m));

    SECTION("unequal block sizes are refused") {
        std::mt19937_64 a(1);
        const FamilyLayout uneven{3, {{0, 1}, {2}}};
        REQUIRE_THROWS_AS(gen_between_block({0.0, 0.0, 0.0}, 0.5, uneven, a),
                          std::invalid_argument);
    }
    SECTION("rho = 0 reduction") {
        std::mt19937_64 a(42), b(42);
        const auto x = gen_between_block({0.0, 0.0, 0.0, 0.0}, 0.0, layout, a);
        const auto y = gen_independent({0.0, 0.0, 0.0, 0.0}, b);
        REQUIRE(x.t == y.t);
    }
}

TEST_CASE("within-block generator correlation structure") {
    const std::size_t m = 100000;
    const double tol = 4.0 / std::sqrt(static_cast<double>(m));
    const FamilyLayout layout{4, {{0, 1}, {2, 3}}};
    std::mt19937_64 rng(407);
    std::vector<std::vector<double>> t(4, std::vector<double>(m));
    for (std::size_t r = 0; r < m; ++r) {
        const auto s = gen_within_block({0.0, 0.0, 0.0, 0.0}, 0.5, layout, rng);
        for (int i = 0; i < 4; ++i) t[i][r] = s.t[i];
    }
    REQUIRE(std::abs(sample_correlation(t[0], t[1]) - 0.5) <= tol);
    REQUIRE(std::abs(sample_correlation(t[2], t[3]) - 0.5) <= tol);
    REQUIRE(std::abs(sample_correlation(t[0], t[2])) <= tol);
    REQUIRE(std::abs(sample_correlation(t[1], t[3])) <= tol);
    REQUIRE(ks_statistic(t[0], {DistFamily::Normal}, 0.0) <= ks_threshold(m));

    SECTION("rho = 0 reduction") {
        std::mt19937_64 a(9), b(9);
        const auto x = gen_within_block({1.0, 0.0, 0.0, -1.0}, 0.0, layout, a);
        const auto y = gen_independent({1.0, 0.0, 0.0, -1.0}, b);
        REQUIRE(x.t == y.t);
    }
}

TEST_CASE("cauchy generator") {
    const std::size_t m = 100000;
    std::mt19937_64 rng(408);
    std::vector<double> t(m);
    std::vector<double> pvals(m);
    for (std::size_t r = 0; r < m; ++r) {
        const auto s = gen_cauchy_independent({0.0}, rng);
        t[r] = s.t[0];
        pvals[r] = s.dist.cdf(s.t[0]);
    }
    REQUIRE(ks_statistic(t, {DistFamily::Cauchy}, 0.0) <= ks_threshold(m));
    // median near the location parameter
    std::nth_element(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(m / 2), t.end());
    REQUIRE(std::abs(t[m / 2]) <= 0.02);
    // p-values symmetric about one half
    double frac = 0;
    for (double p : pvals) frac += p < 0.5 ? 1.0 : 0.0;
    REQUIRE(std::abs(frac / static_cast<double>(m) - 0.5) <=
            4.0 / std::sqrt(static_cast<double>(m)));
}

TEST_CASE("replication seeds are decorrelated") {
    // same replication index -> same seed; neighbours -> different streams
    REQUIRE(child_seed(1, 0) == child_seed(1, 0));
    REQUIRE(child_seed(1, 0) != child_seed(1, 1));
    REQUIRE(child_seed(1, 0) != child_seed(2, 0));
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t r = 0; r < 1000; ++r) seeds.push_back(child_seed(99, r));
    std::sort(seeds.begin(), seeds.end());
    REQUIRE(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
}

TEST_CASE("experiments are reproducible and thread-count independent") {
    ScenarioConfig cfg;
    cfg.generator = GeneratorKind::Equicorrelated;
    cfg.theta = {0.0, 0.5, -0.5, 0.0, 2.0};
    cfg.rho = 0.5;
    cfg.procedure = ProcedureId::P3;
    cfg.alpha = 0.05;
    cfg.reps = 20000;
    cfg.seed = 20240601;

    const auto one = run_experiment(cfg, 1);
    const auto two = run_experiment(cfg, 2);
    const auto four = run_experiment(cfg, 4);
    REQUIRE(one.invariant_violations == 0);
    for (std::size_t i = 0; i < one.estimates.size(); ++i) {
        REQUIRE(one.estimates[i].estimate == two.estimates[i].estimate);
        REQUIRE(one.estimates[i].se == two.estimates[i].se);
        REQUIRE(one.estimates[i].estimate == four.estimates[i].estimate);
        REQUIRE(one.estimates[i].reps == cfg.reps);
    }

    SECTION("single replication works and has zero standard error") {
        cfg.reps = 1;
        const auto r = run_experiment(cfg, 1);
        REQUIRE(r.estimates[0].reps == 1);
        REQUIRE(r.estimates[0].se == 0.0);
        const auto r2 = run_experiment(cfg, 3);
        REQUIRE(r.estimates[0].estimate == r2.estimates[0].estimate);
    }
}

TEST_CASE("scenario validation") {
    ScenarioConfig cfg;
    cfg.theta = {0.0, 0.0};
    cfg.procedure = ProcedureId::P3;
    cfg.alpha = 0.05;
    cfg.reps = 10;
    REQUIRE_NOTHROW(validate_scenario(cfg));

    SECTION("layout only when needed") {
        cfg.layout = FamilyLayout::singletons(2);
        REQUIRE_THROWS_AS(validate_scenario(cfg), std::invalid_argument);
        cfg.procedure = ProcedureId::P4;
        REQUIRE_NOTHROW(validate_scenario(cfg));
        cfg.layout.reset();
        REQUIRE_THROWS_AS(validate_scenario(cfg), std::invalid_argument);
    }
    SECTION("rho range enforced for correlated generators") {
        cfg.generator = GeneratorKind::Equicorrelated;
        cfg.rho = 1.0;
        REQUIRE_THROWS_AS(validate_scenario(cfg), std::invalid_argument);
    }
    SECTION("alpha and reps ranges") {
        cfg.alpha = 0.5;
        REQUIRE_THROWS_AS(validate_scenario(cfg), std::invalid_argument);
        cfg.alpha = 0.05;
        cfg.reps = 0;
        REQUIRE_THROWS_AS(validate_scenario(cfg), std::invalid_argument);
    }
    SECTION("between-block needs equal blocks") {
        cfg.theta = {0.0, 0.0, 0.0};
        cfg.generator = GeneratorKind::BetweenBlock;
        cfg.rho = 0.5;
        cfg.layout = FamilyLayout{3, {{0, 1}, {2}}};
        cfg.procedure = ProcedureId::P7;
        REQUIRE_THROWS_AS(validate_scenario(cfg), std::invalid_argument);
    }
}
