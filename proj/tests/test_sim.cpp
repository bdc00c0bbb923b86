#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ivbound/model.hpp"
#include "ivbound/sim.hpp"

using namespace ivbound;
using namespace ivbound::sim;

TEST_CASE("scenario 2 treatment uptake matches the structural law") {
    const auto spec = scenario(ScenarioId::SCENARIO_2);
    const auto records = simulate(spec, 1'000'000, 3);
    long long n_z1 = 0, a_given_z1 = 0;
    for (const auto& r : records) {
        if (r.z == 1) {
            ++n_z1;
            a_given_z1 += r.a;
        }
    }
    const double p = static_cast<double>(a_given_z1) / n_z1;
    CHECK(std::abs(p - 0.4) < 0.002);
}

TEST_CASE("scenario 1 treatment uptake marginalizes the confounder") {
    const auto spec = scenario(ScenarioId::SCENARIO_1);
    const auto records = simulate(spec, 1'000'000, 4);
    long long n_z1 = 0, a_given_z1 = 0;
    for (const auto& r : records) {
        if (r.z == 1) {
            ++n_z1;
            a_given_z1 += r.a;
        }
    }
    const double p = static_cast<double>(a_given_z1) / n_z1;
    CHECK(std::abs(p - 0.93125) < 0.002);
}

TEST_CASE("fixed seed reproduces the record stream") {
    const auto spec = scenario(ScenarioId::SCENARIO_1);
    const auto r1 = simulate(spec, 1000, 99);
    const auto r2 = simulate(spec, 1000, 99);
    REQUIRE(r1.size() == r2.size());
    for (std::size_t i = 0; i < r1.size(); ++i) {
        CHECK(r1[i].z == r2[i].z);
        CHECK(r1[i].a == r2[i].a);
        CHECK(r1[i].y == r2[i].y);
    }
}

TEST_CASE("true observable distributions are valid and bracket the true ATE") {
    for (auto id : {ScenarioId::SCENARIO_1, ScenarioId::SCENARIO_2}) {
        const auto spec = scenario(id);
        const auto q = true_q(spec);
        for (double v : q.q) CHECK(v >= 0.0);
        CHECK_THAT(q.arm_sum(0), Catch::Matchers::WithinAbs(1.0, 1e-12));
        CHECK_THAT(q.arm_sum(1), Catch::Matchers::WithinAbs(1.0, 1e-12));

        const auto [lo, hi] = true_bounds(spec, estimand(EstimandKind::ATE),
                                          assumptions(AssumptionLabel::CORE_IV));
        const double ate = true_ate(spec);
        CHECK(lo <= ate + 1e-9);
        CHECK(hi >= ate - 1e-9);
    }
    CHECK(true_ate(scenario(ScenarioId::SCENARIO_2)) == 0.2);
}

TEST_CASE("simulated streams pass a chi-square test against true_q") {
    for (auto id : {ScenarioId::SCENARIO_1, ScenarioId::SCENARIO_2}) {
        const auto spec = scenario(id);
        const long long n = 1'000'000;
        const auto counts = summarize(simulate(spec, n, 8));
        const auto q = true_q(spec);
        double stat = 0;
        for (int cell = 0; cell < kNumCells; ++cell) {
            const double expected = 0.5 * q.q[cell] * n;  // P(Z=z) = 1/2
            if (expected < 1e-12) continue;
            const double diff = counts.n[cell] - expected;
            stat += diff * diff / expected;
        }
        // 7 degrees of freedom, p = 0.001 critical value
        CHECK(stat < 24.32);
    }
}

TEST_CASE("comparator priors align their zeros with cells (0,1,0) and (0,1,1)") {
    const auto p1 = comparator_prior(Method::BAYES1);
    const auto p2 = comparator_prior(Method::BAYES2);
    CHECK(p1[cell_index(0, 1, 0)] == 0.0);
    CHECK(p1[cell_index(0, 1, 1)] == 0.0);
    CHECK(p2[cell_index(0, 1, 0)] == 0.0);
    CHECK(p2[cell_index(0, 1, 1)] == 0.0);
    CHECK(p1[0] == 1.0);
    CHECK(p2[0] == 0.5);
    for (int c = 4; c < 8; ++c) {
        CHECK(p1[c] == 1.0);
        CHECK(p2[c] == 1.0);
    }
}

TEST_CASE("comparator is deterministic for a fixed seed") {
    const auto spec = scenario(ScenarioId::SCENARIO_2);
    const auto counts = summarize(simulate(spec, 200, 5));
    const auto e = estimand(EstimandKind::ATE);
    const auto a = assumptions(AssumptionLabel::CORE_IV);
    const auto r1 =
        bayesian_comparator(counts, comparator_prior(Method::BAYES1), 200, 7, e, a, 0.95);
    const auto r2 =
        bayesian_comparator(counts, comparator_prior(Method::BAYES1), 200, 7, e, a, 0.95);
    CHECK(r1.lower_ci.low == r2.lower_ci.low);
    CHECK(r1.upper_ci.high == r2.upper_ci.high);
    CHECK(r1.accepted == r2.accepted);
}

TEST_CASE("comparator and fiducial intervals agree on large samples") {
    const auto spec = scenario(ScenarioId::SCENARIO_2);
    const auto counts = summarize(simulate(spec, 100'000, 6));
    const auto e = estimand(EstimandKind::ATE);
    const auto a = assumptions(AssumptionLabel::CORE_IV);
    const auto fid = analyze(counts, e, a, 600, 17, 0.95);
    const auto bay = bayesian_comparator(counts, comparator_prior(Method::BAYES1),
                                         600, 18, e, a, 0.95);
    CHECK(std::abs(fid.lower_ci.low - bay.lower_ci.low) < 0.01);
    CHECK(std::abs(fid.lower_ci.high - bay.lower_ci.high) < 0.01);
    CHECK(std::abs(fid.upper_ci.low - bay.upper_ci.low) < 0.01);
    CHECK(std::abs(fid.upper_ci.high - bay.upper_ci.high) < 0.01);
}

TEST_CASE("level 1 intervals never miss") {
    const auto spec = scenario(ScenarioId::SCENARIO_2);
    const auto rows = coverage_experiment(
        spec, {60}, 10, 60, 1.0, Method::FIDUCIAL, estimand(EstimandKind::ATE),
        assumptions(AssumptionLabel::CORE_IV), 12);
    for (const auto& r : rows) {
        CHECK(r.lr_percent == 0.0);
        CHECK(r.ur_percent == 0.0);
    }
}

TEST_CASE("coverage widths shrink with sample size") {
    const auto spec = scenario(ScenarioId::SCENARIO_2);
    const auto rows = coverage_experiment(
        spec, {25, 100}, 15, 150, 0.95, Method::FIDUCIAL,
        estimand(EstimandKind::ATE), assumptions(AssumptionLabel::CORE_IV), 13);
    REQUIRE(rows.size() == 4);
    // rows: (25 lower, 25 upper, 100 lower, 100 upper)
    CHECK(rows[2].mean_width < rows[0].mean_width);
    CHECK(rows[3].mean_width < rows[1].mean_width);
}
