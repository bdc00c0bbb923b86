#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "ivbound/kernel.hpp"
#include "ivbound/lp.hpp"
#include "ivbound/model.hpp"
#include "ivbound/oracle.hpp"
#include "ivbound/rng.hpp"

using namespace ivbound;

namespace {

FiducialDraw empirical_draw(const CountsTable& counts) {
    // v = empirical proportions, slacks 0
    const auto q = empirical_proportions(counts);
    FiducialDraw d;
    d.slack = {0.0, 0.0};
    d.v = q.q;
    return d;
}

CountsTable vitamin_a_counts() {
    CountsTable c;
    c.n[cell_index(0, 0, 0)] = 74;
    c.n[cell_index(0, 0, 1)] = 11514;
    c.n[cell_index(1, 0, 0)] = 34;
    c.n[cell_index(1, 0, 1)] = 2385;
    c.n[cell_index(1, 1, 0)] = 12;
    c.n[cell_index(1, 1, 1)] = 9663;
    return c;
}

FiducialDraw random_draw(const CountsTable& counts, std::uint64_t seed,
                         std::uint64_t stream) {
    RngStream rng(seed, stream);
    return propose(counts, rng);
}

}  // namespace

TEST_CASE("simplex solves trivial instances") {
    LpProblem lp;
    lp.num_vars = 2;
    lp.maximize = true;
    lp.objective = {1, 0};
    lp.eq_lhs = {{1, 1}};
    lp.eq_rhs = {1};
    const auto sol = lp_solve(lp);
    REQUIRE(sol.status == LpStatus::OPTIMAL);
    CHECK_THAT(sol.value, Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(sol.point[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(sol.point[1], Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("simplex detects infeasibility") {
    LpProblem lp;
    lp.num_vars = 1;
    lp.objective = {0};
    lp.eq_lhs = {{1}, {1}};
    lp.eq_rhs = {1, 2};
    CHECK(lp_solve(lp).status == LpStatus::INFEASIBLE);
}

TEST_CASE("simplex detects unboundedness") {
    LpProblem lp;
    lp.num_vars = 2;
    lp.maximize = true;
    lp.objective = {1, 0};
    lp.ge_lhs = {{1, -1}};
    lp.ge_rhs = {0};
    CHECK(lp_solve(lp).status == LpStatus::UNBOUNDED);
}

TEST_CASE("an all-slack draw is always feasible") {
    FiducialDraw d;  // all v zero, slacks 1
    d.slack = {1.0, 1.0};
    CHECK(feasible(d, assumptions(AssumptionLabel::CORE_IV)));
    CHECK(feasible(d, assumptions(AssumptionLabel::NEW_DRUG)));
}

TEST_CASE("disjoint groups each demanding full mass are infeasible") {
    FiducialDraw d;
    d.v[cell_index(0, 0, 0)] = 1.0;
    d.v[cell_index(1, 0, 1)] = 1.0;
    CHECK_FALSE(feasible(d, assumptions(AssumptionLabel::CORE_IV)));
}

TEST_CASE("ATE spans [-1, 1] on the unconstrained simplex") {
    FiducialDraw d;
    d.slack = {1.0, 1.0};
    const auto e = estimand(EstimandKind::ATE);
    const auto a = assumptions(AssumptionLabel::CORE_IV);
    CHECK_THAT(bound_linear(d, e, a, Direction::MIN),
               Catch::Matchers::WithinAbs(-1.0, 1e-9));
    CHECK_THAT(bound_linear(d, e, a, Direction::MAX),
               Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("Vitamin A empirical draw reproduces the published ATE bounds") {
    const auto d = empirical_draw(vitamin_a_counts());
    const auto e = estimand(EstimandKind::ATE);
    const auto a = assumptions(AssumptionLabel::CORE_IV);
    CHECK_THAT(bound_linear(d, e, a, Direction::MIN),
               Catch::Matchers::WithinAbs(-0.1946, 5e-4));
    CHECK_THAT(bound_linear(d, e, a, Direction::MAX),
               Catch::Matchers::WithinAbs(0.0054, 5e-4));
}

TEST_CASE("bound_linear rejects infeasible draws") {
    FiducialDraw d;
    d.v[cell_index(0, 0, 0)] = 1.0;
    d.v[cell_index(1, 0, 1)] = 1.0;
    CHECK_THROWS_AS(bound_linear(d, estimand(EstimandKind::ATE),
                                 assumptions(AssumptionLabel::CORE_IV),
                                 Direction::MIN),
                    InfeasibleDraw);
}

TEST_CASE("MIN <= MAX and assumption tightening never widens bounds") {
    CountsTable c;
    c.n = {10, 7, 3, 9, 8, 5, 6, 12};
    const auto e = estimand(EstimandKind::ATE);
    const auto core = assumptions(AssumptionLabel::CORE_IV);
    const auto mono = assumptions(AssumptionLabel::MONOTONICITY);
    for (int i = 0; i < 40; ++i) {
        const auto d = random_draw(c, 21, i);
        if (!feasible(d, core)) continue;
        const double lo = bound_linear(d, e, core, Direction::MIN);
        const double hi = bound_linear(d, e, core, Direction::MAX);
        CHECK(lo <= hi + 1e-10);
        if (feasible(d, mono)) {
            const double mlo = bound_linear(d, e, mono, Direction::MIN);
            const double mhi = bound_linear(d, e, mono, Direction::MAX);
            CHECK(mlo >= lo - 1e-8);
            CHECK(mhi <= hi + 1e-8);
        }
    }
}

TEST_CASE("componentwise larger v never enlarges the interval") {
    CountsTable c;
    c.n = {10, 7, 3, 9, 8, 5, 6, 12};
    const auto e = estimand(EstimandKind::ATE);
    const auto core = assumptions(AssumptionLabel::CORE_IV);
    for (int i = 0; i < 40; ++i) {
        auto d = random_draw(c, 22, i);
        if (!feasible(d, core)) continue;
        const double lo = bound_linear(d, e, core, Direction::MIN);
        const double hi = bound_linear(d, e, core, Direction::MAX);
        auto relaxed = d;
        for (auto& v : relaxed.v) v *= 0.5;  // componentwise smaller
        const double rlo = bound_linear(relaxed, e, core, Direction::MIN);
        const double rhi = bound_linear(relaxed, e, core, Direction::MAX);
        CHECK(rlo <= lo + 1e-9);
        CHECK(rhi >= hi - 1e-9);
    }
}

TEST_CASE("CACE stays in [-1, 1] and flags vanishing compliance mass") {
    const auto e = estimand(EstimandKind::CACE);
    const auto core = assumptions(AssumptionLabel::CORE_IV);

    FiducialDraw slackd;
    slackd.slack = {1.0, 1.0};
    const auto lo = bound_fractional(slackd, e, core, Direction::MIN);
    const auto hi = bound_fractional(slackd, e, core, Direction::MAX);
    CHECK(lo.degenerate);
    CHECK(hi.degenerate);
    CHECK(lo.value >= -1.0 - 1e-9);
    CHECK(hi.value <= 1.0 + 1e-9);

    CountsTable c;
    c.n = {10, 7, 3, 9, 8, 5, 6, 12};
    for (int i = 0; i < 20; ++i) {
        const auto d = random_draw(c, 23, i);
        if (!feasible(d, core)) continue;
        const auto l = bound_fractional(d, e, core, Direction::MIN);
        const auto u = bound_fractional(d, e, core, Direction::MAX);
        CHECK(l.value >= -1.0 - 1e-9);
        CHECK(u.value <= 1.0 + 1e-9);
        CHECK(l.value <= u.value + 1e-9);
    }
}

TEST_CASE("Charnes-Cooper value matches direct evaluation at the argmax") {
    // draws from monotone-ish counts keep the complier mass bounded away
    // from zero, so the transform must agree with the recovered point
    CountsTable c;
    c.n = {40, 5, 1, 2, 10, 2, 30, 18};
    const auto e = estimand(EstimandKind::CACE);
    const auto core = assumptions(AssumptionLabel::CORE_IV);
    int checked = 0;
    for (int i = 0; i < 60 && checked < 10; ++i) {
        const auto d = random_draw(c, 24, i);
        if (!feasible(d, core)) continue;
        for (auto dir : {Direction::MIN, Direction::MAX}) {
            const auto b = bound_fractional(d, e, core, dir);
            if (b.degenerate) continue;
            CHECK_THAT(e.evaluate(b.point),
                       Catch::Matchers::WithinAbs(b.value, 1e-8));
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("deterministic solver path: identical inputs, identical output") {
    CountsTable c;
    c.n = {10, 7, 3, 9, 8, 5, 6, 12};
    const auto e = estimand(EstimandKind::ATE);
    const auto core = assumptions(AssumptionLabel::CORE_IV);
    const auto d = random_draw(c, 25, 0);
    REQUIRE(feasible(d, core));
    const double v1 = bound_linear(d, e, core, Direction::MIN);
    const double v2 = bound_linear(d, e, core, Direction::MIN);
    CHECK(v1 == v2);
}

TEST_CASE("random stratum-polytope optima match the exact oracle") {
    CountsTable c;
    c.n = {10, 7, 3, 9, 8, 5, 6, 12};
    const auto e = estimand(EstimandKind::ATE);
    const auto core = assumptions(AssumptionLabel::CORE_IV);
    const auto strata = ActiveStrata::from(core);
    int checked = 0;
    for (int i = 0; i < 60 && checked < 25; ++i) {
        const auto d = random_draw(c, 26, i);
        auto lp = draw_polytope(d, strata);
        lp.objective = strata.reduce(e.numerator);
        for (bool maximize : {false, true}) {
            lp.maximize = maximize;
            const auto approx = lp_solve(lp);
            const auto exact = oracle::exact_solve(lp);
            REQUIRE(approx.status == exact.status);
            if (approx.status == LpStatus::OPTIMAL) {
                CHECK_THAT(approx.value,
                           Catch::Matchers::WithinAbs(
                               static_cast<double>(exact.value), 1e-7));
                ++checked;
            }
        }
    }
    CHECK(checked >= 10);
}
