#ifndef IVBOUND_KERNEL_HPP
#define IVBOUND_KERNEL_HPP

#include <algorithm>
#include <array>
#include <vector>

#include "ivbound/errors.hpp"
#include "ivbound/lp.hpp"
#include "ivbound/model.hpp"

namespace ivbound {

enum class Direction { MIN, MAX };

// Strata kept as LP variables once the assumption set's forced zeros are
// removed; active[k] is the full stratum index of reduced variable k.
struct ActiveStrata {
    std::vector<int> active;

    static ActiveStrata from(const AssumptionSet& assumptions) {
        ActiveStrata out;
        for (int s = 0; s < kNumStrata; ++s) {
            if (std::find(assumptions.forced_zero.begin(),
                          assumptions.forced_zero.end(),
                          s) == assumptions.forced_zero.end())
                out.active.push_back(s);
        }
        return out;
    }

    int size() const { return static_cast<int>(active.size()); }

    std::vector<double> reduce(const std::array<double, kNumStrata>& full) const {
        std::vector<double> out(active.size());
        for (std::size_t k = 0; k < active.size(); ++k) out[k] = full[active[k]];
        return out;
    }

    StratumVector expand(const std::vector<double>& reduced) const {
        StratumVector p;
        for (std::size_t k = 0; k < active.size(); ++k)
            p.p[active[k]] = reduced[k];
        return p;
    }
};

// Coefficient row of one observed cell over the reduced strata.
inline std::vector<double> cell_row(const ActiveStrata& strata, int cell) {
    const int z = (cell >> 2) & 1, a = (cell >> 1) & 1, y = cell & 1;
    std::vector<double> row(strata.active.size(), 0.0);
    for (std::size_t k = 0; k < strata.active.size(); ++k)
        if (stratum_in_cell(strata.active[k], z, a, y)) row[k] = 1.0;
    return row;
}

// The stratum polytope of one fiducial draw: simplex equality plus the eight
// per-cell mass inequalities at the draw's right-hand sides.
inline LpProblem draw_polytope(const FiducialDraw& draw,
                               const ActiveStrata& strata) {
    LpProblem lp;
    lp.num_vars = strata.size();
    lp.objective.assign(lp.num_vars, 0.0);
    lp.eq_lhs.push_back(std::vector<double>(lp.num_vars, 1.0));
    lp.eq_rhs.push_back(1.0);
    for (int cell = 0; cell < kNumCells; ++cell) {
        lp.ge_lhs.push_back(cell_row(strata, cell));
        lp.ge_rhs.push_back(draw.v[cell]);
    }
    return lp;
}

// Same polytope with equality right-hand sides (the plug-in form).
inline LpProblem equality_polytope(const ObservableDist& q,
                                   const ActiveStrata& strata) {
    LpProblem lp;
    lp.num_vars = strata.size();
    lp.objective.assign(lp.num_vars, 0.0);
    lp.eq_lhs.push_back(std::vector<double>(lp.num_vars, 1.0));
    lp.eq_rhs.push_back(1.0);
    for (int cell = 0; cell < kNumCells; ++cell) {
        lp.eq_lhs.push_back(cell_row(strata, cell));
        lp.eq_rhs.push_back(q.q[cell]);
    }
    return lp;
}

inline bool feasible(const FiducialDraw& draw, const AssumptionSet& assumptions) {
    const auto strata = ActiveStrata::from(assumptions);
    const auto lp = draw_polytope(draw, strata);
    return lp_solve(lp).status == LpStatus::OPTIMAL;
}

inline double bound_linear(const FiducialDraw& draw, const Estimand& estimand,
                           const AssumptionSet& assumptions,
                           Direction direction) {
    const auto strata = ActiveStrata::from(assumptions);
    auto lp = draw_polytope(draw, strata);
    lp.objective = strata.reduce(estimand.numerator);
    lp.maximize = direction == Direction::MAX;
    const auto sol = lp_solve(lp);
    if (sol.status == LpStatus::INFEASIBLE) throw InfeasibleDraw();
    if (sol.status != LpStatus::OPTIMAL)
        throw NumericalFailure("linear bound LP unbounded on a bounded polytope");
    return sol.value;
}

struct FractionalBound {
    double value = 0.0;
    bool degenerate = false;
    StratumVector point;  // recovered p = y/t
};

inline constexpr double kDenominatorFloor = 1e-9;

// Linear-fractional bound via the Charnes-Cooper transform y = t*p. When the
// polytope admits denominator mass below the floor, the optimum is taken over
// the restricted region denominator >= floor and flagged degenerate.
template <class PolytopeBuilder>
inline FractionalBound bound_fractional_over(PolytopeBuilder&& build_polytope,
                                             const ActiveStrata& strata,
                                             const Estimand& estimand,
                                             Direction direction) {
    const auto denom = strata.reduce(estimand.denominator);
    const auto numer = strata.reduce(estimand.numerator);

    LpProblem probe = build_polytope();
    probe.objective = denom;
    probe.maximize = false;
    const auto min_den = lp_solve(probe);
    if (min_den.status == LpStatus::INFEASIBLE) throw InfeasibleDraw();

    FractionalBound out;
    out.degenerate = min_den.value <= kDenominatorFloor;

    if (out.degenerate) {
        probe.maximize = true;
        const auto max_den = lp_solve(probe);
        // denominator vanishes identically: the ratio is undefined everywhere
        if (max_den.status == LpStatus::OPTIMAL &&
            max_den.value <= kDenominatorFloor)
            throw ZeroComplianceMass();
    }

    // homogenize: variables (y, t); every original row A p {>=,=} b becomes
    // A y - b t {>=,=} 0, plus sum-to-one becomes part of the original rows,
    // plus the normalization denom . y = 1.
    const LpProblem base = build_polytope();
    const int n = base.num_vars;
    LpProblem cc;
    cc.num_vars = n + 1;
    cc.objective.assign(n + 1, 0.0);
    for (int j = 0; j < n; ++j) cc.objective[j] = numer[j];
    cc.maximize = direction == Direction::MAX;

    for (std::size_t r = 0; r < base.eq_rhs.size(); ++r) {
        auto row = base.eq_lhs[r];
        row.push_back(-base.eq_rhs[r]);
        cc.eq_lhs.push_back(std::move(row));
        cc.eq_rhs.push_back(0.0);
    }
    for (std::size_t r = 0; r < base.ge_rhs.size(); ++r) {
        auto row = base.ge_lhs[r];
        row.push_back(-base.ge_rhs[r]);
        cc.ge_lhs.push_back(std::move(row));
        cc.ge_rhs.push_back(0.0);
    }
    {
        auto row = denom;
        row.push_back(0.0);
        cc.eq_lhs.push_back(std::move(row));
        cc.eq_rhs.push_back(1.0);
    }
    if (out.degenerate) {
        // denominator >= floor in original variables, i.e. t <= 1/floor
        std::vector<double> row(n + 1, 0.0);
        row[n] = -kDenominatorFloor;
        cc.ge_lhs.push_back(std::move(row));
        cc.ge_rhs.push_back(-1.0);
    }

    const auto sol = lp_solve(cc);
    if (sol.status != LpStatus::OPTIMAL)
        throw NumericalFailure("Charnes-Cooper LP failed to reach an optimum");
    out.value = sol.value;
    const double t = sol.point[n];
    std::vector<double> p(n, 0.0);
    if (t > 0) {
        for (int j = 0; j < n; ++j) p[j] = sol.point[j] / t;
    }
    out.point = strata.expand(p);
    return out;
}

inline FractionalBound bound_fractional(const FiducialDraw& draw,
                                        const Estimand& estimand,
                                        const AssumptionSet& assumptions,
                                        Direction direction) {
    const auto strata = ActiveStrata::from(assumptions);
    return bound_fractional_over(
        [&] { return draw_polytope(draw, strata); }, strata, estimand, direction);
}

}  // namespace ivbound

#endif  // IVBOUND_KERNEL_HPP
