#ifndef IVBOUND_ORACLE_HPP
#define IVBOUND_ORACLE_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <utility>
#include <vector>

#include "ivbound/errors.hpp"
#include "ivbound/kernel.hpp"
#include "ivbound/lp.hpp"
#include "ivbound/model.hpp"

namespace ivbound::oracle {

using Rational = boost::multiprecision::cpp_rational;

// Exact: every finite double is a dyadic rational.
inline Rational to_rational(double x) { return Rational(x); }

struct ExactSolution {
    LpStatus status;
    Rational value;
    std::vector<Rational> point;
};

// Exact two-phase simplex over the rationals with Bland's rule. No tolerances
// anywhere: feasibility and optimality decisions are exact.
class ExactSimplex {
public:
    ExactSolution solve(const LpProblem& problem) {
        const int n = problem.num_vars;
        const int m_eq = static_cast<int>(problem.eq_rhs.size());
        const int m_ge = static_cast<int>(problem.ge_rhs.size());
        const int m = m_eq + m_ge;
        const int n_surplus = m_ge;
        const int ncols = n + n_surplus + m;

        tab_.assign(m, std::vector<Rational>(ncols + 1, Rational(0)));
        basis_.assign(m, 0);
        for (int r = 0; r < m; ++r) {
            Rational rhs = to_rational(r < m_eq ? problem.eq_rhs[r]
                                                : problem.ge_rhs[r - m_eq]);
            const auto& row =
                r < m_eq ? problem.eq_lhs[r] : problem.ge_lhs[r - m_eq];
            const int sign = rhs < 0 ? -1 : 1;
            if (sign < 0) rhs = -rhs;
            for (int j = 0; j < n; ++j) tab_[r][j] = sign * to_rational(row[j]);
            if (r >= m_eq) tab_[r][n + (r - m_eq)] = Rational(-sign);
            tab_[r][n + n_surplus + r] = 1;
            tab_[r][ncols] = rhs;
            basis_[r] = n + n_surplus + r;
        }

        std::vector<Rational> cost1(ncols, Rational(0));
        for (int j = n + n_surplus; j < ncols; ++j) cost1[j] = 1;
        run_phase(cost1, /*allow_artificials=*/true, m, ncols);

        Rational art_sum = 0;
        for (int r = 0; r < m; ++r)
            if (basis_[r] >= n + n_surplus) art_sum += tab_[r][ncols];
        if (art_sum != 0) return {LpStatus::INFEASIBLE, Rational(0), {}};

        for (int r = 0; r < m; ++r) {
            if (basis_[r] < n + n_surplus) continue;
            for (int j = 0; j < n + n_surplus; ++j)
                if (tab_[r][j] != 0) {
                    pivot(r, j, m, ncols);
                    break;
                }
        }

        std::vector<Rational> cost2(ncols, Rational(0));
        for (int j = 0; j < n; ++j) {
            Rational c = to_rational(problem.objective[j]);
            cost2[j] = problem.maximize ? -c : c;
        }
        if (!run_phase(cost2, /*allow_artificials=*/false, m, ncols))
            return {LpStatus::UNBOUNDED, Rational(0), {}};

        ExactSolution sol;
        sol.status = LpStatus::OPTIMAL;
        sol.point.assign(n, Rational(0));
        for (int r = 0; r < m; ++r)
            if (basis_[r] < n) sol.point[basis_[r]] = tab_[r][ncols];
        sol.value = 0;
        for (int j = 0; j < n; ++j)
            sol.value += to_rational(problem.objective[j]) * sol.point[j];
        return sol;
    }

private:
    std::vector<std::vector<Rational>> tab_;
    std::vector<int> basis_;

    bool run_phase(const std::vector<Rational>& cost, bool allow_artificials,
                   int m, int ncols) {
        const int first_artificial = ncols - m;
        for (;;) {
            int enter = -1;
            for (int j = 0; j < ncols; ++j) {
                if (!allow_artificials && j >= first_artificial) break;
                Rational reduced = cost[j];
                for (int r = 0; r < m; ++r)
                    reduced -= cost[basis_[r]] * tab_[r][j];
                if (reduced < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;

            int leave = -1;
            Rational best;
            for (int r = 0; r < m; ++r) {
                if (tab_[r][enter] <= 0) continue;
                Rational ratio = tab_[r][ncols] / tab_[r][enter];
                if (leave < 0 || ratio < best ||
                    (ratio == best && basis_[r] < basis_[leave])) {
                    best = ratio;
                    leave = r;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter, m, ncols);
        }
    }

    void pivot(int row, int col, int m, int ncols) {
        const Rational piv = tab_[row][col];
        for (int j = 0; j <= ncols; ++j) tab_[row][j] /= piv;
        for (int r = 0; r < m; ++r) {
            if (r == row || tab_[r][col] == 0) continue;
            const Rational factor = tab_[r][col];
            for (int j = 0; j <= ncols; ++j)
                tab_[r][j] -= factor * tab_[row][j];
        }
        basis_[row] = col;
    }
};

inline ExactSolution exact_solve(const LpProblem& problem) {
    ExactSimplex solver;
    return solver.solve(problem);
}

inline bool exact_feasible(const FiducialDraw& draw,
                           const AssumptionSet& assumptions) {
    const auto strata = ActiveStrata::from(assumptions);
    return exact_solve(draw_polytope(draw, strata)).status == LpStatus::OPTIMAL;
}

// Exact feasibility of the empirical cell proportions. Each cell row is
// scaled by its arm total so every coefficient and right-hand side is an
// integer, hence exactly representable as a double; the check is then free of
// rounding in the rationals.
inline bool exact_empirical_feasible(const CountsTable& counts,
                                     const AssumptionSet& assumptions) {
    const auto strata = ActiveStrata::from(assumptions);
    LpProblem lp;
    lp.num_vars = static_cast<int>(strata.size());
    lp.objective.assign(lp.num_vars, 0.0);
    lp.eq_lhs.push_back(std::vector<double>(lp.num_vars, 1.0));
    lp.eq_rhs.push_back(1.0);
    for (int z = 0; z < 2; ++z) {
        const auto total = static_cast<double>(counts.arm_total(z));
        for (int a = 0; a < 2; ++a) {
            for (int y = 0; y < 2; ++y) {
                const int cell = cell_index(z, a, y);
                auto row = cell_row(strata, cell);
                for (auto& v : row) v *= total;
                lp.eq_lhs.push_back(std::move(row));
                lp.eq_rhs.push_back(static_cast<double>(counts.n[cell]));
            }
        }
    }
    return exact_solve(lp).status == LpStatus::OPTIMAL;
}

// Exhaustive basic-solution enumeration in exact arithmetic. Only meant for
// the fixed stratum-polytope family; the basis count is capped hard.
inline ExactSolution vertex_enumerate(const LpProblem& problem) {
    const int n = problem.num_vars;
    const int m_eq = static_cast<int>(problem.eq_rhs.size());
    const int m_ge = static_cast<int>(problem.ge_rhs.size());
    const int m = m_eq + m_ge;
    const int ncols = n + m_ge;  // structural + surplus
    if (n > 24 || m > 14) throw InstanceTooLarge();

    std::vector<std::vector<Rational>> A(m, std::vector<Rational>(ncols, 0));
    std::vector<Rational> b(m);
    std::vector<Rational> c(ncols, 0);
    for (int r = 0; r < m; ++r) {
        const auto& row = r < m_eq ? problem.eq_lhs[r] : problem.ge_lhs[r - m_eq];
        for (int j = 0; j < n; ++j) A[r][j] = to_rational(row[j]);
        if (r >= m_eq) A[r][n + (r - m_eq)] = -1;
        b[r] = to_rational(r < m_eq ? problem.eq_rhs[r] : problem.ge_rhs[r - m_eq]);
    }
    for (int j = 0; j < n; ++j) c[j] = to_rational(problem.objective[j]);

    // Row-reduce the augmented system exactly: an inconsistent row proves
    // infeasibility outright, and dependent rows are dropped so that every
    // candidate basis below is square.
    {
        std::vector<std::vector<Rational>> aug(m,
                                               std::vector<Rational>(ncols + 1));
        for (int r = 0; r < m; ++r) {
            for (int j = 0; j < ncols; ++j) aug[r][j] = A[r][j];
            aug[r][ncols] = b[r];
        }
        int rank = 0;
        for (int col = 0; col < ncols && rank < m; ++col) {
            int piv = -1;
            for (int r = rank; r < m; ++r)
                if (aug[r][col] != 0) {
                    piv = r;
                    break;
                }
            if (piv < 0) continue;
            std::swap(aug[rank], aug[piv]);
            for (int r = 0; r < m; ++r) {
                if (r == rank || aug[r][col] == 0) continue;
                const Rational f = aug[r][col] / aug[rank][col];
                for (int k = col; k <= ncols; ++k) aug[r][k] -= f * aug[rank][k];
            }
            ++rank;
        }
        for (int r = rank; r < m; ++r)
            if (aug[r][ncols] != 0) return {LpStatus::INFEASIBLE, Rational(0), {}};
        if (rank < m) {
            for (int r = 0; r < rank; ++r) {
                for (int j = 0; j < ncols; ++j) A[r][j] = aug[r][j];
                b[r] = aug[r][ncols];
            }
            A.resize(rank);
            b.resize(rank);
        }
    }
    const int mr = static_cast<int>(b.size());

    unsigned long long bases = 1;
    for (int i = 0; i < mr; ++i) {
        bases = bases * static_cast<unsigned long long>(ncols - i) /
                static_cast<unsigned long long>(i + 1);
        if (bases > 2'000'000ULL) throw InstanceTooLarge();
    }

    bool found = false;
    Rational best = 0;
    std::vector<Rational> best_point;

    std::vector<int> idx(mr);
    for (int i = 0; i < mr; ++i) idx[i] = i;
    auto advance = [&]() {
        int i = mr - 1;
        while (i >= 0 && idx[i] == ncols - mr + i) --i;
        if (i < 0) return false;
        ++idx[i];
        for (int k = i + 1; k < mr; ++k) idx[k] = idx[k - 1] + 1;
        return true;
    };

    std::vector<std::vector<Rational>> mat(mr, std::vector<Rational>(mr + 1));
    do {
        for (int r = 0; r < mr; ++r) {
            for (int k = 0; k < mr; ++k) mat[r][k] = A[r][idx[k]];
            mat[r][mr] = b[r];
        }
        // Gaussian elimination with exact pivoting
        bool singular = false;
        for (int col = 0; col < mr && !singular; ++col) {
            int piv = -1;
            for (int r = col; r < mr; ++r)
                if (mat[r][col] != 0) {
                    piv = r;
                    break;
                }
            if (piv < 0) {
                singular = true;
                break;
            }
            std::swap(mat[col], mat[piv]);
            for (int r = 0; r < mr; ++r) {
                if (r == col || mat[r][col] == 0) continue;
                const Rational f = mat[r][col] / mat[col][col];
                for (int k = col; k <= mr; ++k) mat[r][k] -= f * mat[col][k];
            }
        }
        if (singular) continue;
        bool nonneg = true;
        std::vector<Rational> x(ncols, 0);
        for (int k = 0; k < mr; ++k) {
            const Rational v = mat[k][mr] / mat[k][k];
            if (v < 0) {
                nonneg = false;
                break;
            }
            x[idx[k]] = v;
        }
        if (!nonneg) continue;
        Rational val = 0;
        for (int j = 0; j < n; ++j) val += c[j] * x[j];
        const bool better = problem.maximize ? val > best : val < best;
        if (!found || better) {
            found = true;
            best = val;
            best_point.assign(x.begin(), x.begin() + n);
        }
    } while (advance());

    if (!found) return {LpStatus::INFEASIBLE, Rational(0), {}};
    return {LpStatus::OPTIMAL, best, std::move(best_point)};
}

// Bounds of the estimand over {p : observable_map(p) = q, simplex, forced
// zeros}: the plug-in object evaluated at empirical or true cell proportions.
inline std::pair<double, double> plug_in_bounds(const ObservableDist& q,
                                                const Estimand& estimand,
                                                const AssumptionSet& assumptions) {
    const auto strata = ActiveStrata::from(assumptions);
    auto build = [&] { return equality_polytope(q, strata); };
    if (!estimand.is_fractional) {
        auto lp = build();
        lp.objective = strata.reduce(estimand.numerator);
        lp.maximize = false;
        const auto lo = lp_solve(lp);
        if (lo.status == LpStatus::INFEASIBLE) throw InfeasibleAtPlugIn();
        lp.maximize = true;
        const auto hi = lp_solve(lp);
        return {lo.value, hi.value};
    }
    try {
        const auto lo =
            bound_fractional_over(build, strata, estimand, Direction::MIN);
        const auto hi =
            bound_fractional_over(build, strata, estimand, Direction::MAX);
        return {lo.value, hi.value};
    } catch (const InfeasibleDraw&) {
        throw InfeasibleAtPlugIn();
    }
}

inline std::pair<double, double> plug_in_bounds(const CountsTable& counts,
                                                const Estimand& estimand,
                                                const AssumptionSet& assumptions) {
    return plug_in_bounds(empirical_proportions(counts), estimand, assumptions);
}

// Wald-type closed form for the complier effect under no-defiers.
inline double monotone_cace_closed_form(const ObservableDist& q) {
    const auto at = [&](int z, int a, int y) { return q.q[cell_index(z, a, y)]; };
    const double num = at(0, 0, 0) - at(1, 1, 0) - at(1, 0, 0) + at(0, 1, 0);
    const double den = (at(0, 0, 0) + at(1, 1, 0) + at(0, 0, 1) + at(1, 1, 1) -
                        at(1, 0, 0) - at(0, 1, 0) - at(1, 0, 1) - at(0, 1, 1)) /
                       2.0;
    if (den == 0.0) throw ZeroComplianceMass();
    return num / den;
}

}  // namespace ivbound::oracle

#endif  // IVBOUND_ORACLE_HPP
