#ifndef IVBOUND_LP_HPP
#define IVBOUND_LP_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "ivbound/errors.hpp"

namespace ivbound {

// Canonical form: optimize c'x subject to A_eq x = b_eq, A_ge x >= b_ge, x >= 0.
struct LpProblem {
    int num_vars = 0;
    bool maximize = false;
    std::vector<double> objective;
    std::vector<std::vector<double>> eq_lhs;
    std::vector<double> eq_rhs;
    std::vector<std::vector<double>> ge_lhs;
    std::vector<double> ge_rhs;
};

enum class LpStatus { OPTIMAL, INFEASIBLE, UNBOUNDED };

struct LpSolution {
    LpStatus status;
    double value = 0.0;
    std::vector<double> point;
};

// Dense two-phase primal simplex with Bland's anti-cycling rule: entering
// column is the lowest index with negative reduced cost, leaving row breaks
// ratio ties by lowest basic index. Pivot path is fully deterministic.
class SimplexSolver {
public:
    static constexpr double kPivotEps = 1e-9;
    static constexpr double kPivotFailure = 1e-11;
    static constexpr double kFeasTol = 1e-8;

    LpSolution solve(const LpProblem& problem) {
        const int n = problem.num_vars;
        const int m_eq = static_cast<int>(problem.eq_rhs.size());
        const int m_ge = static_cast<int>(problem.ge_rhs.size());
        const int m = m_eq + m_ge;
        const int n_surplus = m_ge;
        const int n_art = m;
        const int ncols = n + n_surplus + n_art;

        // tableau rows: [x | surplus | artificial | rhs], rhs kept nonnegative
        tab_.assign(m, std::vector<double>(ncols + 1, 0.0));
        basis_.assign(m, 0);

        for (int r = 0; r < m; ++r) {
            double rhs;
            std::vector<double> row(n, 0.0);
            double surplus_sign = 0.0;
            if (r < m_eq) {
                row = problem.eq_lhs[r];
                rhs = problem.eq_rhs[r];
            } else {
                row = problem.ge_lhs[r - m_eq];
                rhs = problem.ge_rhs[r - m_eq];
                surplus_sign = -1.0;
            }
            double sign = 1.0;
            if (rhs < 0) {
                sign = -1.0;
                rhs = -rhs;
            }
            for (int j = 0; j < n; ++j) tab_[r][j] = sign * row[j];
            if (r >= m_eq) tab_[r][n + (r - m_eq)] = sign * surplus_sign;
            tab_[r][n + n_surplus + r] = 1.0;
            tab_[r][ncols] = rhs;
            basis_[r] = n + n_surplus + r;
        }

        // phase 1: minimize the sum of artificials
        std::vector<double> cost(ncols, 0.0);
        for (int j = n + n_surplus; j < ncols; ++j) cost[j] = 1.0;
        run_phase(cost, n + n_surplus, m, ncols);

        double art_sum = 0.0;
        for (int r = 0; r < m; ++r)
            if (basis_[r] >= n + n_surplus) art_sum += tab_[r][ncols];
        if (art_sum > kFeasTol) return {LpStatus::INFEASIBLE, 0.0, {}};

        // drive leftover zero-valued artificials out of the basis
        for (int r = 0; r < m; ++r) {
            if (basis_[r] < n + n_surplus) continue;
            int enter = -1;
            for (int j = 0; j < n + n_surplus; ++j)
                if (std::abs(tab_[r][j]) > kPivotEps) {
                    enter = j;
                    break;
                }
            if (enter >= 0) pivot(r, enter, m, ncols);
            // otherwise the row is redundant; the artificial stays basic at 0
        }

        // phase 2
        std::vector<double> cost2(ncols, 0.0);
        const double sense = problem.maximize ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) cost2[j] = sense * problem.objective[j];
        const bool bounded = run_phase(cost2, n + n_surplus, m, ncols);
        if (!bounded) return {LpStatus::UNBOUNDED, 0.0, {}};

        LpSolution sol;
        sol.status = LpStatus::OPTIMAL;
        sol.point.assign(n, 0.0);
        for (int r = 0; r < m; ++r)
            if (basis_[r] < n) sol.point[basis_[r]] = tab_[r][ncols];
        double value = 0.0;
        for (int j = 0; j < n; ++j) value += problem.objective[j] * sol.point[j];
        sol.value = value;
        return sol;
    }

private:
    std::vector<std::vector<double>> tab_;
    std::vector<int> basis_;

    // Minimizes cost over the current tableau. Columns >= blocked_from are
    // barred from entering (artificials in phase 2). Returns false on
    // unboundedness.
    bool run_phase(const std::vector<double>& cost, int blocked_from, int m,
                   int ncols) {
        std::vector<double> reduced(ncols);
        for (;;) {
            // reduced costs: c_j - c_B' B^{-1} A_j
            for (int j = 0; j < ncols; ++j) {
                double z = 0.0;
                for (int r = 0; r < m; ++r) z += cost[basis_[r]] * tab_[r][j];
                reduced[j] = cost[j] - z;
            }
            int enter = -1;
            for (int j = 0; j < ncols; ++j) {
                if (j >= blocked_from && cost[j] == 0.0) continue;  // barred
                if (reduced[j] < -kPivotEps) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;

            int leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int r = 0; r < m; ++r) {
                const double a = tab_[r][enter];
                if (a > kPivotEps) {
                    const double ratio = tab_[r][ncols] / a;
                    if (ratio < best_ratio - 1e-12 ||
                        (ratio < best_ratio + 1e-12 && leave >= 0 &&
                         basis_[r] < basis_[leave])) {
                        best_ratio = ratio;
                        leave = r;
                    }
                }
            }
            if (leave < 0) return false;  // unbounded
            if (std::abs(tab_[leave][enter]) < kPivotFailure)
                throw NumericalFailure("simplex pivot below threshold");
            pivot(leave, enter, m, ncols);
        }
    }

    void pivot(int row, int col, int m, int ncols) {
        const double piv = tab_[row][col];
        for (int j = 0; j <= ncols; ++j) tab_[row][j] /= piv;
        for (int r = 0; r < m; ++r) {
            if (r == row) continue;
            const double factor = tab_[r][col];
            if (factor == 0.0) continue;
            for (int j = 0; j <= ncols; ++j) tab_[r][j] -= factor * tab_[row][j];
        }
        basis_[row] = col;
    }
};

inline LpSolution lp_solve(const LpProblem& problem) {
    SimplexSolver solver;
    return solver.solve(problem);
}

}  // namespace ivbound

#endif  // IVBOUND_LP_HPP
