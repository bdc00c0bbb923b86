#ifndef IVBOUND_SIM_HPP
#define IVBOUND_SIM_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ivbound/engine.hpp"
#include "ivbound/errors.hpp"
#include "ivbound/model.hpp"
#include "ivbound/oracle.hpp"
#include "ivbound/rng.hpp"

namespace ivbound::sim {

enum class ScenarioId { SCENARIO_1, SCENARIO_2 };

// Structural model: U,Z ~ Bernoulli(1/2) (U degenerate when absent),
// P(A=1|U,Z) and P(Y=1|U,A) linear in their arguments.
struct ScenarioSpec {
    ScenarioId id;
    bool has_confounder;
    // P(A=1|U,Z) = a_u*U + a_z*Z + a_0
    double a_u, a_z, a_0;
    // P(Y=1|U,A) = y_u*U + y_a*A + y_0
    double y_u, y_a, y_0;

    double prob_a(int u, int z) const { return a_u * u + a_z * z + a_0; }
    double prob_y(int u, int a) const { return y_u * u + y_a * a + y_0; }
};

inline ScenarioSpec scenario(ScenarioId id) {
    if (id == ScenarioId::SCENARIO_1)
        return {id, true, 1.0 / 16, 2.0 / 5, 1.0 / 2, 1.0 / 16, 1.0 / 5, 1.0 / 15};
    return {id, false, 0.0, 1.0 / 5, 1.0 / 5, 0.0, 1.0 / 5, 1.0 / 15};
}

inline std::vector<TrialRecord> simulate(const ScenarioSpec& spec, long long n,
                                         std::uint64_t seed) {
    std::vector<TrialRecord> records;
    records.reserve(n);
    RngStream rng(seed, 0x5150u);
    for (long long i = 0; i < n; ++i) {
        const int u = spec.has_confounder ? (rng.uniform() < 0.5 ? 1 : 0) : 0;
        const int z = rng.uniform() < 0.5 ? 1 : 0;
        const int a = rng.uniform() < spec.prob_a(u, z) ? 1 : 0;
        const int y = rng.uniform() < spec.prob_y(u, a) ? 1 : 0;
        records.push_back({z, a, y});
    }
    return records;
}

// Exact marginalization over the confounder.
inline ObservableDist true_q(const ScenarioSpec& spec) {
    ObservableDist q;
    const double pu = spec.has_confounder ? 0.5 : 1.0;
    const int u_hi = spec.has_confounder ? 1 : 0;
    for (int z = 0; z < 2; ++z)
        for (int a = 0; a < 2; ++a)
            for (int y = 0; y < 2; ++y) {
                double acc = 0;
                for (int u = 0; u <= u_hi; ++u) {
                    const double pa = spec.prob_a(u, z);
                    const double py = spec.prob_y(u, a);
                    acc += pu * (a ? pa : 1 - pa) * (y ? py : 1 - py);
                }
                q.q[cell_index(z, a, y)] = acc;
            }
    return q;
}

inline double true_ate(const ScenarioSpec& spec) {
    // E[Y(1) - Y(0)] marginalized over U
    return spec.y_a;
}

inline std::pair<double, double> true_bounds(const ScenarioSpec& spec,
                                             const Estimand& estimand,
                                             const AssumptionSet& assumptions) {
    return oracle::plug_in_bounds(true_q(spec), estimand, assumptions);
}

enum class Method { FIDUCIAL, BAYES1, BAYES2 };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::FIDUCIAL: return "fiducial";
        case Method::BAYES1: return "bayes1";
        case Method::BAYES2: return "bayes2";
    }
    return "?";
}

inline Method method_from_string(const std::string& s) {
    if (s == "fiducial") return Method::FIDUCIAL;
    if (s == "bayes1") return Method::BAYES1;
    if (s == "bayes2") return Method::BAYES2;
    throw ParseError("unknown method: " + s);
}

// Recommended comparator priors, cells in (z,a,y) lexicographic order with the
// zero components at (0,1,0) and (0,1,1).
inline std::array<double, kNumCells> comparator_prior(Method m) {
    if (m == Method::BAYES2) return {0.5, 0.5, 0, 0, 1, 1, 1, 1};
    return {1, 1, 0, 0, 1, 1, 1, 1};
}

// Dirichlet-prior comparator: per-arm posterior draws of q, truncated to the
// feasibility set by rejection, bounds per retained draw via the equality LP.
inline AnalysisResult bayesian_comparator(const CountsTable& counts,
                                          const std::array<double, kNumCells>& prior,
                                          long long n_draws, std::uint64_t seed,
                                          const Estimand& estimand,
                                          const AssumptionSet& assumptions,
                                          double level) {
    const auto strata = ActiveStrata::from(assumptions);
    AnalysisResult res;
    long long degenerate = 0;
    for (long long j = 0; j < n_draws; ++j) {
        RngStream rng(seed, static_cast<std::uint64_t>(j));
        ObservableDist q;
        for (int z = 0; z < 2; ++z) {
            std::array<double, 4> alpha;
            for (int c = 0; c < 4; ++c)
                alpha[c] = prior[4 * z + c] +
                           static_cast<double>(counts.n[4 * z + c]);
            const auto d = dirichlet_draw(alpha, rng);
            for (int c = 0; c < 4; ++c) q.q[4 * z + c] = d[c];
        }
        try {
            BoundsSample s;
            if (!estimand.is_fractional) {
                const auto [lo, hi] =
                    oracle::plug_in_bounds(q, estimand, assumptions);
                s.l = lo;
                s.u = hi;
            } else {
                auto build = [&] { return equality_polytope(q, strata); };
                const auto lo = bound_fractional_over(build, strata, estimand,
                                                      Direction::MIN);
                const auto hi = bound_fractional_over(build, strata, estimand,
                                                      Direction::MAX);
                s.l = lo.value;
                s.u = hi.value;
                s.degenerate = lo.degenerate || hi.degenerate;
            }
            if (s.degenerate) ++degenerate;
            res.samples.push_back(s);
        } catch (const InfeasibleAtPlugIn&) {
        } catch (const InfeasibleDraw&) {
        }
    }
    if (res.samples.empty()) throw AllDrawsInfeasible();

    res.accepted = static_cast<long long>(res.samples.size());
    res.attempts = n_draws;
    res.acceptance_rate =
        static_cast<double>(res.accepted) / static_cast<double>(n_draws);
    std::vector<double> ls, us;
    for (const auto& s : res.samples) {
        ls.push_back(s.l);
        us.push_back(s.u);
    }
    const double tail = (1.0 - level) / 2.0;
    res.lower_ci = quantile_ci(ls, tail, 1.0 - tail);
    res.upper_ci = quantile_ci(us, tail, 1.0 - tail);
    res.lower_point = median(ls);
    res.upper_point = median(us);
    res.degenerate_fraction =
        static_cast<double>(degenerate) / static_cast<double>(res.accepted);
    res.estimand_kind = estimand.kind;
    res.assumption_label = assumptions.label;
    res.seed = seed;
    res.level = level;
    return res;
}

enum class BoundSide { LOWER, UPPER };

struct CoverageRow {
    long long n = 0;
    BoundSide side = BoundSide::LOWER;
    double lr_percent = 0.0;  // true bound below the CI lower limit
    double ur_percent = 0.0;  // true bound above the CI upper limit
    double mean_width = 0.0;
    long long stalled = 0;  // replications excluded from the error rates
    Method method = Method::FIDUCIAL;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b) {
    std::uint64_t s = seed ^ (a * 0x9e3779b97f4a7c15ULL) ^
                      (b * 0xd1342543de82ef95ULL);
    return detail::splitmix64(s);
}

inline std::vector<CoverageRow> coverage_experiment(
    const ScenarioSpec& spec, const std::vector<long long>& n_list,
    long long replications, long long n_mcmc, double level, Method method,
    const Estimand& estimand, const AssumptionSet& assumptions,
    std::uint64_t seed, int workers = 1) {
    const auto [true_lo, true_hi] = true_bounds(spec, estimand, assumptions);

    std::vector<CoverageRow> rows;
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        const long long n = n_list[ni];
        long long lr_lo = 0, ur_lo = 0, lr_hi = 0, ur_hi = 0, stalled = 0;
        double width_lo = 0, width_hi = 0;
        long long used = 0;
        for (long long rep = 0; rep < replications; ++rep) {
            // the dataset seed depends only on (n, rep): methods share datasets
            const auto data_seed = mix_seed(seed, ni, rep);
            const auto run_seed = mix_seed(seed ^ 0xabcdef12345ULL, ni, rep);
            const auto records = simulate(spec, n, data_seed);
            try {
                const auto counts = summarize(records);
                AnalysisResult res;
                if (method == Method::FIDUCIAL) {
                    res = analyze(counts, estimand, assumptions, n_mcmc,
                                  run_seed, level, workers);
                } else {
                    res = bayesian_comparator(counts, comparator_prior(method),
                                              n_mcmc, run_seed, estimand,
                                              assumptions, level);
                }
                ++used;
                if (true_lo < res.lower_ci.low) ++lr_lo;
                if (true_lo > res.lower_ci.high) ++ur_lo;
                if (true_hi < res.upper_ci.low) ++lr_hi;
                if (true_hi > res.upper_ci.high) ++ur_hi;
                width_lo += res.lower_ci.high - res.lower_ci.low;
                width_hi += res.upper_ci.high - res.upper_ci.low;
            } catch (const AcceptanceStalled&) {
                ++stalled;
            } catch (const MissingArm&) {
                ++stalled;
            } catch (const AllDrawsInfeasible&) {
                ++stalled;
            }
        }
        const double denom = used > 0 ? static_cast<double>(used) : 1.0;
        rows.push_back({n, BoundSide::LOWER, 100.0 * lr_lo / denom,
                        100.0 * ur_lo / denom, width_lo / denom, stalled,
                        method});
        rows.push_back({n, BoundSide::UPPER, 100.0 * lr_hi / denom,
                        100.0 * ur_hi / denom, width_hi / denom, stalled,
                        method});
    }
    return rows;
}

}  // namespace ivbound::sim

#endif  // IVBOUND_SIM_HPP
