#ifndef IVBOUND_ENGINE_HPP
#define IVBOUND_ENGINE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "ivbound/errors.hpp"
#include "ivbound/kernel.hpp"
#include "ivbound/model.hpp"
#include "ivbound/rng.hpp"

namespace ivbound {

struct BoundsSample {
    double l = 0.0;
    double u = 0.0;
    bool degenerate = false;
};

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

struct AnalysisResult {
    std::vector<BoundsSample> samples;
    long long accepted = 0;
    long long attempts = 0;
    double acceptance_rate = 0.0;
    double lower_point = 0.0;
    double upper_point = 0.0;
    Interval lower_ci;
    Interval upper_ci;
    double degenerate_fraction = 0.0;
    // config echo
    EstimandKind estimand_kind = EstimandKind::ATE;
    AssumptionLabel assumption_label = AssumptionLabel::CORE_IV;
    std::uint64_t seed = 0;
    double level = 0.95;
};

namespace detail {

// Static index-chunked parallel map; the work done for index i never depends
// on scheduling, so results are identical for any worker count.
template <class Fn>
inline void parallel_for(long long n, int workers, Fn&& fn) {
    workers = std::max(1, workers);
    if (workers == 1 || n < 2) {
        for (long long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (long long i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

// Stream derivation: iteration j, attempt k maps to stream_id j*2^20 + k.
inline constexpr std::uint64_t kAttemptStride = 1ULL << 20;

struct AcceptedDraws {
    std::vector<FiducialDraw> draws;
    long long attempts = 0;
};

// Acceptance sampling: per iteration, propose from the per-arm Dirichlet until
// a draw passes the feasibility LP. Each iteration carries its own attempt
// budget (max_attempts / n_mcmc) so the outcome is independent of how
// iterations are scheduled over workers.
inline AcceptedDraws run_acceptance_sampler(const CountsTable& counts,
                                            const AssumptionSet& assumptions,
                                            long long n_mcmc, std::uint64_t seed,
                                            long long max_attempts,
                                            int workers = 1) {
    const long long budget =
        std::max<long long>(1, std::min(max_attempts / n_mcmc,
                                        static_cast<long long>(kAttemptStride)));
    AcceptedDraws out;
    out.draws.resize(n_mcmc);
    std::vector<long long> attempts(n_mcmc, 0);
    std::vector<char> stalled(n_mcmc, 0);

    detail::parallel_for(n_mcmc, workers, [&](long long j) {
        for (long long k = 0; k < budget; ++k) {
            RngStream rng(seed, static_cast<std::uint64_t>(j) * kAttemptStride +
                                    static_cast<std::uint64_t>(k));
            const FiducialDraw draw = propose(counts, rng);
            ++attempts[j];
            if (feasible(draw, assumptions)) {
                out.draws[j] = draw;
                return;
            }
        }
        stalled[j] = 1;
    });

    long long total = 0;
    for (long long j = 0; j < n_mcmc; ++j) {
        total += attempts[j];
        if (stalled[j]) throw AcceptanceStalled(total, j);
    }
    out.attempts = total;
    return out;
}

inline std::vector<BoundsSample> bounds_for_draws(
    const std::vector<FiducialDraw>& draws, const Estimand& estimand,
    const AssumptionSet& assumptions, int workers = 1) {
    std::vector<BoundsSample> out(draws.size());
    detail::parallel_for(static_cast<long long>(draws.size()), workers,
                         [&](long long j) {
                             const auto& d = draws[j];
                             BoundsSample s;
                             if (estimand.is_fractional) {
                                 const auto lo = bound_fractional(
                                     d, estimand, assumptions, Direction::MIN);
                                 const auto hi = bound_fractional(
                                     d, estimand, assumptions, Direction::MAX);
                                 s.l = lo.value;
                                 s.u = hi.value;
                                 s.degenerate = lo.degenerate || hi.degenerate;
                             } else {
                                 s.l = bound_linear(d, estimand, assumptions,
                                                    Direction::MIN);
                                 s.u = bound_linear(d, estimand, assumptions,
                                                    Direction::MAX);
                             }
                             out[j] = s;
                         });
    return out;
}

// Empirical quantile: the ceil(p*m)-th order statistic, 1-based, clamped.
inline double empirical_quantile(std::vector<double> values, double prob) {
    if (values.empty()) throw EmptySamples();
    std::sort(values.begin(), values.end());
    const auto m = static_cast<long long>(values.size());
    long long idx = static_cast<long long>(
        std::ceil(prob * static_cast<double>(m)));
    idx = std::clamp<long long>(idx, 1, m);
    return values[idx - 1];
}

inline Interval quantile_ci(const std::vector<double>& values, double prob_low,
                            double prob_high) {
    if (values.empty()) throw EmptySamples();
    return {empirical_quantile(values, prob_low),
            empirical_quantile(values, prob_high)};
}

inline double median(std::vector<double> values) {
    if (values.empty()) throw EmptySamples();
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    if (m % 2 == 1) return values[m / 2];
    return 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

inline AnalysisResult analyze(const CountsTable& counts, const Estimand& estimand,
                              const AssumptionSet& assumptions, long long n_mcmc,
                              std::uint64_t seed, double level,
                              int workers = 1, long long max_attempts = -1) {
    if (max_attempts < 0) max_attempts = 1000 * n_mcmc;
    const auto accepted = run_acceptance_sampler(counts, assumptions, n_mcmc,
                                                 seed, max_attempts, workers);
    AnalysisResult res;
    res.samples =
        bounds_for_draws(accepted.draws, estimand, assumptions, workers);
    res.accepted = n_mcmc;
    res.attempts = accepted.attempts;
    res.acceptance_rate =
        static_cast<double>(n_mcmc) / static_cast<double>(accepted.attempts);
    std::vector<double> ls, us;
    ls.reserve(res.samples.size());
    us.reserve(res.samples.size());
    long long degenerate = 0;
    for (const auto& s : res.samples) {
        ls.push_back(s.l);
        us.push_back(s.u);
        if (s.degenerate) ++degenerate;
    }
    const double tail = (1.0 - level) / 2.0;
    res.lower_ci = quantile_ci(ls, tail, 1.0 - tail);
    res.upper_ci = quantile_ci(us, tail, 1.0 - tail);
    res.lower_point = median(ls);
    res.upper_point = median(us);
    res.degenerate_fraction =
        static_cast<double>(degenerate) / static_cast<double>(n_mcmc);
    res.estimand_kind = estimand.kind;
    res.assumption_label = assumptions.label;
    res.seed = seed;
    res.level = level;
    return res;
}

}  // namespace ivbound

#endif  // IVBOUND_ENGINE_HPP
