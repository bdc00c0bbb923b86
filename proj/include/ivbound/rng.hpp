#ifndef IVBOUND_RNG_HPP
#define IVBOUND_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ivbound/errors.hpp"
#include "ivbound/model.hpp"

namespace ivbound {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

// Counter-indexed generator: (seed, stream_id) fully determines the sequence,
// so iterations can be distributed over any number of workers without changing
// results. xoshiro256** seeded through splitmix64.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t sm = seed;
        sm ^= 0x6a09e667f3bcc909ULL;
        (void)detail::splitmix64(sm);
        sm ^= stream_id * 0x9e3779b97f4a7c15ULL + 0xd1342543de82ef95ULL;
        for (auto& w : state_) w = detail::splitmix64(sm);
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t x, int k) {
            return (x << k) | (x >> (64 - k));
        };
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on (0,1); never returns exactly 0 or 1.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via the polar method.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    // Gamma(shape, 1) by Marsaglia-Tsang squeeze/rejection; shapes in (0,1)
    // use the Gamma(shape+1) boost. shape = 0 is an exact point mass at 0.
    double gamma(double shape) {
        if (shape == 0.0) return 0.0;
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            return g * std::pow(uniform(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Dirichlet(alpha) by normalized independent Gamma(alpha_i, 1) variates.
// Components with alpha_i = 0 are exact zeros.
inline std::vector<double> dirichlet_draw(std::span<const double> alpha,
                                          RngStream& rng) {
    bool any_positive = false;
    for (double a : alpha)
        if (a > 0.0) any_positive = true;
    if (alpha.empty() || !any_positive) throw AllZeroAlpha();

    std::vector<double> out(alpha.size());
    double total = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        out[i] = rng.gamma(alpha[i]);
        total += out[i];
    }
    for (double& x : out) x /= total;
    return out;
}

// One fiducial proposal: per arm, Dirichlet(1, n_z00, ..., n_z11) where the
// leading component is the slack.
inline FiducialDraw propose(const CountsTable& counts, RngStream& rng) {
    FiducialDraw draw;
    for (int z = 0; z < 2; ++z) {
        std::array<double, 5> alpha{1.0, 0.0, 0.0, 0.0, 0.0};
        for (int c = 0; c < 4; ++c)
            alpha[c + 1] = static_cast<double>(counts.n[4 * z + c]);
        const auto d = dirichlet_draw(alpha, rng);
        draw.slack[z] = d[0];
        for (int c = 0; c < 4; ++c) draw.v[4 * z + c] = d[c + 1];
    }
    return draw;
}

}  // namespace ivbound

#endif  // IVBOUND_RNG_HPP
