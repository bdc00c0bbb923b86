#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "ivbound/model.hpp"
#include "ivbound/rng.hpp"

using namespace ivbound;

namespace {

// Regularized incomplete beta via Lentz's continued fraction; used as an
// independent route to the Beta CDF for the marginal checks.
double betacf(double a, double b, double x) {
    const double tiny = 1e-30;
    double qab = a + b, qap = a + 1, qam = a - 1;
    double c = 1, d = 1 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1) < 1e-12) break;
    }
    return h;
}

double beta_cdf(double a, double b, double x) {
    if (x <= 0) return 0;
    if (x >= 1) return 1;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                            std::lgamma(b) + a * std::log(x) +
                            b * std::log(1 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1) / (a + b + 2)) return front * betacf(a, b, x) / a;
    return 1 - front * betacf(b, a, 1 - x) / b;
}

}  // namespace

TEST_CASE("dirichlet trivial cases") {
    RngStream rng(0, 0);
    const std::vector<double> one = {5.0};
    CHECK(dirichlet_draw(one, rng) == std::vector<double>{1.0});

    const std::vector<double> with_zero = {1.0, 0.0, 3.0};
    const auto d = dirichlet_draw(with_zero, rng);
    CHECK(d[1] == 0.0);
    CHECK(d[0] > 0.0);
    CHECK(d[2] > 0.0);
    CHECK_THAT(d[0] + d[2], Catch::Matchers::WithinAbs(1.0, 1e-12));

    const std::vector<double> zeros = {0.0, 0.0};
    CHECK_THROWS_AS(dirichlet_draw(zeros, rng), AllZeroAlpha);
    CHECK_THROWS_AS(dirichlet_draw(std::vector<double>{}, rng), AllZeroAlpha);
}

TEST_CASE("dirichlet moments match alpha / sum(alpha)") {
    const std::vector<double> alpha = {1, 2, 3, 4};
    const double a0 = 10;
    const int n = 100'000;
    std::array<double, 4> mean{};
    for (int i = 0; i < n; ++i) {
        RngStream rng(42, i);
        const auto d = dirichlet_draw(alpha, rng);
        for (int k = 0; k < 4; ++k) mean[k] += d[k];
    }
    for (int k = 0; k < 4; ++k) {
        mean[k] /= n;
        const double expect = alpha[k] / a0;
        const double sd =
            std::sqrt(alpha[k] * (a0 - alpha[k]) / (a0 * a0 * (a0 + 1)));
        CHECK(std::abs(mean[k] - expect) < 4 * sd / std::sqrt(double(n)));
    }
}

TEST_CASE("propose with a single observed cell per arm") {
    CountsTable c;
    c.n[cell_index(0, 0, 0)] = 1;
    c.n[cell_index(1, 0, 0)] = 3;
    RngStream rng(7, 0);
    const auto d = propose(c, rng);
    for (int cell = 1; cell < 4; ++cell) CHECK(d.v[cell] == 0.0);
    CHECK(d.v[0] > 0.0);
    CHECK_THAT(d.slack[0] + d.v[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(d.slack[1] + d.v[4], Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("propose normalizes each arm") {
    CountsTable c;
    c.n = {3, 1, 4, 1, 5, 9, 2, 6};
    for (int i = 0; i < 200; ++i) {
        RngStream rng(13, i);
        const auto d = propose(c, rng);
        for (int z = 0; z < 2; ++z) {
            double s = d.slack[z];
            for (int cell = 4 * z; cell < 4 * z + 4; ++cell) s += d.v[cell];
            CHECK_THAT(s, Catch::Matchers::WithinAbs(1.0, 1e-12));
        }
    }
}

TEST_CASE("marginal of one cell is Beta(n_zay, 1 + n_z - n_zay)") {
    CountsTable c;
    c.n = {3, 2, 4, 1, 1, 1, 1, 1};
    const double n0 = 10;
    const double a = 3, b = 1 + n0 - a;  // marginal of cell (0,0,0)
    const int n = 100'000;
    std::vector<double> samples(n);
    for (int i = 0; i < n; ++i) {
        RngStream rng(99, i);
        samples[i] = propose(c, rng).v[cell_index(0, 0, 0)];
    }
    std::sort(samples.begin(), samples.end());
    double ks = 0;
    for (int i = 0; i < n; ++i) {
        const double cdf = beta_cdf(a, b, samples[i]);
        ks = std::max(ks, std::abs(cdf - (i + 1.0) / n));
        ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
    }
    // 99% Kolmogorov-Smirnov band
    CHECK(ks < 1.63 / std::sqrt(double(n)));
}

TEST_CASE("slack marginal mean is 1/(n_z + 1)") {
    CountsTable c;
    c.n = {3, 2, 4, 1, 1, 1, 1, 1};
    const double n0 = 10;
    const int n = 100'000;
    double mean = 0;
    for (int i = 0; i < n; ++i) {
        RngStream rng(123, i);
        mean += propose(c, rng).slack[0];
    }
    mean /= n;
    const double expect = 1 / (n0 + 1);
    const double sd = std::sqrt(n0 / ((n0 + 1) * (n0 + 1) * (n0 + 2)));
    CHECK(std::abs(mean - expect) < 4 * sd / std::sqrt(double(n)));
}

TEST_CASE("identical (seed, stream) reproduces identical draws") {
    CountsTable c;
    c.n = {3, 1, 4, 1, 5, 9, 2, 6};
    for (int i = 0; i < 10; ++i) {
        RngStream r1(5, i), r2(5, i);
        const auto d1 = propose(c, r1);
        const auto d2 = propose(c, r2);
        CHECK(d1.slack == d2.slack);
        CHECK(d1.v == d2.v);
    }
}

TEST_CASE("arm draws are exchangeable under cell relabeling") {
    CountsTable c1, c2;
    c1.n = {1, 2, 3, 4, 1, 1, 1, 1};
    c2.n = {4, 3, 2, 1, 1, 1, 1, 1};  // arm 0 cells reversed
    const int n = 50'000;
    double mean_big_1 = 0, mean_big_2 = 0;
    for (int i = 0; i < n; ++i) {
        RngStream ra(77, i), rb(78, i);
        mean_big_1 += propose(c1, ra).v[3];  // the count-4 cell
        mean_big_2 += propose(c2, rb).v[0];
    }
    mean_big_1 /= n;
    mean_big_2 /= n;
    CHECK(std::abs(mean_big_1 - mean_big_2) < 0.005);
    // Dirichlet mean of the count-4 component: 4/11
    CHECK(std::abs(mean_big_1 - 4.0 / 11.0) < 0.005);
}
