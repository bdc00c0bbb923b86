#ifndef IVBOUND_MODEL_HPP
#define IVBOUND_MODEL_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ivbound/errors.hpp"

namespace ivbound {

// One observed record: instrument assignment z, treatment received a, outcome y.
struct TrialRecord {
    int z;
    int a;
    int y;
};

inline constexpr int kNumStrata = 16;
inline constexpr int kNumCells = 8;

// Stratum s = 4*compliance + response, both two-bit codes:
//   compliance = 2*A0 + A1, response = 2*Y0 + Y1.
// Lexicographic in (A0 A1, Y0 Y1), so s runs 00,00 ... 11,11.
inline constexpr int stratum_index(int a0, int a1, int y0, int y1) {
    return 4 * (2 * a0 + a1) + (2 * y0 + y1);
}

// Observed cell c = 4*z + 2*a + y, lexicographic in (z, a, y).
inline constexpr int cell_index(int z, int a, int y) { return 4 * z + 2 * a + y; }

// Whether stratum s contributes to observed cell (z,a,y): a person of type
// (A0,A1,Y0,Y1) lands in that cell when A_z = a and the potential outcome
// under the received treatment equals y.
inline constexpr bool stratum_in_cell(int s, int z, int a, int y) {
    const int a0 = (s >> 3) & 1;
    const int a1 = (s >> 2) & 1;
    const int y0 = (s >> 1) & 1;
    const int y1 = s & 1;
    const int az = (z == 0) ? a0 : a1;
    if (az != a) return false;
    const int outcome = (a == 0) ? y0 : y1;
    return outcome == y;
}

struct CountsTable {
    // n[cell_index(z,a,y)]
    std::array<long long, kNumCells> n{};

    long long arm_total(int z) const {
        long long t = 0;
        for (int c = 4 * z; c < 4 * z + 4; ++c) t += n[c];
        return t;
    }
    long long total() const { return arm_total(0) + arm_total(1); }
};

struct ObservableDist {
    // q[cell_index(z,a,y)], each arm sums to 1.
    std::array<double, kNumCells> q{};

    double arm_sum(int z) const {
        double s = 0;
        for (int c = 4 * z; c < 4 * z + 4; ++c) s += q[c];
        return s;
    }
};

struct StratumVector {
    std::array<double, kNumStrata> p{};

    double sum() const {
        double s = 0;
        for (double v : p) s += v;
        return s;
    }
};

// One fiducial proposal: per arm, the Dirichlet slack plus the four cell
// components (slack[z] + sum of v over the arm = 1).
struct FiducialDraw {
    std::array<double, 2> slack{};
    std::array<double, kNumCells> v{};
};

enum class EstimandKind {
    ATE,
    CACE,
    NUDGE,
    NEVER_TAKER_ACE,
    ALWAYS_TAKER_ACE,
    DEFIER_ACE,
};

// Linear or linear-fractional objective over the 16 strata. Linear estimands
// carry denominator identically zero with is_fractional=false; fractional ones
// carry 0/1 indicator coefficients selecting the conditioning strata.
struct Estimand {
    EstimandKind kind;
    std::array<double, kNumStrata> numerator{};
    std::array<double, kNumStrata> denominator{};
    bool is_fractional = false;

    double evaluate(const StratumVector& p) const {
        double num = 0, den = 0;
        for (int s = 0; s < kNumStrata; ++s) {
            num += numerator[s] * p.p[s];
            den += denominator[s] * p.p[s];
        }
        return is_fractional ? num / den : num;
    }
};

enum class AssumptionLabel { CORE_IV, MONOTONICITY, NEW_DRUG };

struct AssumptionSet {
    AssumptionLabel label;
    std::vector<int> forced_zero;  // stratum indices constrained to p = 0
};

inline AssumptionSet assumptions(AssumptionLabel label) {
    AssumptionSet out{label, {}};
    switch (label) {
        case AssumptionLabel::CORE_IV:
            break;
        case AssumptionLabel::MONOTONICITY:
            // no defiers: compliance 10
            for (int r = 0; r < 4; ++r) out.forced_zero.push_back(4 * 2 + r);
            break;
        case AssumptionLabel::NEW_DRUG:
            // neither defiers nor always-takers: compliance 10 and 11
            for (int r = 0; r < 4; ++r) out.forced_zero.push_back(4 * 2 + r);
            for (int r = 0; r < 4; ++r) out.forced_zero.push_back(4 * 3 + r);
            break;
    }
    return out;
}

inline CountsTable summarize(std::span<const TrialRecord> records) {
    if (records.empty()) throw EmptyData();
    CountsTable counts;
    for (const auto& r : records) counts.n[cell_index(r.z, r.a, r.y)] += 1;
    for (int z = 0; z < 2; ++z)
        if (counts.arm_total(z) == 0) throw MissingArm(z);
    return counts;
}

inline ObservableDist empirical_proportions(const CountsTable& counts) {
    ObservableDist q;
    for (int z = 0; z < 2; ++z) {
        const long long nz = counts.arm_total(z);
        if (nz == 0) throw MissingArm(z);
        for (int c = 4 * z; c < 4 * z + 4; ++c)
            q.q[c] = static_cast<double>(counts.n[c]) / static_cast<double>(nz);
    }
    return q;
}

// The fixed linear map from latent strata to observable cell probabilities.
inline ObservableDist observable_map(const StratumVector& p) {
    ObservableDist q;
    for (int z = 0; z < 2; ++z)
        for (int a = 0; a < 2; ++a)
            for (int y = 0; y < 2; ++y) {
                double acc = 0;
                for (int s = 0; s < kNumStrata; ++s)
                    if (stratum_in_cell(s, z, a, y)) acc += p.p[s];
                q.q[cell_index(z, a, y)] = acc;
            }
    return q;
}

inline Estimand estimand(EstimandKind kind) {
    Estimand e;
    e.kind = kind;
    auto stratum_ace = [&](int compliance) {
        e.numerator[4 * compliance + 1] = 1.0;   // response 01
        e.numerator[4 * compliance + 2] = -1.0;  // response 10
        for (int r = 0; r < 4; ++r) e.denominator[4 * compliance + r] = 1.0;
        e.is_fractional = true;
    };
    switch (kind) {
        case EstimandKind::ATE:
            for (int c = 0; c < 4; ++c) {
                e.numerator[4 * c + 1] = 1.0;
                e.numerator[4 * c + 2] = -1.0;
            }
            break;
        case EstimandKind::CACE:
            stratum_ace(1);  // compliers 01
            break;
        case EstimandKind::NUDGE:
            for (int c : {1, 2}) {  // compliers and defiers
                e.numerator[4 * c + 1] = 1.0;
                e.numerator[4 * c + 2] = -1.0;
                for (int r = 0; r < 4; ++r) e.denominator[4 * c + r] = 1.0;
            }
            e.is_fractional = true;
            break;
        case EstimandKind::NEVER_TAKER_ACE:
            stratum_ace(0);
            break;
        case EstimandKind::DEFIER_ACE:
            stratum_ace(2);
            break;
        case EstimandKind::ALWAYS_TAKER_ACE:
            stratum_ace(3);
            break;
        default:
            throw UnknownEstimand("unsupported kind code");
    }
    return e;
}

inline std::string to_string(EstimandKind k) {
    switch (k) {
        case EstimandKind::ATE: return "ate";
        case EstimandKind::CACE: return "cace";
        case EstimandKind::NUDGE: return "nudge";
        case EstimandKind::NEVER_TAKER_ACE: return "never-taker-ace";
        case EstimandKind::ALWAYS_TAKER_ACE: return "always-taker-ace";
        case EstimandKind::DEFIER_ACE: return "defier-ace";
    }
    return "?";
}

inline EstimandKind estimand_kind_from_string(const std::string& s) {
    if (s == "ate") return EstimandKind::ATE;
    if (s == "cace") return EstimandKind::CACE;
    if (s == "nudge") return EstimandKind::NUDGE;
    if (s == "never-taker-ace") return EstimandKind::NEVER_TAKER_ACE;
    if (s == "always-taker-ace") return EstimandKind::ALWAYS_TAKER_ACE;
    if (s == "defier-ace") return EstimandKind::DEFIER_ACE;
    throw UnknownEstimand(s);
}

inline std::string to_string(AssumptionLabel l) {
    switch (l) {
        case AssumptionLabel::CORE_IV: return "core";
        case AssumptionLabel::MONOTONICITY: return "monotonicity";
        case AssumptionLabel::NEW_DRUG: return "new-drug";
    }
    return "?";
}

inline AssumptionLabel assumption_label_from_string(const std::string& s) {
    if (s == "core") return AssumptionLabel::CORE_IV;
    if (s == "monotonicity") return AssumptionLabel::MONOTONICITY;
    if (s == "new-drug") return AssumptionLabel::NEW_DRUG;
    throw ParseError("unknown assumption set: " + s);
}

}  // namespace ivbound

#endif  // IVBOUND_MODEL_HPP
