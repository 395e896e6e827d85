// Correlations and CHSH statistics over a built space.
//
// Two correlation notions exist per context. The conditional correlation
// C_ij = E(A^(i) B^(j) | eta_a = i, eta_b = j) reproduces the context's own
// statistics (for singlet tables, C_ij = cos(t_i - t'_j)). The absolute
// correlation E_ij = E(A^(i) B^(j)) runs over the whole space and satisfies
// E_ij = u_i v_j C_ij. A CHSH statistic is a +-signed sum over the four
// contexts of a 2x2 grid, with an odd number of minus signs.
//
// Bounds, from loosest to sharpest: the conditional statistic obeys 8 (plug
// C = 4E into the classical bound 2) and 4 (each |C| <= 1); the absolute
// statistic obeys 2 (these are random variables on one space) and, under
// product weights, 1 (|sum of signed u_i v_j C_ij| <= sum u_i v_j = 1).
// Nothing caps the conditional statistic at 2: singlet tables at the right
// angles push it to 2*sqrt(2).
//
// Every space-level value is computed through two routes, the atom
// enumeration and the closed-form table sum, and cross-checked; a mismatch
// raises InternalError.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ctxspace/errors.hpp"
#include "ctxspace/kolmogorov_space.hpp"

namespace ctxspace {

// Slack for bound verdicts: pass iff value <= limit + kBoundSlack.
inline constexpr double kBoundSlack = 1e-9;

// Agreement tolerance between the two computation routes.
inline constexpr double kCrossCheckTolerance = 1e-12;

struct CorrelationPair {
    int i, j;
    double conditional;  // C_ij
    double absolute;     // E_ij = u_i v_j C_ij
};

// Four signs for the contexts (1,1), (1,2), (2,1), (2,2), with an odd number
// of minus signs.
class SignPattern {
public:
    static SignPattern of(const std::array<int, 4>& signs) {
        int minuses = 0;
        for (int s : signs) {
            if (s != 1 && s != -1) throw BadSignPatternError("signs must be +1 or -1");
            if (s < 0) ++minuses;
        }
        if (minuses % 2 == 0) throw BadSignPatternError("need an odd number of minus signs");
        return SignPattern(signs);
    }

    const std::array<int, 4>& signs() const { return signs_; }

    std::string str() const {
        std::string out;
        for (int s : signs_) out += (s > 0 ? '+' : '-');
        return out;
    }

private:
    explicit SignPattern(const std::array<int, 4>& signs) : signs_(signs) {}
    std::array<int, 4> signs_;
};

// The four odd-minus patterns, most-printed form first; ties in maximization
// resolve to the earliest entry.
inline const std::array<SignPattern, 4>& canonical_sign_patterns() {
    static const std::array<SignPattern, 4> patterns = {
        SignPattern::of({+1, +1, +1, -1}), SignPattern::of({+1, +1, -1, +1}),
        SignPattern::of({+1, -1, +1, +1}), SignPattern::of({-1, +1, +1, +1})};
    return patterns;
}

struct ChshStatistic {
    SignPattern pattern;
    double conditional;  // signed sum of the four C_ij
    double absolute;     // signed sum of the four E_ij
};

struct BoundCheck {
    double value;
    double limit;
    bool pass;  // value <= limit + kBoundSlack
};

struct BoundReport {
    ChshStatistic chsh;                // the maximizing statistic (by |conditional|)
    double max_abs_conditional;        // max over patterns of |signed C sum|
    double max_abs_absolute;           // max over patterns of |signed E sum|
    BoundCheck absolute_bound2;        // classical single-space bound
    BoundCheck absolute_bound1;        // sharper bound under product weights
    BoundCheck conditional_bound4;     // each |C| <= 1
    BoundCheck conditional_bound8;     // 4 * absolute bound
    bool uniform_weights;
};

// --- value-level pieces (shared with empirical estimates) -------------------

// values ordered by context: (1,1), (1,2), (2,1), (2,2)
inline double signed_sum(const std::array<double, 4>& values, const SignPattern& pattern) {
    double sum = 0.0;
    for (std::size_t k = 0; k < 4; ++k) sum += pattern.signs()[k] * values[k];
    return sum;
}

inline ChshStatistic chsh_values(const std::array<double, 4>& conditional,
                                 const std::array<double, 4>& absolute,
                                 const SignPattern& pattern) {
    return ChshStatistic{pattern, signed_sum(conditional, pattern),
                         signed_sum(absolute, pattern)};
}

inline ChshStatistic max_chsh_values(const std::array<double, 4>& conditional,
                                     const std::array<double, 4>& absolute) {
    const auto& patterns = canonical_sign_patterns();
    ChshStatistic best = chsh_values(conditional, absolute, patterns[0]);
    for (std::size_t k = 1; k < patterns.size(); ++k) {
        ChshStatistic candidate = chsh_values(conditional, absolute, patterns[k]);
        if (std::abs(candidate.conditional) > std::abs(best.conditional)) best = candidate;
    }
    return best;
}

inline BoundCheck bound_check(double value, double limit) {
    return BoundCheck{value, limit, value <= limit + kBoundSlack};
}

// Bound verdicts must not depend on the chosen pattern, so each statistic is
// maximized over all four patterns before comparing.
inline BoundReport bound_report_from_values(const std::array<double, 4>& conditional,
                                            const std::array<double, 4>& absolute,
                                            bool uniform_weights) {
    double max_cond = 0.0;
    double max_abs = 0.0;
    for (const SignPattern& pattern : canonical_sign_patterns()) {
        max_cond = std::max(max_cond, std::abs(signed_sum(conditional, pattern)));
        max_abs = std::max(max_abs, std::abs(signed_sum(absolute, pattern)));
    }
    BoundReport report{max_chsh_values(conditional, absolute),
                       max_cond,
                       max_abs,
                       bound_check(max_abs, 2.0),
                       bound_check(max_abs, 1.0),
                       bound_check(max_cond, 4.0),
                       bound_check(max_cond, 8.0),
                       uniform_weights};
    return report;
}

// --- space-level operations --------------------------------------------------

// E(A^(i) B^(j) | eta_a = i, eta_b = j). Routes: renormalized atom sum over
// the context, and the table sum over e * e' * p_ij(e, e').
inline double conditional_correlation(const KolmogorovSpace& space, int i, int j) {
    if (i < 1 || i > space.m()) throw IndexOutOfRangeError("i", i, space.m());
    if (j < 1 || j > space.n()) throw IndexOutOfRangeError("j", j, space.n());
    double context_mass = 0.0;
    double signed_mass = 0.0;
    const auto& atoms = space.atoms();
    const auto& masses = space.masses();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        if (atoms[k].i != i || atoms[k].j != j) continue;
        context_mass += masses[k];
        signed_mass += atoms[k].eps * atoms[k].eps_prime * masses[k];
    }
    if (context_mass == 0.0) throw ConditionHasZeroProbabilityError();
    const double via_atoms = signed_mass / context_mass;
    if (space.has_product_weights()) {
        const double via_table = space.family().table(i, j).correlation();
        if (std::abs(via_atoms - via_table) > kCrossCheckTolerance)
            throw InternalError("conditional correlation routes disagree at (" +
                                std::to_string(i) + "," + std::to_string(j) + "): atoms " +
                                detail::num_str(via_atoms) + " vs table " +
                                detail::num_str(via_table));
        return via_table;
    }
    return via_atoms;
}

// E(A^(i) B^(j)) over the whole space. Routes: plain atom sum of
// eval_a * eval_b * mass, and the identity u_i v_j * C_ij.
inline double absolute_correlation(const KolmogorovSpace& space, int i, int j) {
    if (i < 1 || i > space.m()) throw IndexOutOfRangeError("i", i, space.m());
    if (j < 1 || j > space.n()) throw IndexOutOfRangeError("j", j, space.n());
    double sum = 0.0;
    const auto& atoms = space.atoms();
    const auto& masses = space.masses();
    for (std::size_t k = 0; k < atoms.size(); ++k)
        sum += space.eval_a(atoms[k], i) * space.eval_b(atoms[k], j) * masses[k];
    if (space.has_product_weights()) {
        const double via_identity =
            space.weights().joint(i, j) * space.family().table(i, j).correlation();
        if (std::abs(sum - via_identity) > kCrossCheckTolerance)
            throw InternalError("absolute correlation routes disagree at (" + std::to_string(i) +
                                "," + std::to_string(j) + "): atoms " + detail::num_str(sum) +
                                " vs w*C " + detail::num_str(via_identity));
    }
    return sum;
}

inline CorrelationPair correlation_pair(const KolmogorovSpace& space, int i, int j) {
    return CorrelationPair{i, j, conditional_correlation(space, i, j),
                           absolute_correlation(space, i, j)};
}

inline std::vector<CorrelationPair> correlation_table(const KolmogorovSpace& space) {
    std::vector<CorrelationPair> pairs;
    pairs.reserve(static_cast<std::size_t>(space.m()) * static_cast<std::size_t>(space.n()));
    for (int i = 1; i <= space.m(); ++i)
        for (int j = 1; j <= space.n(); ++j) pairs.push_back(correlation_pair(space, i, j));
    return pairs;
}

namespace detail {

inline void require_two_by_two(const KolmogorovSpace& space) {
    if (space.m() != 2 || space.n() != 2) throw NotTwoByTwoError(space.m(), space.n());
}

inline std::pair<std::array<double, 4>, std::array<double, 4>> correlations_2x2(
    const KolmogorovSpace& space) {
    std::array<double, 4> conditional{};
    std::array<double, 4> absolute{};
    std::size_t k = 0;
    for (int i = 1; i <= 2; ++i) {
        for (int j = 1; j <= 2; ++j, ++k) {
            conditional[k] = conditional_correlation(space, i, j);
            absolute[k] = absolute_correlation(space, i, j);
        }
    }
    return {conditional, absolute};
}

}  // namespace detail

inline ChshStatistic chsh(const KolmogorovSpace& space, const SignPattern& pattern) {
    detail::require_two_by_two(space);
    auto [conditional, absolute] = detail::correlations_2x2(space);
    return chsh_values(conditional, absolute, pattern);
}

inline ChshStatistic max_chsh(const KolmogorovSpace& space) {
    detail::require_two_by_two(space);
    auto [conditional, absolute] = detail::correlations_2x2(space);
    return max_chsh_values(conditional, absolute);
}

inline BoundReport bound_report(const KolmogorovSpace& space) {
    detail::require_two_by_two(space);
    auto [conditional, absolute] = detail::correlations_2x2(space);
    const bool uniform = space.has_product_weights() && space.weights().is_uniform();
    return bound_report_from_values(conditional, absolute, uniform);
}

}  // namespace ctxspace
