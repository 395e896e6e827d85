// Outcome probability tables, one per measurement context, and the family
// that collects them.
//
// A context is a joint settings choice: channel i on the A side, channel j on
// the B side. Its table holds the four probabilities p_ij(e, e') of observing
// the outcome pair (e, e') in {-1,+1}^2, stored in the canonical order
// (+,+), (+,-), (-,+), (-,-). Any numbers passing validation are accepted.
// The built-in generator produces the polarization statistics of the
// two-photon singlet state for analyzer angles t and t':
//
//     p(e, e)  = cos^2((t - t') / 2) / 2
//     p(e, -e) = sin^2((t - t') / 2) / 2
//
// All types here are immutable after construction and all operations are pure,
// so unrestricted concurrent use is fine.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctxspace/errors.hpp"

namespace ctxspace {

// Slack for probability sums; individual entries are checked exactly.
inline constexpr double kProbabilitySumTolerance = 1e-12;

// A marginal that shifts by more than this across the other side's settings
// is flagged as signaling.
inline constexpr double kNoSignalingThreshold = 1e-9;

enum class Side { A, B };

// One measurement setting: which side, which channel (1-based).
struct SettingId {
    Side side;
    int index;
};

// Canonical outcome-pair order used in files, sampling, and messages.
inline constexpr std::array<std::pair<int, int>, 4> kOutcomeOrder = {
    {{+1, +1}, {+1, -1}, {-1, +1}, {-1, -1}}};

inline const char* outcome_label(std::size_t k) {
    static constexpr const char* labels[4] = {"(+,+)", "(+,-)", "(-,+)", "(-,-)"};
    return labels[k];
}

inline std::size_t outcome_index(int eps, int eps_prime) {
    if (eps != 1 && eps != -1) throw IndexOutOfRangeError("outcome value", eps, 1);
    if (eps_prime != 1 && eps_prime != -1)
        throw IndexOutOfRangeError("outcome value", eps_prime, 1);
    return (eps < 0 ? 2u : 0u) + (eps_prime < 0 ? 1u : 0u);
}

// Plane angle in radians. Stored as given: the generators are 2*pi periodic,
// so no modular reduction is applied.
class Angle {
public:
    explicit Angle(double radians) : radians_(radians) {
        if (!std::isfinite(radians)) throw NonFiniteValueError("angle", radians);
    }
    double radians() const { return radians_; }

private:
    double radians_;
};

// The four outcome probabilities of one context. Constructible only through
// validated(), so every instance satisfies: each entry in [0, 1], entries sum
// to 1 within kProbabilitySumTolerance.
class OutcomeTable {
public:
    // Entries in canonical order. Throws NegativeEntryError, EntryAboveOneError,
    // or SumNotOneError naming the offending entry or sum.
    static OutcomeTable validated(const std::array<double, 4>& entries) {
        double sum = 0.0;
        for (std::size_t k = 0; k < entries.size(); ++k) {
            const double v = entries[k];
            if (!std::isfinite(v))
                throw NonFiniteValueError(std::string("entry ") + outcome_label(k), v);
            if (v < 0.0) throw NegativeEntryError(outcome_label(k), v);
            if (v > 1.0) throw EntryAboveOneError(outcome_label(k), v);
            sum += v;
        }
        if (std::abs(sum - 1.0) > kProbabilitySumTolerance) throw SumNotOneError(sum);
        return OutcomeTable(entries);
    }

    double p(int eps, int eps_prime) const { return p_[outcome_index(eps, eps_prime)]; }

    const std::array<double, 4>& entries() const { return p_; }

    // Sum over the other side's outcome.
    double marginal_a(int eps) const { return p(eps, +1) + p(eps, -1); }
    double marginal_b(int eps_prime) const { return p(+1, eps_prime) + p(-1, eps_prime); }

    // Sum of e * e' * p(e, e') over the four outcome pairs.
    double correlation() const { return p_[0] - p_[1] - p_[2] + p_[3]; }

private:
    explicit OutcomeTable(const std::array<double, 4>& entries) : p_(entries) {}
    std::array<double, 4> p_;
};

// Singlet-state outcome law for one context. Depends only on the angle
// difference; the result always passes validation.
inline OutcomeTable singlet_table(Angle theta, Angle theta_prime) {
    const double half = 0.5 * (theta.radians() - theta_prime.radians());
    const double c = std::cos(half);
    const double s = std::sin(half);
    const double same = 0.5 * c * c;
    const double anti = 0.5 * s * s;
    return OutcomeTable::validated({same, anti, anti, same});
}

// The m x n grid of contexts with one validated table each. Angle lists are
// kept when the family was generated from them.
class ContextFamily {
public:
    // Explicit grid: a table for every (i, j) with 1 <= i <= m, 1 <= j <= n.
    // Throws MissingContextError for an absent pair and Error for a stray key.
    static ContextFamily from_tables(int m, int n,
                                     const std::map<std::pair<int, int>, OutcomeTable>& tables) {
        check_dims(m, n);
        std::vector<OutcomeTable> grid;
        grid.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
        for (int i = 1; i <= m; ++i) {
            for (int j = 1; j <= n; ++j) {
                auto it = tables.find({i, j});
                if (it == tables.end()) throw MissingContextError(i, j);
                grid.push_back(it->second);
            }
        }
        if (tables.size() != grid.size()) {
            for (const auto& [key, unused] : tables) {
                (void)unused;
                if (key.first < 1 || key.first > m || key.second < 1 || key.second > n)
                    throw Error("table given for context (" + std::to_string(key.first) + "," +
                                std::to_string(key.second) + ") outside the " + std::to_string(m) +
                                "x" + std::to_string(n) + " grid");
            }
        }
        return ContextFamily(m, n, std::move(grid), std::nullopt, std::nullopt);
    }

    // Singlet model: tables(i, j) = singlet_table(angles_a[i-1], angles_b[j-1]).
    static ContextFamily singlet(const std::vector<Angle>& angles_a,
                                 const std::vector<Angle>& angles_b) {
        const int m = static_cast<int>(angles_a.size());
        const int n = static_cast<int>(angles_b.size());
        check_dims(m, n);
        std::vector<OutcomeTable> grid;
        grid.reserve(angles_a.size() * angles_b.size());
        for (const Angle& a : angles_a)
            for (const Angle& b : angles_b) grid.push_back(singlet_table(a, b));
        return ContextFamily(m, n, std::move(grid), angles_a, angles_b);
    }

    int m() const { return m_; }
    int n() const { return n_; }

    const OutcomeTable& table(int i, int j) const {
        if (i < 1 || i > m_) throw IndexOutOfRangeError("i", i, m_);
        if (j < 1 || j > n_) throw IndexOutOfRangeError("j", j, n_);
        return tables_[static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(n_) +
                       static_cast<std::size_t>(j - 1)];
    }

    bool has_angles() const { return angles_a_.has_value(); }
    const std::vector<Angle>& angles_a() const { return angles_a_.value(); }
    const std::vector<Angle>& angles_b() const { return angles_b_.value(); }

private:
    static void check_dims(int m, int n) {
        if (m < 1 || n < 1)
            throw Error("family needs at least one setting per side, got " + std::to_string(m) +
                        "x" + std::to_string(n));
    }

    ContextFamily(int m, int n, std::vector<OutcomeTable> grid,
                  std::optional<std::vector<Angle>> angles_a,
                  std::optional<std::vector<Angle>> angles_b)
        : m_(m),
          n_(n),
          tables_(std::move(grid)),
          angles_a_(std::move(angles_a)),
          angles_b_(std::move(angles_b)) {}

    int m_;
    int n_;
    std::vector<OutcomeTable> tables_;  // row-major, (i-1)*n + (j-1)
    std::optional<std::vector<Angle>> angles_a_;
    std::optional<std::vector<Angle>> angles_b_;
};

// Marginal-consistency diagnostic: does the A-side outcome distribution for
// setting i depend on which B-side setting was paired with it (and vice
// versa)? Families violating this are accepted everywhere else; this report
// just measures the effect.
struct NoSignalingReport {
    struct SettingCheck {
        SettingId setting;
        double max_deviation;  // max over setting pairs and outcomes
    };
    std::vector<SettingCheck> a_side;
    std::vector<SettingCheck> b_side;
    double max_deviation = 0.0;
    bool signaling = false;  // max_deviation > kNoSignalingThreshold
};

inline NoSignalingReport no_signaling_report(const ContextFamily& family) {
    NoSignalingReport report;
    for (int i = 1; i <= family.m(); ++i) {
        double worst = 0.0;
        for (int eps : {+1, -1}) {
            double lo = 2.0, hi = -1.0;
            for (int j = 1; j <= family.n(); ++j) {
                const double marg = family.table(i, j).marginal_a(eps);
                lo = std::min(lo, marg);
                hi = std::max(hi, marg);
            }
            worst = std::max(worst, hi - lo);
        }
        report.a_side.push_back({SettingId{Side::A, i}, worst});
        report.max_deviation = std::max(report.max_deviation, worst);
    }
    for (int j = 1; j <= family.n(); ++j) {
        double worst = 0.0;
        for (int eps_prime : {+1, -1}) {
            double lo = 2.0, hi = -1.0;
            for (int i = 1; i <= family.m(); ++i) {
                const double marg = family.table(i, j).marginal_b(eps_prime);
                lo = std::min(lo, marg);
                hi = std::max(hi, marg);
            }
            worst = std::max(worst, hi - lo);
        }
        report.b_side.push_back({SettingId{Side::B, j}, worst});
        report.max_deviation = std::max(report.max_deviation, worst);
    }
    report.signaling = report.max_deviation > kNoSignalingThreshold;
    return report;
}

}  // namespace ctxspace
