// Trial-by-trial simulation of the gated two-lab experiment, plus empirical
// estimation over recorded trials.
//
// Each trial consumes exactly three uniform draws, in this order: A-side
// gate, B-side gate, outcome pair. Draws come from one mt19937_64 stream
// seeded with a 64-bit value; raw outputs map to [0, 1) via
// (x >> 11) * 2^-53. Gates and outcomes are selected by an inverse-CDF walk
// in canonical order (gates ascending, outcomes in table order), so a fixed
// (seed, config) pair reproduces the record stream byte for byte on any
// conforming platform.
//
// A record keeps only the open channels and the two observed values; the
// blocked-channel observables are implicitly 0 (A^(i) = a when i = eta_a,
// else 0), so no record can carry two nonzero same-side values.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctxspace/context_tables.hpp"
#include "ctxspace/errors.hpp"
#include "ctxspace/kolmogorov_space.hpp"

namespace ctxspace {

struct TrialRecord {
    std::uint64_t trial_id = 0;
    int eta_a = 0;  // opened A channel, 1..m
    int eta_b = 0;  // opened B channel, 1..n
    int a = 0;      // value behind the open A channel, -1 or +1
    int b = 0;      // value behind the open B channel, -1 or +1

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

// Uniform [0, 1) stream; one mt19937_64 engine, 53-bit mantissa per draw.
class UnitRng {
public:
    explicit UnitRng(std::uint64_t seed) : engine_(seed) {}
    double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

struct SimulationConfig {
    ContextFamily family;
    ContextWeights weights;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;

    void validate() const {
        if (trials < 1) throw Error("trial count must be at least 1");
        if (static_cast<int>(weights.u().size()) != family.m() ||
            static_cast<int>(weights.v().size()) != family.n())
            throw DimensionMismatchError("weights do not match the family grid");
    }
};

namespace detail {

// Index of the first cumulative step exceeding u; the last index backstops
// floating-point shortfall in the total.
inline std::size_t pick_by_cdf(std::span<const double> weights, double u) {
    double cumulative = 0.0;
    for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
        cumulative += weights[k];
        if (u < cumulative) return k;
    }
    return weights.size() - 1;
}

}  // namespace detail

// Runs the experiment, feeding each record to sink(const TrialRecord&).
template <class Sink>
void simulate(const SimulationConfig& config, Sink&& sink) {
    config.validate();
    UnitRng rng(config.seed);
    for (std::uint64_t t = 0; t < config.trials; ++t) {
        const int i =
            static_cast<int>(detail::pick_by_cdf(config.weights.u(), rng.next())) + 1;
        const int j =
            static_cast<int>(detail::pick_by_cdf(config.weights.v(), rng.next())) + 1;
        const std::size_t outcome =
            detail::pick_by_cdf(config.family.table(i, j).entries(), rng.next());
        const auto [eps, eps_prime] = kOutcomeOrder[outcome];
        sink(TrialRecord{t, i, j, eps, eps_prime});
    }
}

inline std::vector<TrialRecord> simulate(const SimulationConfig& config) {
    std::vector<TrialRecord> records;
    records.reserve(config.trials);
    simulate(config, [&](const TrialRecord& record) { records.push_back(record); });
    return records;
}

// Per-context counts and the estimates derived from them. Conditional
// quantities of a context with no trials are undefined; their accessors throw
// EmptyContextError, mirroring zero-probability conditioning.
class EmpiricalEstimate {
public:
    static EmpiricalEstimate from_records(std::span<const TrialRecord> records, int m, int n) {
        if (m < 1 || n < 1) throw Error("estimate needs m >= 1 and n >= 1");
        EmpiricalEstimate est(m, n);
        for (std::size_t k = 0; k < records.size(); ++k) {
            const TrialRecord& r = records[k];
            if (r.eta_a < 1 || r.eta_a > m)
                throw BadRecordError(k, "eta_a = " + std::to_string(r.eta_a) +
                                            " out of range 1.." + std::to_string(m));
            if (r.eta_b < 1 || r.eta_b > n)
                throw BadRecordError(k, "eta_b = " + std::to_string(r.eta_b) +
                                            " out of range 1.." + std::to_string(n));
            if (r.a != 1 && r.a != -1)
                throw BadRecordError(k, "a = " + std::to_string(r.a) + " must be -1 or +1");
            if (r.b != 1 && r.b != -1)
                throw BadRecordError(k, "b = " + std::to_string(r.b) + " must be -1 or +1");
            est.counts_[est.context_slot(r.eta_a, r.eta_b)][outcome_index(r.a, r.b)] += 1;
            ++est.total_;
        }
        return est;
    }

    int m() const { return m_; }
    int n() const { return n_; }
    std::uint64_t total_trials() const { return total_; }

    std::uint64_t count(int i, int j) const {
        const auto& c = counts_[context_slot(i, j)];
        return c[0] + c[1] + c[2] + c[3];
    }

    std::uint64_t count(int i, int j, int eps, int eps_prime) const {
        return counts_[context_slot(i, j)][outcome_index(eps, eps_prime)];
    }

    bool has_context(int i, int j) const { return count(i, j) > 0; }

    std::vector<std::pair<int, int>> empty_contexts() const {
        std::vector<std::pair<int, int>> empty;
        for (int i = 1; i <= m_; ++i)
            for (int j = 1; j <= n_; ++j)
                if (!has_context(i, j)) empty.push_back({i, j});
        return empty;
    }

    // p-hat: outcome frequencies within context (i, j), canonical order.
    std::array<double, 4> p_hat(int i, int j) const {
        const std::uint64_t c = require_context(i, j);
        const auto& k = counts_[context_slot(i, j)];
        return {static_cast<double>(k[0]) / static_cast<double>(c),
                static_cast<double>(k[1]) / static_cast<double>(c),
                static_cast<double>(k[2]) / static_cast<double>(c),
                static_cast<double>(k[3]) / static_cast<double>(c)};
    }

    // C-hat: sum of e * e' * p_hat over the context's outcomes.
    double conditional_correlation(int i, int j) const {
        const std::uint64_t c = require_context(i, j);
        const auto& k = counts_[context_slot(i, j)];
        const double signed_count = static_cast<double>(k[0]) - static_cast<double>(k[1]) -
                                    static_cast<double>(k[2]) + static_cast<double>(k[3]);
        return signed_count / static_cast<double>(c);
    }

    // sqrt((1 - C-hat^2) / count)
    double conditional_stderr(int i, int j) const {
        const double c_hat = conditional_correlation(i, j);
        const double variance = std::max(0.0, 1.0 - c_hat * c_hat);
        return std::sqrt(variance / static_cast<double>(count(i, j)));
    }

    // E-hat: sum of e * e' * count(i,j,e,e') / N. Defined for every context,
    // empty ones contribute 0.
    double absolute_correlation(int i, int j) const {
        if (total_ == 0) return 0.0;
        const auto& k = counts_[context_slot(i, j)];
        const double signed_count = static_cast<double>(k[0]) - static_cast<double>(k[1]) -
                                    static_cast<double>(k[2]) + static_cast<double>(k[3]);
        return signed_count / static_cast<double>(total_);
    }

    double absolute_stderr(int i, int j) const {
        if (total_ == 0) return 0.0;
        const double e_hat = absolute_correlation(i, j);
        const double second_moment =
            static_cast<double>(count(i, j)) / static_cast<double>(total_);
        const double variance = std::max(0.0, second_moment - e_hat * e_hat);
        return std::sqrt(variance / static_cast<double>(total_));
    }

    double gate_frequency_a(int i) const {
        if (i < 1 || i > m_) throw IndexOutOfRangeError("i", i, m_);
        std::uint64_t c = 0;
        for (int j = 1; j <= n_; ++j) c += count(i, j);
        return total_ == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(total_);
    }

    double gate_frequency_b(int j) const {
        if (j < 1 || j > n_) throw IndexOutOfRangeError("j", j, n_);
        std::uint64_t c = 0;
        for (int i = 1; i <= m_; ++i) c += count(i, j);
        return total_ == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(total_);
    }

private:
    EmpiricalEstimate(int m, int n)
        : m_(m), n_(n),
          counts_(static_cast<std::size_t>(m) * static_cast<std::size_t>(n),
                  std::array<std::uint64_t, 4>{}) {}

    std::size_t context_slot(int i, int j) const {
        if (i < 1 || i > m_) throw IndexOutOfRangeError("i", i, m_);
        if (j < 1 || j > n_) throw IndexOutOfRangeError("j", j, n_);
        return static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(n_) +
               static_cast<std::size_t>(j - 1);
    }

    std::uint64_t require_context(int i, int j) const {
        const std::uint64_t c = count(i, j);
        if (c == 0) throw EmptyContextError(i, j);
        return c;
    }

    int m_;
    int n_;
    std::uint64_t total_ = 0;
    std::vector<std::array<std::uint64_t, 4>> counts_;
};

// Result of comparing an estimate against the exact space it sampled.
struct ConvergenceCheck {
    struct Item {
        std::string quantity;
        double exact = 0.0;
        double estimate = 0.0;
        double deviation = 0.0;
        double allowance = 0.0;  // max(tolerance, 5 * stderr)
        bool empty_context = false;
        bool pass = false;
    };
    std::vector<Item> items;
    bool all_pass = true;
};

// Flags every p-hat, C-hat, E-hat further from the exact value than
// max(tolerance, 5 * stderr). Conditional quantities of an empty context are
// reported as failing items with no estimate.
inline ConvergenceCheck convergence_check(const EmpiricalEstimate& estimate,
                                          const KolmogorovSpace& space, double tolerance) {
    if (estimate.m() != space.m() || estimate.n() != space.n())
        throw DimensionMismatchError("estimate grid " + std::to_string(estimate.m()) + "x" +
                                     std::to_string(estimate.n()) + " does not match space " +
                                     std::to_string(space.m()) + "x" + std::to_string(space.n()));
    ConvergenceCheck check;
    auto push = [&](std::string quantity, double exact, double est, double stderr_est) {
        ConvergenceCheck::Item item;
        item.quantity = std::move(quantity);
        item.exact = exact;
        item.estimate = est;
        item.deviation = std::abs(est - exact);
        item.allowance = std::max(tolerance, 5.0 * stderr_est);
        item.pass = item.deviation <= item.allowance;
        check.all_pass = check.all_pass && item.pass;
        check.items.push_back(std::move(item));
    };
    auto push_empty = [&](std::string quantity, double exact) {
        ConvergenceCheck::Item item;
        item.quantity = std::move(quantity);
        item.exact = exact;
        item.estimate = std::numeric_limits<double>::quiet_NaN();
        item.deviation = std::numeric_limits<double>::quiet_NaN();
        item.allowance = tolerance;
        item.empty_context = true;
        item.pass = false;
        check.all_pass = false;
        check.items.push_back(std::move(item));
    };

    for (int i = 1; i <= space.m(); ++i) {
        for (int j = 1; j <= space.n(); ++j) {
            const std::string ctx = "[" + std::to_string(i) + "," + std::to_string(j) + "]";
            const OutcomeTable& table = space.family().table(i, j);
            const double exact_c = table.correlation();
            double exact_e = 0.0;
            for (std::size_t k = 0; k < space.atoms().size(); ++k) {
                const Atom& atom = space.atoms()[k];
                if (atom.i == i && atom.j == j)
                    exact_e += atom.eps * atom.eps_prime * space.masses()[k];
            }
            if (!estimate.has_context(i, j)) {
                push_empty("p" + ctx, std::numeric_limits<double>::quiet_NaN());
                push_empty("C" + ctx, exact_c);
                push("E" + ctx, exact_e, estimate.absolute_correlation(i, j),
                     estimate.absolute_stderr(i, j));
                continue;
            }
            const std::array<double, 4> p_hat = estimate.p_hat(i, j);
            const std::uint64_t count = estimate.count(i, j);
            for (std::size_t k = 0; k < 4; ++k) {
                const double spread =
                    std::sqrt(std::max(0.0, p_hat[k] * (1.0 - p_hat[k]) /
                                                static_cast<double>(count)));
                push("p" + ctx + outcome_label(k), table.entries()[k], p_hat[k], spread);
            }
            push("C" + ctx, exact_c, estimate.conditional_correlation(i, j),
                 estimate.conditional_stderr(i, j));
            push("E" + ctx, exact_e, estimate.absolute_correlation(i, j),
                 estimate.absolute_stderr(i, j));
        }
    }
    return check;
}

}  // namespace ctxspace
