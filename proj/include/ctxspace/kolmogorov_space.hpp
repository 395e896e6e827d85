// One classical probability space covering every measurement context at once.
//
// An atom records which channel opened on each side and the value observed
// behind it: (i, e, j, e'). The space holds one atom per combination, with
// mass u_i * v_j * p_ij(e, e'): gate selection is random (product weights
// u, v), and the context's table gives the outcome law behind the open gates.
//
// An equivalent reading of an atom is a zero-padded slot tuple with one slot
// per channel: slot i on the A side holds e, slot j on the B side holds e',
// and every other slot is 0 (a blocked channel reports nothing).
// slot_tuple() materializes that form; with two settings per side the sixteen
// atoms are exactly the sixteen tuples
//
//     (e1, 0, e1', 0), (e1, 0, 0, e2'), (0, e2, e1', 0), (0, e2, 0, e2').
//
// The observables read one slot each: eval_a(atom, i) is e if channel i is
// the open A channel and 0 otherwise, so it depends only on the atom's A-side
// coordinates. eta_a / eta_b report the open channel index on their side.
// Events are plain predicates over atoms; every query is a sum over the
// (at most 4*m*n) enumerated atoms. A built space is immutable and all
// queries are pure, so concurrent use needs no synchronization.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctxspace/context_tables.hpp"
#include "ctxspace/errors.hpp"

namespace ctxspace {

// Product-independence deviation above this fails the eta check.
inline constexpr double kIndependenceTolerance = 1e-12;

// One elementary outcome: open channels and observed values on both sides.
struct Atom {
    int i;          // open A-side channel, 1..m
    int eps;        // value behind it, -1 or +1
    int j;          // open B-side channel, 1..n
    int eps_prime;  // value behind it, -1 or +1

    friend bool operator==(const Atom&, const Atom&) = default;
};

// Canonical atom order used by the space dump: lexicographic by
// (i, eps, j, eps_prime) with -1 before +1.
inline bool atom_less(const Atom& x, const Atom& y) {
    if (x.i != y.i) return x.i < y.i;
    if (x.eps != y.eps) return x.eps < y.eps;
    if (x.j != y.j) return x.j < y.j;
    return x.eps_prime < y.eps_prime;
}

// Zero-padded per-channel view: m A-side slots followed by n B-side slots.
inline std::vector<int> slot_tuple(const Atom& atom, int m, int n) {
    std::vector<int> slots(static_cast<std::size_t>(m) + static_cast<std::size_t>(n), 0);
    slots[static_cast<std::size_t>(atom.i - 1)] = atom.eps;
    slots[static_cast<std::size_t>(m) + static_cast<std::size_t>(atom.j - 1)] = atom.eps_prime;
    return slots;
}

// Gate-opening probabilities for both sides. Entries strictly positive, each
// side summing to 1 within kProbabilitySumTolerance. The joint weight of
// context (i, j) is the product u_i * v_j.
class ContextWeights {
public:
    ContextWeights(std::vector<double> u, std::vector<double> v)
        : u_(std::move(u)), v_(std::move(v)) {
        validate_side("weights-a", u_);
        validate_side("weights-b", v_);
    }

    static ContextWeights uniform(int m, int n) {
        if (m < 1 || n < 1) throw Error("weights need at least one entry per side");
        return ContextWeights(std::vector<double>(static_cast<std::size_t>(m), 1.0 / m),
                              std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
    }

    const std::vector<double>& u() const { return u_; }
    const std::vector<double>& v() const { return v_; }

    double joint(int i, int j) const {
        return u_.at(static_cast<std::size_t>(i - 1)) * v_.at(static_cast<std::size_t>(j - 1));
    }

    bool is_uniform() const {
        for (double w : u_)
            if (std::abs(w - u_.front()) > kProbabilitySumTolerance) return false;
        for (double w : v_)
            if (std::abs(w - v_.front()) > kProbabilitySumTolerance) return false;
        return true;
    }

private:
    static void validate_side(const char* name, const std::vector<double>& w) {
        if (w.empty()) throw Error(std::string(name) + " must not be empty");
        double sum = 0.0;
        for (double x : w) {
            if (!std::isfinite(x)) throw NonFiniteValueError(name, x);
            if (x <= 0.0)
                throw Error(std::string(name) + " entries must be positive, got " +
                            detail::num_str(x));
            sum += x;
        }
        if (std::abs(sum - 1.0) > kProbabilitySumTolerance) throw SumNotOneError(sum);
    }

    std::vector<double> u_;
    std::vector<double> v_;
};

// Law of one observable pair (A^(i), B^(j)) over {-1, 0, +1}^2.
class JointDistribution {
public:
    double at(int a_value, int b_value) const { return cells_[cell_index(a_value, b_value)]; }
    double total() const { return std::accumulate(cells_.begin(), cells_.end(), 0.0); }

    void add(int a_value, int b_value, double mass) { cells_[cell_index(a_value, b_value)] += mass; }

private:
    static std::size_t cell_index(int a_value, int b_value) {
        if (a_value < -1 || a_value > 1) throw IndexOutOfRangeError("A value", a_value, 1);
        if (b_value < -1 || b_value > 1) throw IndexOutOfRangeError("B value", b_value, 1);
        return static_cast<std::size_t>((a_value + 1) * 3 + (b_value + 1));
    }
    std::array<double, 9> cells_{};
};

struct IndependenceReport {
    struct Cell {
        int i, j;
        double joint;      // P(eta_a = i and eta_b = j)
        double product;    // P(eta_a = i) * P(eta_b = j)
        double deviation;  // |joint - product|
    };
    std::vector<Cell> cells;
    double max_deviation = 0.0;
    bool independent = false;  // max_deviation < kIndependenceTolerance
};

class KolmogorovSpace {
public:
    // Enumerates all 4*m*n atoms in canonical order with mass
    // u_i * v_j * p_ij(e, e'). Throws DimensionMismatchError when the weight
    // vectors do not match the family's grid.
    KolmogorovSpace(ContextFamily family, ContextWeights weights)
        : family_(std::move(family)), weights_(std::move(weights)) {
        if (static_cast<int>(weights_->u().size()) != family_.m() ||
            static_cast<int>(weights_->v().size()) != family_.n())
            throw DimensionMismatchError(
                "weights are " + std::to_string(weights_->u().size()) + "x" +
                std::to_string(weights_->v().size()) + " but the family grid is " +
                std::to_string(family_.m()) + "x" + std::to_string(family_.n()));
        enumerate_atoms();
        masses_.reserve(atoms_.size());
        for (const Atom& atom : atoms_)
            masses_.push_back(weights_->joint(atom.i, atom.j) *
                              family_.table(atom.i, atom.j).p(atom.eps, atom.eps_prime));
    }

    // Diagnostic constructor: per-atom masses in canonical order, bypassing
    // the product construction. Masses must be a probability vector; nothing
    // ties them to the family's tables, so measure-vs-table identities need
    // not hold. Intended for exercising the checkers on non-product measures.
    static KolmogorovSpace from_raw_measure(ContextFamily family, std::vector<double> masses) {
        KolmogorovSpace space(std::move(family));
        if (masses.size() != space.atoms_.size())
            throw DimensionMismatchError("expected " + std::to_string(space.atoms_.size()) +
                                         " masses, got " + std::to_string(masses.size()));
        double sum = 0.0;
        for (std::size_t k = 0; k < masses.size(); ++k) {
            if (!std::isfinite(masses[k]))
                throw NonFiniteValueError("atom " + std::to_string(k) + " mass", masses[k]);
            if (masses[k] < 0.0) throw NegativeEntryError("atom " + std::to_string(k), masses[k]);
            sum += masses[k];
        }
        if (std::abs(sum - 1.0) > kProbabilitySumTolerance) throw SumNotOneError(sum);
        space.masses_ = std::move(masses);
        return space;
    }

    const ContextFamily& family() const { return family_; }
    int m() const { return family_.m(); }
    int n() const { return family_.n(); }

    bool has_product_weights() const { return weights_.has_value(); }
    const ContextWeights& weights() const {
        if (!weights_) throw Error("space was built from a raw measure, no product weights");
        return *weights_;
    }

    // Atoms in canonical order with their masses, parallel by index.
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<double>& masses() const { return masses_; }

    double measure(const Atom& atom) const { return masses_[atom_index(atom)]; }

    double total_mass() const { return std::accumulate(masses_.begin(), masses_.end(), 0.0); }

    // --- random variables ------------------------------------------------

    int eval_a(const Atom& atom, int i) const {
        if (i < 1 || i > family_.m()) throw IndexOutOfRangeError("i", i, family_.m());
        return atom.i == i ? atom.eps : 0;
    }

    int eval_b(const Atom& atom, int j) const {
        if (j < 1 || j > family_.n()) throw IndexOutOfRangeError("j", j, family_.n());
        return atom.j == j ? atom.eps_prime : 0;
    }

    int eta_a(const Atom& atom) const { return atom.i; }
    int eta_b(const Atom& atom) const { return atom.j; }

    // --- event queries ----------------------------------------------------

    template <class Predicate>
    double probability(Predicate&& event) const {
        double sum = 0.0;
        for (std::size_t k = 0; k < atoms_.size(); ++k)
            if (event(atoms_[k])) sum += masses_[k];
        return sum;
    }

    // Bayes quotient P(event and given) / P(given). Conditioning on a
    // zero-probability event is an error, not 0 or NaN.
    template <class EventPred, class GivenPred>
    double conditional_probability(EventPred&& event, GivenPred&& given) const {
        double p_given = 0.0;
        double p_both = 0.0;
        for (std::size_t k = 0; k < atoms_.size(); ++k) {
            if (!given(atoms_[k])) continue;
            p_given += masses_[k];
            if (event(atoms_[k])) p_both += masses_[k];
        }
        if (p_given == 0.0) throw ConditionHasZeroProbabilityError();
        return p_both / p_given;
    }

    double gate_probability_a(int i) const {
        if (i < 1 || i > family_.m()) throw IndexOutOfRangeError("i", i, family_.m());
        return probability([&](const Atom& atom) { return atom.i == i; });
    }

    double gate_probability_b(int j) const {
        if (j < 1 || j > family_.n()) throw IndexOutOfRangeError("j", j, family_.n());
        return probability([&](const Atom& atom) { return atom.j == j; });
    }

    // Full joint law of (A^(i), B^(j)) including the 0 outcomes.
    JointDistribution joint_distribution(int i, int j) const {
        if (i < 1 || i > family_.m()) throw IndexOutOfRangeError("i", i, family_.m());
        if (j < 1 || j > family_.n()) throw IndexOutOfRangeError("j", j, family_.n());
        JointDistribution dist;
        for (std::size_t k = 0; k < atoms_.size(); ++k)
            dist.add(eval_a(atoms_[k], i), eval_b(atoms_[k], j), masses_[k]);
        return dist;
    }

    // Verifies P(eta_a = i, eta_b = j) = P(eta_a = i) * P(eta_b = j) on every
    // context cell; a product-weight space satisfies this to rounding error.
    IndependenceReport independence_check_eta() const {
        std::vector<double> pa(static_cast<std::size_t>(family_.m()), 0.0);
        std::vector<double> pb(static_cast<std::size_t>(family_.n()), 0.0);
        std::vector<double> joint(atoms_.size() / 4, 0.0);
        for (std::size_t k = 0; k < atoms_.size(); ++k) {
            const Atom& atom = atoms_[k];
            pa[static_cast<std::size_t>(atom.i - 1)] += masses_[k];
            pb[static_cast<std::size_t>(atom.j - 1)] += masses_[k];
            joint[static_cast<std::size_t>(atom.i - 1) * static_cast<std::size_t>(family_.n()) +
                  static_cast<std::size_t>(atom.j - 1)] += masses_[k];
        }
        IndependenceReport report;
        for (int i = 1; i <= family_.m(); ++i) {
            for (int j = 1; j <= family_.n(); ++j) {
                const double jnt = joint[static_cast<std::size_t>(i - 1) *
                                             static_cast<std::size_t>(family_.n()) +
                                         static_cast<std::size_t>(j - 1)];
                const double prod = pa[static_cast<std::size_t>(i - 1)] *
                                    pb[static_cast<std::size_t>(j - 1)];
                const double dev = std::abs(jnt - prod);
                report.cells.push_back({i, j, jnt, prod, dev});
                report.max_deviation = std::max(report.max_deviation, dev);
            }
        }
        report.independent = report.max_deviation < kIndependenceTolerance;
        return report;
    }

private:
    explicit KolmogorovSpace(ContextFamily family) : family_(std::move(family)) {
        enumerate_atoms();
    }

    void enumerate_atoms() {
        atoms_.reserve(4u * static_cast<std::size_t>(family_.m()) *
                       static_cast<std::size_t>(family_.n()));
        for (int i = 1; i <= family_.m(); ++i)
            for (int eps : {-1, +1})
                for (int j = 1; j <= family_.n(); ++j)
                    for (int eps_prime : {-1, +1}) atoms_.push_back(Atom{i, eps, j, eps_prime});
    }

    std::size_t atom_index(const Atom& atom) const {
        if (atom.i < 1 || atom.i > family_.m()) throw IndexOutOfRangeError("i", atom.i, family_.m());
        if (atom.j < 1 || atom.j > family_.n()) throw IndexOutOfRangeError("j", atom.j, family_.n());
        if (atom.eps != 1 && atom.eps != -1)
            throw IndexOutOfRangeError("outcome value", atom.eps, 1);
        if (atom.eps_prime != 1 && atom.eps_prime != -1)
            throw IndexOutOfRangeError("outcome value", atom.eps_prime, 1);
        const std::size_t a = static_cast<std::size_t>(atom.i - 1) * 2u + (atom.eps > 0 ? 1u : 0u);
        const std::size_t b =
            static_cast<std::size_t>(atom.j - 1) * 2u + (atom.eps_prime > 0 ? 1u : 0u);
        return a * 2u * static_cast<std::size_t>(family_.n()) + b;
    }

    ContextFamily family_;
    std::optional<ContextWeights> weights_;
    std::vector<Atom> atoms_;
    std::vector<double> masses_;
};

}  // namespace ctxspace
