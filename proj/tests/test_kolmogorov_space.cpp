#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "ctxspace/kolmogorov_space.hpp"
#include "support/random_grids.hpp"

using namespace ctxspace;

namespace {

constexpr double kPi = 3.14159265358979323846;

ContextFamily optimal_singlet_family() {
    return ContextFamily::singlet({Angle(0.0), Angle(kPi / 2.0)},
                                  {Angle(kPi / 4.0), Angle(-kPi / 4.0)});
}

KolmogorovSpace uniform_singlet_space() {
    return KolmogorovSpace(optimal_singlet_family(), ContextWeights::uniform(2, 2));
}

// Brute-force conditional probability: filter the atom list on the condition,
// renormalize, sum the event. Independent of the Bayes-quotient code path.
template <class EventPred, class GivenPred>
double oracle_conditional(const KolmogorovSpace& space, EventPred&& event, GivenPred&& given) {
    std::vector<double> filtered(space.atoms().size(), 0.0);
    double kept = 0.0;
    for (std::size_t k = 0; k < space.atoms().size(); ++k) {
        if (given(space.atoms()[k])) {
            filtered[k] = space.masses()[k];
            kept += filtered[k];
        }
    }
    REQUIRE(kept > 0.0);
    double result = 0.0;
    for (std::size_t k = 0; k < space.atoms().size(); ++k)
        if (event(space.atoms()[k])) result += filtered[k] / kept;
    return result;
}

}  // namespace

TEST_CASE("context weights validate positivity and sums") {
    CHECK_NOTHROW(ContextWeights({0.3, 0.7}, {0.25, 0.75}));
    CHECK_THROWS_AS(ContextWeights({0.5, 0.5}, {1.0, 0.0}), Error);
    CHECK_THROWS_AS(ContextWeights({0.5, 0.4}, {0.5, 0.5}), SumNotOneError);
    CHECK_THROWS_AS(ContextWeights({-0.5, 1.5}, {0.5, 0.5}), Error);
    CHECK(ContextWeights::uniform(2, 2).is_uniform());
    CHECK_FALSE(ContextWeights({0.3, 0.7}, {0.5, 0.5}).is_uniform());
    CHECK(ContextWeights::uniform(4, 3).joint(2, 3) == doctest::Approx(1.0 / 12.0));
}

TEST_CASE("building a space checks weight dimensions") {
    const ContextFamily family = optimal_singlet_family();
    CHECK_THROWS_AS(KolmogorovSpace(family, ContextWeights::uniform(3, 2)),
                    DimensionMismatchError);
    CHECK_THROWS_AS(KolmogorovSpace(family, ContextWeights::uniform(2, 3)),
                    DimensionMismatchError);
}

TEST_CASE("the 2x2 space enumerates 16 atoms in canonical order with unit mass") {
    const KolmogorovSpace space = uniform_singlet_space();
    REQUIRE(space.atoms().size() == 16);
    for (std::size_t k = 1; k < space.atoms().size(); ++k)
        CHECK(atom_less(space.atoms()[k - 1], space.atoms()[k]));
    CHECK(std::abs(space.total_mass() - 1.0) < 1e-12);
}

TEST_CASE("atom masses follow the gate-times-table rule") {
    const KolmogorovSpace space = uniform_singlet_space();
    // 0.25 * cos^2(pi/8) / 2, the (1,+,1,+) atom of the quarter-weighted
    // first context
    const double expected = 0.25 * 0.5 * std::cos(kPi / 8.0) * std::cos(kPi / 8.0);
    CHECK(std::abs(expected - 0.10669417382415922) < 1e-15);
    CHECK(std::abs(space.measure(Atom{1, +1, 1, +1}) - expected) < 1e-15);

    std::mt19937_64 rng(8101);
    for (int round = 0; round < 50; ++round) {
        const ContextFamily family = testsupport::random_family(2, 3, rng);
        const ContextWeights weights = testsupport::random_product_weights(2, 3, rng);
        const KolmogorovSpace space2(family, weights);
        CHECK(std::abs(space2.total_mass() - 1.0) < 1e-12);
        for (const Atom& atom : space2.atoms()) {
            const double expected_mass =
                weights.joint(atom.i, atom.j) * family.table(atom.i, atom.j).p(atom.eps, atom.eps_prime);
            CHECK(space2.measure(atom) == expected_mass);
        }
    }
}

TEST_CASE("a single-context space carries the table masses directly") {
    std::map<std::pair<int, int>, OutcomeTable> tables;
    tables.emplace(std::pair<int, int>{1, 1}, OutcomeTable::validated({0.5, 0.0, 0.0, 0.5}));
    const KolmogorovSpace space(ContextFamily::from_tables(1, 1, tables),
                                ContextWeights::uniform(1, 1));
    REQUIRE(space.atoms().size() == 4);
    // canonical order: (1,-1,1,-1), (1,-1,1,+1), (1,+1,1,-1), (1,+1,1,+1)
    CHECK(space.masses()[0] == 0.5);
    CHECK(space.masses()[1] == 0.0);
    CHECK(space.masses()[2] == 0.0);
    CHECK(space.masses()[3] == 0.5);
}

TEST_CASE("observable evaluation reads only the open channel") {
    const KolmogorovSpace space = uniform_singlet_space();
    CHECK(space.eval_a(Atom{1, +1, 2, -1}, 1) == +1);
    CHECK(space.eval_a(Atom{2, +1, 1, -1}, 1) == 0);
    CHECK(space.eval_a(Atom{2, +1, 1, -1}, 2) == +1);
    CHECK(space.eval_b(Atom{1, +1, 2, -1}, 2) == -1);
    CHECK(space.eval_b(Atom{1, +1, 2, -1}, 1) == 0);
    CHECK(space.eta_a(Atom{1, +1, 2, -1}) == 1);
    CHECK(space.eta_b(Atom{1, +1, 2, -1}) == 2);
    CHECK(space.eta_a(Atom{2, -1, 1, +1}) == 2);
    CHECK_THROWS_AS(space.eval_a(Atom{1, +1, 1, +1}, 3), IndexOutOfRangeError);
    CHECK_THROWS_AS(space.eval_a(Atom{1, +1, 1, +1}, 0), IndexOutOfRangeError);
    CHECK_THROWS_AS(space.eval_b(Atom{1, +1, 1, +1}, 5), IndexOutOfRangeError);
}

TEST_CASE("slot tuples are the zero-padded view of an atom") {
    const KolmogorovSpace space = uniform_singlet_space();
    CHECK(slot_tuple(Atom{1, +1, 2, -1}, 2, 2) == std::vector<int>{+1, 0, 0, -1});
    CHECK(slot_tuple(Atom{2, -1, 1, +1}, 2, 2) == std::vector<int>{0, -1, +1, 0});
    for (const Atom& atom : space.atoms()) {
        const std::vector<int> slots = slot_tuple(atom, 2, 2);
        for (int i = 1; i <= 2; ++i)
            CHECK(space.eval_a(atom, i) == slots[static_cast<std::size_t>(i - 1)]);
        for (int j = 1; j <= 2; ++j)
            CHECK(space.eval_b(atom, j) == slots[static_cast<std::size_t>(2 + j - 1)]);
    }
}

TEST_CASE("locality: evaluations depend only on their own side's coordinates") {
    std::mt19937_64 rng(8102);
    const KolmogorovSpace space(testsupport::random_family(2, 2, rng),
                                ContextWeights::uniform(2, 2));
    for (const Atom& x : space.atoms()) {
        for (const Atom& y : space.atoms()) {
            if (x.i == y.i && x.eps == y.eps) {
                for (int i = 1; i <= 2; ++i) CHECK(space.eval_a(x, i) == space.eval_a(y, i));
                CHECK(space.eta_a(x) == space.eta_a(y));
            }
            if (x.j == y.j && x.eps_prime == y.eps_prime) {
                for (int j = 1; j <= 2; ++j) CHECK(space.eval_b(x, j) == space.eval_b(y, j));
                CHECK(space.eta_b(x) == space.eta_b(y));
            }
        }
    }
}

TEST_CASE("gate events have the configured probabilities") {
    const KolmogorovSpace space = uniform_singlet_space();
    CHECK(std::abs(space.probability([&](const Atom& a) { return a.i == 1; }) - 0.5) < 1e-12);
    CHECK(std::abs(space.gate_probability_a(2) - 0.5) < 1e-12);
    CHECK(std::abs(space.gate_probability_b(1) - 0.5) < 1e-12);

    const KolmogorovSpace skewed(optimal_singlet_family(),
                                 ContextWeights({0.3, 0.7}, {0.25, 0.75}));
    CHECK(std::abs(skewed.gate_probability_a(1) - 0.3) < 1e-12);
    CHECK(std::abs(skewed.gate_probability_a(2) - 0.7) < 1e-12);
    CHECK(std::abs(skewed.gate_probability_b(2) - 0.75) < 1e-12);
}

TEST_CASE("impossible joint settings have probability zero, the sure event one") {
    const KolmogorovSpace space = uniform_singlet_space();
    const double both_a = space.probability(
        [&](const Atom& a) { return space.eval_a(a, 1) == +1 && space.eval_a(a, 2) == +1; });
    CHECK(both_a == 0.0);
    CHECK(std::abs(space.probability([](const Atom&) { return true; }) - 1.0) < 1e-12);
}

TEST_CASE("exclusivity: no atom carries two open channels on one side") {
    std::mt19937_64 rng(8103);
    for (int round = 0; round < 20; ++round) {
        const KolmogorovSpace space(testsupport::random_family(3, 2, rng),
                                    testsupport::random_product_weights(3, 2, rng));
        for (int i = 1; i <= 3; ++i) {
            for (int k = 1; k <= 3; ++k) {
                if (i == k) continue;
                const double p = space.probability([&](const Atom& a) {
                    return space.eval_a(a, i) != 0 && space.eval_a(a, k) != 0;
                });
                CHECK(p == 0.0);
            }
        }
    }
}

TEST_CASE("conditioning on an open context recovers its table") {
    const KolmogorovSpace space = uniform_singlet_space();
    for (int i = 1; i <= 2; ++i) {
        for (int j = 1; j <= 2; ++j) {
            for (int eps : {-1, +1}) {
                for (int eps_prime : {-1, +1}) {
                    const double conditional = space.conditional_probability(
                        [&](const Atom& a) {
                            return space.eval_a(a, i) == eps && space.eval_b(a, j) == eps_prime;
                        },
                        [&](const Atom& a) { return a.i == i && a.j == j; });
                    CHECK(std::abs(conditional - space.family().table(i, j).p(eps, eps_prime)) <
                          1e-12);
                }
            }
        }
    }
}

TEST_CASE("conditioning on a closed channel yields zero") {
    const KolmogorovSpace space = uniform_singlet_space();
    const double p = space.conditional_probability(
        [&](const Atom& a) { return space.eval_a(a, 1) == +1 && space.eval_b(a, 1) == -1; },
        [&](const Atom& a) { return a.i == 2 && a.j == 1; });
    CHECK(p == 0.0);
    const double sure = space.conditional_probability([](const Atom&) { return true; },
                                                      [&](const Atom& a) { return a.i == 1; });
    CHECK(std::abs(sure - 1.0) < 1e-12);
}

TEST_CASE("conditioning on a zero-probability event is an error") {
    const KolmogorovSpace space = uniform_singlet_space();
    CHECK_THROWS_AS(space.conditional_probability([](const Atom&) { return true; },
                                                  [](const Atom&) { return false; }),
                    ConditionHasZeroProbabilityError);
    // a nonempty event whose atoms all carry zero mass
    const KolmogorovSpace aligned(ContextFamily::singlet({Angle(0.3)}, {Angle(0.3)}),
                                  ContextWeights::uniform(1, 1));
    CHECK_THROWS_AS(
        aligned.conditional_probability([](const Atom&) { return true; },
                                        [](const Atom& a) { return a.eps != a.eps_prime; }),
        ConditionHasZeroProbabilityError);
}

TEST_CASE("bayes quotient agrees with the filter-and-renormalize oracle") {
    std::mt19937_64 rng(8104);
    const KolmogorovSpace space(testsupport::random_family(2, 2, rng),
                                testsupport::random_product_weights(2, 2, rng));
    const std::size_t atom_count = space.atoms().size();
    REQUIRE(atom_count == 16);
    auto mask_pred = [&](std::uint32_t mask) {
        return [&, mask](const Atom& atom) {
            for (std::size_t k = 0; k < atom_count; ++k)
                if (space.atoms()[k] == atom) return (mask >> k) & 1u;
            return 0u;
        };
    };
    for (int round = 0; round < 2000; ++round) {
        const std::uint32_t event_mask = static_cast<std::uint32_t>(rng() & 0xFFFFu);
        const std::uint32_t given_mask = static_cast<std::uint32_t>(rng() & 0xFFFFu);
        double given_mass = 0.0;
        for (std::size_t k = 0; k < atom_count; ++k)
            if ((given_mask >> k) & 1u) given_mass += space.masses()[k];
        if (given_mass == 0.0) {
            CHECK_THROWS_AS(
                space.conditional_probability(mask_pred(event_mask), mask_pred(given_mask)),
                ConditionHasZeroProbabilityError);
            continue;
        }
        const double via_bayes =
            space.conditional_probability(mask_pred(event_mask), mask_pred(given_mask));
        const double via_oracle =
            oracle_conditional(space, mask_pred(event_mask), mask_pred(given_mask));
        CHECK(std::abs(via_bayes - via_oracle) < 1e-12);
    }
}

TEST_CASE("joint distribution of one observable pair") {
    const KolmogorovSpace space = uniform_singlet_space();
    const JointDistribution dist = space.joint_distribution(1, 1);
    const OutcomeTable& table = space.family().table(1, 1);
    for (int eps : {-1, +1})
        for (int eps_prime : {-1, +1})
            CHECK(std::abs(dist.at(eps, eps_prime) - 0.25 * table.p(eps, eps_prime)) < 1e-12);
    // A open with value +1, B gate closed: a quarter of the A-side marginal
    CHECK(std::abs(dist.at(+1, 0) - 0.25 * space.family().table(1, 2).marginal_a(+1)) < 1e-12);
    CHECK(std::abs(dist.at(+1, 0) - 0.125) < 1e-12);
    CHECK(std::abs(dist.at(0, 0) - 0.25) < 1e-12);
    CHECK(std::abs(dist.total() - 1.0) < 1e-12);
    CHECK_THROWS_AS(space.joint_distribution(3, 1), IndexOutOfRangeError);
}

TEST_CASE("gate monitors are independent under product weights") {
    const KolmogorovSpace space = uniform_singlet_space();
    const double joint_11 =
        space.probability([](const Atom& a) { return a.i == 1 && a.j == 1; });
    CHECK(std::abs(joint_11 - 0.25) < 1e-12);

    std::mt19937_64 rng(8105);
    for (int round = 0; round < 30; ++round) {
        const KolmogorovSpace random_space(testsupport::random_family(2, 3, rng),
                                           testsupport::random_product_weights(2, 3, rng));
        const IndependenceReport report = random_space.independence_check_eta();
        CHECK(report.independent);
        CHECK(report.max_deviation < 1e-12);
    }
}

TEST_CASE("the independence checker flags a non-product measure") {
    std::map<std::pair<int, int>, OutcomeTable> tables;
    const OutcomeTable uniform = OutcomeTable::validated({0.25, 0.25, 0.25, 0.25});
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) tables.emplace(std::pair<int, int>{i, j}, uniform);
    const ContextFamily family = ContextFamily::from_tables(2, 2, tables);

    // all mass on the diagonal contexts (1,1) and (2,2)
    std::vector<double> masses(16, 0.0);
    const KolmogorovSpace reference(family, ContextWeights::uniform(2, 2));
    for (std::size_t k = 0; k < reference.atoms().size(); ++k) {
        const Atom& atom = reference.atoms()[k];
        if (atom.i == atom.j) masses[k] = 0.125;
    }
    const KolmogorovSpace space = KolmogorovSpace::from_raw_measure(family, masses);
    CHECK_FALSE(space.has_product_weights());
    CHECK(std::abs(space.total_mass() - 1.0) < 1e-12);

    const IndependenceReport report = space.independence_check_eta();
    CHECK_FALSE(report.independent);
    CHECK(report.max_deviation == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("raw measures are validated") {
    const ContextFamily family = optimal_singlet_family();
    CHECK_THROWS_AS(KolmogorovSpace::from_raw_measure(family, std::vector<double>(8, 0.125)),
                    DimensionMismatchError);
    std::vector<double> negative(16, 1.0 / 16.0);
    negative[3] = -negative[3];
    CHECK_THROWS_AS(KolmogorovSpace::from_raw_measure(family, negative), NegativeEntryError);
    CHECK_THROWS_AS(KolmogorovSpace::from_raw_measure(family, std::vector<double>(16, 0.125)),
                    SumNotOneError);
}

TEST_CASE("measure lookups validate the atom") {
    const KolmogorovSpace space = uniform_singlet_space();
    CHECK_THROWS_AS(space.measure(Atom{3, +1, 1, +1}), IndexOutOfRangeError);
    CHECK_THROWS_AS(space.measure(Atom{1, 0, 1, +1}), IndexOutOfRangeError);
    CHECK_THROWS_AS(space.measure(Atom{1, +1, 1, 2}), IndexOutOfRangeError);
}
