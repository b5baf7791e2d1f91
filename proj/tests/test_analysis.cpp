#include <doctest.h>

#include "mbp/analysis.hpp"
#include "mbp/fixtures.hpp"
#include "mbp/mechanisms.hpp"
#include "support/oracles.hpp"

using namespace mbp;

TEST_SUITE("analysis") {

TEST_CASE("blocking pairs") {
    const auto e1 = example1();
    CHECK(blocking_pairs(e1, student_da(e1)).empty());

    const Allocation swapped({1, 0, 2});
    const auto bp = blocking_pairs(e1, swapped);
    REQUIRE(bp.size() == 1);
    CHECK(bp[0] == BlockingPair{0, 2, BlockReason::Priority, 2});
    CHECK(justified_envy_students(e1, swapped) == std::set<StudentId>{0});

    const auto empty = blocking_pairs(e1, Allocation::unassigned(3));
    CHECK(empty.size() == 6);  // every acceptable pair
    for (const auto& b : empty) CHECK(b.reason == BlockReason::Vacancy);

    const auto stuck = blocking_pairs(e1, Allocation({0, 2, kOutside}));
    CHECK(std::find(stuck.begin(), stuck.end(), BlockingPair{1, kOutside, BlockReason::Vacancy}) != stuck.end());
}

TEST_CASE("efficiency on the reference examples") {
    const auto e3 = example3();
    CHECK(is_pareto_efficient(e3, student_da(e3)));
    const auto pessimal = school_da(e3);
    CHECK_FALSE(is_pareto_efficient(e3, pessimal));
    CHECK(pareto_improvable_students(e3, pessimal) == std::set<StudentId>{0, 2});
    CHECK(justified_envy_students(e3, ttc(e3)).empty());

    // Everyone at their first choice.
    const auto e1 = example1();
    CHECK(is_pareto_efficient(e1, Allocation({0, 1, 2})));
    CHECK(pareto_improvable_students(e1, Allocation({0, 1, 2})).empty());

    // i1 wants i2's seat, i2 wants a vacant school.
    Market chain{2, 2, {1, 1}, {{0}, {1, 0}}, {{0, 1}, {1}}};
    CHECK(pareto_improvable_students(chain, Allocation({kOutside, 0})) == std::set<StudentId>{0, 1});
}

TEST_CASE("envyfree enumeration") {
    CHECK(enumerate_envyfree(example1()) == std::set<Allocation>{Allocation({0, 1, 2})});
    CHECK(enumerate_envyfree(example3()) == std::set<Allocation>{Allocation({2, 1, 0}), Allocation({0, 1, 2})});
    CHECK(enumerate_envyfree(Market{1, 1, {1}, {{}}, {{}}}) == std::set<Allocation>{Allocation({kOutside})});

    CHECK(envyfree_unique(example1()));
    CHECK(envyfree_unique(example2()));
    CHECK_FALSE(envyfree_unique(example3()));

    Market big{7, 1, {1}, std::vector<std::vector<SchoolId>>(7), {{}}};
    CHECK_THROWS_AS(enumerate_envyfree(big), InputTooLarge);
}

TEST_CASE("oracle agreement on random markets") {
    std::mt19937_64 rng(707);
    for (int t = 0; t < 300; ++t) {
        const auto mk = oracle::random_mixed_market(rng, 5, 3, 2);
        const auto set = enumerate_envyfree(mk);
        CHECK(set == oracle::envyfree_set(mk));
        CHECK(envyfree_unique(mk) == (set.size() == 1));

        for (const auto& a : {oracle::random_feasible_allocation(rng, mk), school_da(mk), ia(mk, mk.preferences)}) {
            CHECK(is_envyfree(mk, a) == oracle::envyfree(mk, a));
            CHECK(is_pareto_efficient(mk, a) == oracle::pareto_efficient(mk, a));
            CHECK(pareto_improvable_students(mk, a) == oracle::improvable(mk, a));

            std::set<StudentId> envious;
            for (const auto& b : blocking_pairs(mk, a)) {
                if (b.reason != BlockReason::Priority) continue;
                envious.insert(b.student);
                CHECK(a[b.occupant] == b.school);
            }
            CHECK(justified_envy_students(mk, a) == envious);
        }
    }
}

TEST_CASE("immediate acceptance equilibria") {
    CHECK(enumerate_ia_nash_outcomes(example1()) == enumerate_envyfree(example1()));
    CHECK(enumerate_ia_nash_outcomes(example3()) == enumerate_envyfree(example3()));
    CHECK(enumerate_ia_nash_outcomes(Market{1, 1, {1}, {{0}}, {{0}}}) == std::set<Allocation>{Allocation({0})});

    std::mt19937_64 rng(808);
    for (int t = 0; t < 40; ++t) {
        const auto mk = oracle::random_mixed_market(rng, 3, 3, 2);
        CHECK(enumerate_ia_nash_outcomes(mk) == enumerate_envyfree(mk));
    }

    CHECK_THROWS_AS(enumerate_ia_nash_outcomes(example2()), InputTooLarge);
}

}
