#pragma once

#include <set>
#include <vector>

#include "mbp/market.hpp"

namespace mbp {

enum class BlockReason { Vacancy, Priority };

/// A (student, school) pair that blocks an allocation. A PRIORITY block names
/// the lower-priority occupant it displaces. school == kOutside (VACANCY)
/// records a student stuck at a school they find unacceptable.
struct BlockingPair {
    StudentId student;
    SchoolId school;
    BlockReason reason;
    StudentId occupant = -1;

    bool operator==(const BlockingPair&) const = default;
};

/// Every blocking pair. PRIORITY pairs are reported once per school, against
/// the lowest-priority occupant.
std::vector<BlockingPair> blocking_pairs(const Market& market, const Allocation& alloc);

bool is_envyfree(const Market& market, const Allocation& alloc);

bool is_pareto_efficient(const Market& market, const Allocation& alloc);

/// Students who strictly gain in some Pareto improvement of alloc: those on a
/// cycle of seat swaps, or with a chain of strict improvements ending at a
/// free seat.
std::set<StudentId> pareto_improvable_students(const Market& market, const Allocation& alloc);

/// Students with a priority-type block (justified envy).
std::set<StudentId> justified_envy_students(const Market& market, const Allocation& alloc);

inline constexpr int kEnvyfreeMaxStudents = 6;
inline constexpr int kEnvyfreeMaxSchools = 4;
inline constexpr int kEnvyfreeMaxCapacity = 2;

/// All envyfree allocations, by exhaustive search. Gated at 6 students,
/// 4 schools, capacity 2.
std::set<Allocation> enumerate_envyfree(const Market& market);

/// Whether the envyfree set is a singleton, via the two lattice extremes.
bool envyfree_unique(const Market& market);

inline constexpr int kIaNashMaxStudents = 3;
inline constexpr int kIaNashMaxSchools = 3;

/// Outcomes of all pure Nash equilibria of the immediate-acceptance game in
/// which each student reports any strict ordering of any subset of schools.
/// Gated at 3 students and 3 schools.
std::set<Allocation> enumerate_ia_nash_outcomes(const Market& market);

}  // namespace mbp
