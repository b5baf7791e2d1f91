#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mbp/market.hpp"

namespace mbp {

/// Fixed point of iterated truncation at each student's safe school.
struct SimplifiedMarket {
    Market market;
    /// First school on the truncated list that ranks the student within its
    /// capacity; empty when no such school exists (the list is kept whole).
    std::vector<std::optional<SchoolId>> safe_school;
    /// Number of truncation passes that changed at least one list.
    int rounds = 0;
};

/// One step of a sequential mutually-best-pairs ordering.
struct SeqMbpStep {
    StudentId student;
    SchoolId school;          // kOutside when no acceptable school had seats left
    int remaining_before = 0; // seats left at `school` when the step was taken
};

struct SeqMbpCertificate {
    std::vector<SeqMbpStep> steps;

    /// Schools in step order; convenient for comparing with hand orderings.
    std::vector<std::pair<StudentId, SchoolId>> pairs() const;
};

SimplifiedMarket simplify(const Market& market);

/// Returns an ordering witnessing the sequential mutually-best-pairs
/// condition, or nullopt when the greedy search gets stuck. Among the
/// mutually best pairs available at each step the lowest student id is taken.
std::optional<SeqMbpCertificate> check_sequential_mbp(const Market& market);

struct GmbpWitness {
    SimplifiedMarket simplified;
    SeqMbpCertificate certificate;  // certificate on simplified.market
};

std::optional<GmbpWitness> check_gmbp(const Market& market);

/// Replays a certificate against a market and reports the first clause it
/// breaks, or nullopt when every step checks out and all students are covered.
std::optional<std::string> verify_certificate(const Market& market, const SeqMbpCertificate& cert);

inline constexpr int kMbpEverywhereMaxStudents = 12;
inline constexpr int kMbpEverywhereMaxSchools = 8;
inline constexpr int kErginMaxStudents = 200;

/// Mutually best pair exists in every submarket (students x schools, original
/// capacities). Throws InputTooLarge past 12 students or 8 schools.
bool check_mbp_everywhere(const Market& market);

/// No Ergin cycle with scarcity. Throws InputTooLarge past 200 students.
bool check_ergin_acyclicity(const Market& market);

namespace detail {

/// Gauss-Seidel variant of simplify: students are truncated one at a time in
/// the given order, with priorities refiltered after each truncation, until a
/// full pass changes nothing.
Market simplify_in_order(const Market& market, std::span<const StudentId> order);

/// Sequential MBP by plain rescanning in the given student order; the test
/// suite uses it to check that the verdict does not depend on scan order.
bool sequential_mbp_in_order(const Market& market, std::span<const StudentId> order);

}  // namespace detail

}  // namespace mbp
