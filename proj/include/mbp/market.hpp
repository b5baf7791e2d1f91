#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbp {

using StudentId = int;
using SchoolId = int;

/// Sentinel school id for the outside option (being unassigned).
inline constexpr SchoolId kOutside = -1;

/// A school-choice market.
///
/// Each student lists only acceptable schools, most preferred first; the
/// outside option sits implicitly after the last entry. Each school lists
/// exactly the students who find it acceptable, highest priority first.
struct Market {
    int n = 0;
    int m = 0;
    std::vector<int> capacities;
    std::vector<std::vector<SchoolId>> preferences;
    std::vector<std::vector<StudentId>> priorities;

    bool operator==(const Market&) const = default;
};

/// Student to school (or kOutside) map.
struct Allocation {
    std::vector<SchoolId> assignment;

    Allocation() = default;
    explicit Allocation(std::vector<SchoolId> a) : assignment(std::move(a)) {}
    static Allocation unassigned(int n) { return Allocation(std::vector<SchoolId>(n, kOutside)); }

    [[nodiscard]] int size() const { return static_cast<int>(assignment.size()); }
    SchoolId operator[](StudentId i) const { return assignment[i]; }
    SchoolId& operator[](StudentId i) { return assignment[i]; }

    bool operator==(const Allocation&) const = default;
    auto operator<=>(const Allocation&) const = default;
};

struct CardinalMatrices {
    int n = 0;
    int m = 0;
    std::vector<double> u;   // row-major n x m, student utilities
    std::vector<double> pi;  // row-major n x m, priority scores

    double utility(StudentId i, SchoolId s) const { return u[static_cast<std::size_t>(i) * m + s]; }
    double priority(StudentId i, SchoolId s) const { return pi[static_cast<std::size_t>(i) * m + s]; }
};

enum class Acceptability { All };

class MarketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown by exhaustive routines whose input exceeds their size gate.
class InputTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ValidationReport {
    std::vector<std::string> violations;
    [[nodiscard]] bool ok() const { return violations.empty(); }
};

ValidationReport validate_market(const Market& market);

/// Throws MarketError listing every violation when the market is invalid.
void require_valid(const Market& market);

/// Filters full priority orderings down to the students who list each school.
std::vector<std::vector<StudentId>> restrict_priorities(
    const std::vector<std::vector<StudentId>>& raw_priorities,
    const std::vector<std::vector<SchoolId>>& preferences, int m);

Market ordinal_from_cardinal(const CardinalMatrices& c, const std::vector<int>& capacities,
                             Acceptability rule = Acceptability::All);

/// Dense rank lookups for a market. Ranks are 0-based; kUnranked marks absence.
class RankTable {
public:
    static constexpr int kUnranked = -1;

    explicit RankTable(const Market& market);

    /// Position of s in i's list, or kUnranked if s is unacceptable.
    int preference_rank(StudentId i, SchoolId s) const { return pref_[static_cast<std::size_t>(i) * m_ + s]; }
    /// Position of i in s's priority list, or kUnranked if absent.
    int priority_rank(SchoolId s, StudentId i) const { return prio_[static_cast<std::size_t>(s) * n_ + i]; }

    bool acceptable(StudentId i, SchoolId s) const { return preference_rank(i, s) != kUnranked; }

    /// Strict total order key over outcomes for student i: acceptable schools
    /// by list position, then the outside option, then unacceptable schools by
    /// index. Lower is better.
    int outcome_key(StudentId i, SchoolId s) const;

    /// True when student i strictly prefers a to b.
    bool prefers(StudentId i, SchoolId a, SchoolId b) const { return outcome_key(i, a) < outcome_key(i, b); }

private:
    int n_;
    int m_;
    std::vector<int> list_len_;
    std::vector<int> pref_;
    std::vector<int> prio_;
};

/// Students assigned to each school, in ascending id order.
std::vector<std::vector<StudentId>> occupants(const Market& market, const Allocation& alloc);

bool is_feasible(const Market& market, const Allocation& alloc);
bool is_individually_rational(const Market& market, const Allocation& alloc);

std::string format_allocation(const Allocation& alloc);

}  // namespace mbp
