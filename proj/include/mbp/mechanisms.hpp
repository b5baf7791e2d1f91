#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "mbp/market.hpp"

namespace mbp {

/// Student-proposing deferred acceptance. Rejected students all propose
/// simultaneously each round; the outcome is the student-optimal stable
/// allocation.
Allocation student_da(const Market& market);

/// School-proposing deferred acceptance under truthful preferences: the
/// student-pessimal stable allocation.
Allocation school_da(const Market& market);

/// Top trading cycles with one pointer per school (its best remaining
/// student); every cycle present in a round is cleared in that round.
Allocation ttc(const Market& market);

/// Immediate acceptance (Boston) run mechanically on reported lists.
/// Students skip schools that are already full. A school rejects reports
/// from students missing from its priority list.
Allocation ia(const Market& market, const std::vector<std::vector<SchoolId>>& reports);

enum class Mechanism { StudentDa, SchoolDa, Ttc, Ia };

std::optional<Mechanism> parse_mechanism(std::string_view name);
std::string_view mechanism_name(Mechanism mech);

/// Runs a mechanism with truthful reports.
Allocation run_mechanism(Mechanism mech, const Market& market);

}  // namespace mbp
