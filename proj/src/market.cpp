#include "mbp/market.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace mbp {

ValidationReport validate_market(const Market& market) {
    ValidationReport report;
    auto fail = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

    const int n = market.n;
    const int m = market.m;
    if (n < 0 || m < 0) {
        fail("negative dimensions");
        return report;
    }
    if (static_cast<int>(market.capacities.size()) != m) fail("capacities length != m");
    if (static_cast<int>(market.preferences.size()) != n) fail("preferences length != n");
    if (static_cast<int>(market.priorities.size()) != m) fail("priorities length != m");
    if (!report.ok()) return report;

    for (SchoolId s = 0; s < m; ++s) {
        if (market.capacities[s] < 1) fail("school " + std::to_string(s) + ": capacity must be >= 1");
    }

    std::vector<char> seen;
    bool lists_ok = true;
    for (StudentId i = 0; i < n; ++i) {
        seen.assign(m, 0);
        for (SchoolId s : market.preferences[i]) {
            if (s < 0 || s >= m) {
                fail("student " + std::to_string(i) + ": school id " + std::to_string(s) + " out of range");
                lists_ok = false;
            } else if (seen[s]++) {
                fail("student " + std::to_string(i) + ": duplicate entry " + std::to_string(s));
                lists_ok = false;
            }
        }
    }
    for (SchoolId s = 0; s < m; ++s) {
        seen.assign(n, 0);
        for (StudentId i : market.priorities[s]) {
            if (i < 0 || i >= n) {
                fail("school " + std::to_string(s) + ": student id " + std::to_string(i) + " out of range");
                lists_ok = false;
            } else if (seen[i]++) {
                fail("school " + std::to_string(s) + ": duplicate entry " + std::to_string(i));
                lists_ok = false;
            }
        }
    }
    if (!lists_ok) return report;

    // Priority lists must hold exactly the students that list the school.
    std::vector<std::vector<char>> lists(m, std::vector<char>(n, 0));
    for (StudentId i = 0; i < n; ++i)
        for (SchoolId s : market.preferences[i]) lists[s][i] = 1;
    for (SchoolId s = 0; s < m; ++s) {
        std::vector<char> ranked(n, 0);
        for (StudentId i : market.priorities[s]) ranked[i] = 1;
        if (ranked != lists[s]) fail("school " + std::to_string(s) + ": priority/acceptability mismatch");
    }
    return report;
}

void require_valid(const Market& market) {
    auto report = validate_market(market);
    if (report.ok()) return;
    std::ostringstream msg;
    msg << "invalid market:";
    for (const auto& v : report.violations) msg << "\n  " << v;
    throw MarketError(msg.str());
}

std::vector<std::vector<StudentId>> restrict_priorities(
    const std::vector<std::vector<StudentId>>& raw_priorities,
    const std::vector<std::vector<SchoolId>>& preferences, int m) {
    const int n = static_cast<int>(preferences.size());
    std::vector<std::vector<char>> lists(m, std::vector<char>(n, 0));
    for (StudentId i = 0; i < n; ++i)
        for (SchoolId s : preferences[i])
            if (s >= 0 && s < m) lists[s][i] = 1;

    std::vector<std::vector<StudentId>> out(m);
    for (SchoolId s = 0; s < m && s < static_cast<int>(raw_priorities.size()); ++s) {
        for (StudentId i : raw_priorities[s])
            if (i >= 0 && i < n && lists[s][i]) out[s].push_back(i);
    }
    return out;
}

Market ordinal_from_cardinal(const CardinalMatrices& c, const std::vector<int>& capacities, Acceptability rule) {
    Market market;
    market.n = c.n;
    market.m = c.m;
    market.capacities = capacities;
    market.preferences.resize(c.n);
    std::vector<std::vector<StudentId>> raw(c.m);

    // Sorting (score, index) pairs with the index as second key gives the
    // lower-index tie-break.
    auto ranked = [](std::vector<std::pair<double, int>>& keyed, std::vector<int>& out) {
        std::sort(keyed.begin(), keyed.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
        out.resize(keyed.size());
        for (std::size_t k = 0; k < keyed.size(); ++k) out[k] = keyed[k].second;
    };
    std::vector<std::pair<double, int>> keyed(c.m);
    std::vector<SchoolId> schools;
    for (StudentId i = 0; i < c.n; ++i) {
        for (SchoolId s = 0; s < c.m; ++s) keyed[s] = {c.utility(i, s), s};
        ranked(keyed, schools);
        switch (rule) {
            case Acceptability::All:
                market.preferences[i] = schools;
                break;
        }
    }
    keyed.resize(c.n);
    for (SchoolId s = 0; s < c.m; ++s) {
        for (StudentId i = 0; i < c.n; ++i) keyed[i] = {c.priority(i, s), i};
        ranked(keyed, raw[s]);
    }
    market.priorities = restrict_priorities(raw, market.preferences, c.m);
    return market;
}

RankTable::RankTable(const Market& market)
    : n_(market.n),
      m_(market.m),
      list_len_(market.n, 0),
      pref_(static_cast<std::size_t>(market.n) * market.m, kUnranked),
      prio_(static_cast<std::size_t>(market.m) * market.n, kUnranked) {
    for (StudentId i = 0; i < n_; ++i) {
        const auto& list = market.preferences[i];
        list_len_[i] = static_cast<int>(list.size());
        for (int r = 0; r < static_cast<int>(list.size()); ++r) pref_[static_cast<std::size_t>(i) * m_ + list[r]] = r;
    }
    for (SchoolId s = 0; s < m_; ++s) {
        const auto& list = market.priorities[s];
        for (int r = 0; r < static_cast<int>(list.size()); ++r) prio_[static_cast<std::size_t>(s) * n_ + list[r]] = r;
    }
}

int RankTable::outcome_key(StudentId i, SchoolId s) const {
    if (s == kOutside) return list_len_[i];
    const int r = preference_rank(i, s);
    if (r != kUnranked) return r;
    return list_len_[i] + 1 + s;
}

std::vector<std::vector<StudentId>> occupants(const Market& market, const Allocation& alloc) {
    std::vector<std::vector<StudentId>> out(market.m);
    for (StudentId i = 0; i < alloc.size(); ++i)
        if (alloc[i] != kOutside) out[alloc[i]].push_back(i);
    return out;
}

bool is_feasible(const Market& market, const Allocation& alloc) {
    if (alloc.size() != market.n) return false;
    std::vector<int> load(market.m, 0);
    for (SchoolId s : alloc.assignment) {
        if (s == kOutside) continue;
        if (s < 0 || s >= market.m) return false;
        if (++load[s] > market.capacities[s]) return false;
    }
    return true;
}

bool is_individually_rational(const Market& market, const Allocation& alloc) {
    for (StudentId i = 0; i < alloc.size(); ++i) {
        if (alloc[i] == kOutside) continue;
        const auto& list = market.preferences[i];
        if (std::find(list.begin(), list.end(), alloc[i]) == list.end()) return false;
    }
    return true;
}

std::string format_allocation(const Allocation& alloc) {
    std::ostringstream out;
    out << '{';
    for (StudentId i = 0; i < alloc.size(); ++i) {
        if (i) out << ',';
        out << "(i" << i + 1 << ',';
        if (alloc[i] == kOutside)
            out << "outside";
        else
            out << 's' << alloc[i] + 1;
        out << ')';
    }
    out << '}';
    return out.str();
}

}  // namespace mbp
