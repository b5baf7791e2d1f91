#include "mbp/mechanisms.hpp"

#include <algorithm>

namespace mbp {

Allocation student_da(const Market& market) {
    const RankTable ranks(market);
    const int n = market.n;
    std::vector<int> next(n, 0);  // next position to propose to
    std::vector<std::vector<StudentId>> held(market.m);
    std::vector<std::vector<StudentId>> incoming(market.m);
    std::vector<StudentId> free;
    for (StudentId i = 0; i < n; ++i) free.push_back(i);

    while (!free.empty()) {
        std::vector<SchoolId> touched;
        for (StudentId i : free) {
            const auto& list = market.preferences[i];
            if (next[i] >= static_cast<int>(list.size())) continue;
            const SchoolId s = list[next[i]++];
            if (incoming[s].empty()) touched.push_back(s);
            incoming[s].push_back(i);
        }
        free.clear();
        for (SchoolId s : touched) {
            auto& pool = held[s];
            pool.insert(pool.end(), incoming[s].begin(), incoming[s].end());
            incoming[s].clear();
            const auto q = static_cast<std::size_t>(market.capacities[s]);
            if (pool.size() <= q) continue;
            std::sort(pool.begin(), pool.end(),
                      [&](StudentId a, StudentId b) { return ranks.priority_rank(s, a) < ranks.priority_rank(s, b); });
            free.insert(free.end(), pool.begin() + q, pool.end());
            pool.resize(q);
        }
    }

    auto alloc = Allocation::unassigned(n);
    for (SchoolId s = 0; s < market.m; ++s)
        for (StudentId i : held[s]) alloc[i] = s;
    return alloc;
}

Allocation school_da(const Market& market) {
    const RankTable ranks(market);
    const int n = market.n;
    const int m = market.m;
    std::vector<int> next(m, 0);
    std::vector<int> holding(m, 0);  // students currently holding this school's offer
    auto alloc = Allocation::unassigned(n);

    bool progress = true;
    while (progress) {
        progress = false;
        std::vector<std::vector<SchoolId>> offers(n);
        std::vector<StudentId> touched;
        for (SchoolId s = 0; s < m; ++s) {
            const auto& list = market.priorities[s];
            while (holding[s] < market.capacities[s] && next[s] < static_cast<int>(list.size())) {
                const StudentId i = list[next[s]++];
                if (offers[i].empty()) touched.push_back(i);
                offers[i].push_back(s);
                ++holding[s];
                progress = true;
            }
        }
        for (StudentId i : touched) {
            SchoolId best = alloc[i];
            for (SchoolId s : offers[i])
                if (best == kOutside || ranks.preference_rank(i, s) < ranks.preference_rank(i, best)) best = s;
            if (alloc[i] != kOutside && alloc[i] != best) --holding[alloc[i]];
            for (SchoolId s : offers[i])
                if (s != best) --holding[s];
            alloc[i] = best;
        }
    }
    return alloc;
}

Allocation ttc(const Market& market) {
    const int n = market.n;
    const int m = market.m;
    std::vector<int> seats = market.capacities;
    std::vector<char> active(n, 1);
    std::vector<int> student_ptr(n, 0);
    std::vector<int> school_ptr(m, 0);
    auto alloc = Allocation::unassigned(n);
    int remaining = n;

    std::vector<SchoolId> points_to(n);
    std::vector<StudentId> top(m);
    std::vector<int> mark(n);

    while (remaining > 0) {
        // Students point to their best school with a free seat, or leave.
        for (StudentId i = 0; i < n; ++i) {
            if (!active[i]) continue;
            const auto& list = market.preferences[i];
            int& p = student_ptr[i];
            while (p < static_cast<int>(list.size()) && seats[list[p]] == 0) ++p;
            if (p == static_cast<int>(list.size())) {
                active[i] = 0;
                --remaining;
                points_to[i] = kOutside;
            } else {
                points_to[i] = list[p];
            }
        }
        for (SchoolId s = 0; s < m; ++s) {
            top[s] = -1;
            if (seats[s] == 0) continue;
            const auto& list = market.priorities[s];
            int& p = school_ptr[s];
            while (p < static_cast<int>(list.size()) && !active[list[p]]) ++p;
            if (p < static_cast<int>(list.size())) top[s] = list[p];
        }
        if (remaining == 0) break;

        // Walk the student -> school -> student functional graph.
        std::fill(mark.begin(), mark.end(), 0);
        std::vector<StudentId> path;
        std::vector<StudentId> matched;
        for (StudentId start = 0; start < n; ++start) {
            if (!active[start] || mark[start]) continue;
            path.clear();
            StudentId cur = start;
            while (cur != -1 && mark[cur] == 0) {
                mark[cur] = start + 1;
                path.push_back(cur);
                cur = top[points_to[cur]];
            }
            if (cur == -1 || mark[cur] != start + 1) continue;
            // cur closes a cycle found in this walk.
            auto it = std::find(path.begin(), path.end(), cur);
            matched.insert(matched.end(), it, path.end());
        }
        for (StudentId i : matched) {
            alloc[i] = points_to[i];
            --seats[points_to[i]];
            active[i] = 0;
            --remaining;
        }
    }
    return alloc;
}

Allocation ia(const Market& market, const std::vector<std::vector<SchoolId>>& reports) {
    const RankTable ranks(market);
    const int n = market.n;
    std::vector<int> seats = market.capacities;
    std::vector<int> next(n, 0);
    auto alloc = Allocation::unassigned(n);
    std::vector<StudentId> pending;
    for (StudentId i = 0; i < n; ++i) pending.push_back(i);
    std::vector<std::vector<StudentId>> proposals(market.m);

    while (!pending.empty()) {
        std::vector<SchoolId> touched;
        std::vector<StudentId> still;
        for (StudentId i : pending) {
            const auto& list = reports[i];
            int& p = next[i];
            while (p < static_cast<int>(list.size()) && seats[list[p]] == 0) ++p;
            if (p == static_cast<int>(list.size())) continue;  // report exhausted
            const SchoolId s = list[p++];
            if (ranks.priority_rank(s, i) == RankTable::kUnranked) {
                still.push_back(i);
                continue;
            }
            if (proposals[s].empty()) touched.push_back(s);
            proposals[s].push_back(i);
        }
        for (SchoolId s : touched) {
            auto& pool = proposals[s];
            std::sort(pool.begin(), pool.end(),
                      [&](StudentId a, StudentId b) { return ranks.priority_rank(s, a) < ranks.priority_rank(s, b); });
            const auto take = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(seats[s]));
            for (std::size_t k = 0; k < take; ++k) alloc[pool[k]] = s;
            seats[s] -= static_cast<int>(take);
            still.insert(still.end(), pool.begin() + take, pool.end());
            pool.clear();
        }
        pending = std::move(still);
    }
    return alloc;
}

std::optional<Mechanism> parse_mechanism(std::string_view name) {
    if (name == "student-da") return Mechanism::StudentDa;
    if (name == "school-da") return Mechanism::SchoolDa;
    if (name == "ttc") return Mechanism::Ttc;
    if (name == "ia") return Mechanism::Ia;
    return std::nullopt;
}

std::string_view mechanism_name(Mechanism mech) {
    switch (mech) {
        case Mechanism::StudentDa: return "student-da";
        case Mechanism::SchoolDa: return "school-da";
        case Mechanism::Ttc: return "ttc";
        case Mechanism::Ia: return "ia";
    }
    return "?";
}

Allocation run_mechanism(Mechanism mech, const Market& market) {
    switch (mech) {
        case Mechanism::StudentDa: return student_da(market);
        case Mechanism::SchoolDa: return school_da(market);
        case Mechanism::Ttc: return ttc(market);
        case Mechanism::Ia: return ia(market, market.preferences);
    }
    return Allocation::unassigned(market.n);
}

}  // namespace mbp
