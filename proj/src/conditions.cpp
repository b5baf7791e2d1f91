#include "mbp/conditions.hpp"

#include <algorithm>
#include <functional>
#include <queue>

namespace mbp {

namespace {

// Counts active entries by position in one school's priority list.
class Fenwick {
public:
    explicit Fenwick(int size) : tree_(size + 1, 0) {
        for (int k = 1; k <= size; ++k) {
            tree_[k] += 1;
            const int parent = k + (k & -k);
            if (parent <= size) tree_[parent] += tree_[k];
        }
    }

    void add(int pos, int delta) {
        for (int k = pos + 1; k < static_cast<int>(tree_.size()); k += k & -k) tree_[k] += delta;
    }

    /// Active entries strictly before pos.
    int count_before(int pos) const {
        int total = 0;
        for (int k = pos; k > 0; k -= k & -k) total += tree_[k];
        return total;
    }

    /// Position of the k-th active entry (1-based k), or -1.
    int find_kth(int k) const {
        const int size = static_cast<int>(tree_.size()) - 1;
        int pos = 0;
        int step = 1;
        while (step * 2 <= size) step *= 2;
        for (; step > 0; step /= 2) {
            if (pos + step <= size && tree_[pos + step] < k) {
                pos += step;
                k -= tree_[pos];
            }
        }
        return pos < size ? pos : -1;
    }

private:
    std::vector<int> tree_;
};

Market truncated_market(const Market& market, const std::vector<int>& len) {
    Market out;
    out.n = market.n;
    out.m = market.m;
    out.capacities = market.capacities;
    out.preferences.resize(market.n);
    for (StudentId i = 0; i < market.n; ++i)
        out.preferences[i].assign(market.preferences[i].begin(), market.preferences[i].begin() + len[i]);
    out.priorities = restrict_priorities(market.priorities, out.preferences, market.m);
    return out;
}

}  // namespace

std::vector<std::pair<StudentId, SchoolId>> SeqMbpCertificate::pairs() const {
    std::vector<std::pair<StudentId, SchoolId>> out;
    out.reserve(steps.size());
    for (const auto& step : steps) out.emplace_back(step.student, step.school);
    return out;
}

SimplifiedMarket simplify(const Market& market) {
    const RankTable ranks(market);
    const int n = market.n;
    const int m = market.m;
    std::vector<int> len(n);
    for (StudentId i = 0; i < n; ++i) len[i] = static_cast<int>(market.preferences[i].size());

    auto still_lists = [&](StudentId i, SchoolId s) { return ranks.preference_rank(i, s) < len[i]; };

    // in_window[s * n + i]: i is among the top q_s students still listing s.
    std::vector<char> in_window(static_cast<std::size_t>(n) * m);
    auto refresh_windows = [&] {
        std::fill(in_window.begin(), in_window.end(), 0);
        for (SchoolId s = 0; s < m; ++s) {
            int taken = 0;
            for (StudentId i : market.priorities[s]) {
                if (taken == market.capacities[s]) break;
                if (!still_lists(i, s)) continue;
                in_window[static_cast<std::size_t>(s) * n + i] = 1;
                ++taken;
            }
        }
    };

    SimplifiedMarket result;
    result.safe_school.assign(n, std::nullopt);
    for (;;) {
        refresh_windows();
        bool changed = false;
        for (StudentId i = 0; i < n; ++i) {
            result.safe_school[i].reset();
            const auto& list = market.preferences[i];
            for (int k = 0; k < len[i]; ++k) {
                if (!in_window[static_cast<std::size_t>(list[k]) * n + i]) continue;
                result.safe_school[i] = list[k];
                if (k + 1 < len[i]) {
                    len[i] = k + 1;
                    changed = true;
                }
                break;
            }
        }
        if (!changed) break;
        ++result.rounds;
    }
    result.market = truncated_market(market, len);
    return result;
}

std::optional<SeqMbpCertificate> check_sequential_mbp(const Market& market) {
    const RankTable ranks(market);
    const int n = market.n;
    const int m = market.m;
    std::vector<int> seats = market.capacities;
    std::vector<char> active(n, 1);
    std::vector<int> ptr(n, 0);
    std::vector<SchoolId> registered(n, kOutside);
    std::vector<std::vector<StudentId>> pointing(m);
    std::vector<Fenwick> windows;
    windows.reserve(m);
    for (SchoolId s = 0; s < m; ++s) windows.emplace_back(static_cast<int>(market.priorities[s].size()));

    std::priority_queue<StudentId, std::vector<StudentId>, std::greater<>> candidates;
    std::vector<char> queued(n, 0);
    auto enqueue = [&](StudentId i) {
        if (active[i] && !queued[i]) {
            queued[i] = 1;
            candidates.push(i);
        }
    };

    auto best_available = [&](StudentId i) -> SchoolId {
        const auto& list = market.preferences[i];
        int& p = ptr[i];
        while (p < static_cast<int>(list.size()) && seats[list[p]] == 0) ++p;
        return p < static_cast<int>(list.size()) ? list[p] : kOutside;
    };

    SeqMbpCertificate cert;
    int remaining = n;
    std::vector<StudentId> stranded;  // students with no acceptable school left

    auto remove = [&](StudentId i, SchoolId matched) {
        active[i] = 0;
        --remaining;
        for (SchoolId s : market.preferences[i]) {
            const int pos = ranks.priority_rank(s, i);
            const bool was_inside = windows[s].count_before(pos) < seats[s];
            windows[s].add(pos, -1);
            if (s == matched || seats[s] == 0 || !was_inside) continue;
            // One student moves up into the top seats[s] of this school.
            const int entrant = windows[s].find_kth(seats[s]);
            if (entrant >= 0) enqueue(market.priorities[s][entrant]);
        }
    };

    auto fill = [&](SchoolId s) {
        for (StudentId j : pointing[s]) {
            if (!active[j] || registered[j] != s) continue;
            if (best_available(j) == kOutside)
                stranded.push_back(j);
            else
                enqueue(j);
        }
        pointing[s].clear();
    };

    for (StudentId i = 0; i < n; ++i) {
        if (market.preferences[i].empty())
            stranded.push_back(i);
        else
            enqueue(i);
    }

    while (remaining > 0) {
        if (!stranded.empty()) {
            std::sort(stranded.begin(), stranded.end());
            for (StudentId i : stranded) {
                if (!active[i]) continue;
                cert.steps.push_back({i, kOutside, 0});
                remove(i, kOutside);
            }
            stranded.clear();
            continue;
        }

        bool matched = false;
        while (!candidates.empty()) {
            const StudentId i = candidates.top();
            candidates.pop();
            queued[i] = 0;
            if (!active[i]) continue;
            const SchoolId s = best_available(i);
            if (s == kOutside) {
                stranded.push_back(i);
                break;
            }
            if (registered[i] != s) {
                registered[i] = s;
                pointing[s].push_back(i);
            }
            if (windows[s].count_before(ranks.priority_rank(s, i)) >= seats[s]) continue;

            cert.steps.push_back({i, s, seats[s]});
            --seats[s];
            remove(i, s);
            if (seats[s] == 0) fill(s);
            matched = true;
            break;
        }
        if (!matched && stranded.empty()) return std::nullopt;
    }
    return cert;
}

std::optional<GmbpWitness> check_gmbp(const Market& market) {
    auto simplified = simplify(market);
    auto cert = check_sequential_mbp(simplified.market);
    if (!cert) return std::nullopt;
    return GmbpWitness{std::move(simplified), std::move(*cert)};
}

std::optional<std::string> verify_certificate(const Market& market, const SeqMbpCertificate& cert) {
    const RankTable ranks(market);
    std::vector<int> seats = market.capacities;
    std::vector<char> remaining(market.n, 1);
    int covered = 0;

    for (std::size_t k = 0; k < cert.steps.size(); ++k) {
        const auto [i, s, before] = cert.steps[k];
        const std::string at = "step " + std::to_string(k + 1) + ": ";
        if (i < 0 || i >= market.n || !remaining[i]) return at + "student missing or repeated";

        SchoolId best = kOutside;
        for (SchoolId t : market.preferences[i])
            if (seats[t] > 0) {
                best = t;
                break;
            }
        if (s != best) return at + "school is not the student's best school with seats left";
        if (s != kOutside) {
            if (before != seats[s]) return at + "recorded remaining capacity disagrees with replay";
            int above = 0;
            for (StudentId j : market.priorities[s]) {
                if (j == i) break;
                if (remaining[j]) ++above;
            }
            if (above >= seats[s]) return at + "student is not within the school's remaining seats";
            --seats[s];
        }
        remaining[i] = 0;
        ++covered;
    }
    if (covered != market.n) return std::string("certificate does not cover every student");
    return std::nullopt;
}

bool check_mbp_everywhere(const Market& market) {
    if (market.n > kMbpEverywhereMaxStudents || market.m > kMbpEverywhereMaxSchools)
        throw InputTooLarge("check_mbp_everywhere supports at most 12 students and 8 schools");
    const int n = market.n;
    const int m = market.m;

    for (unsigned students = 1; students < (1u << n); ++students) {
        for (unsigned schools = 1; schools < (1u << m); ++schools) {
            bool any_acceptable = false;
            bool found = false;
            for (StudentId i = 0; i < n && !found; ++i) {
                if (!(students >> i & 1u)) continue;
                SchoolId best = kOutside;
                for (SchoolId s : market.preferences[i])
                    if (schools >> s & 1u) {
                        best = s;
                        break;
                    }
                if (best == kOutside) continue;
                any_acceptable = true;
                int above = 0;
                for (StudentId j : market.priorities[best]) {
                    if (j == i) break;
                    if (students >> j & 1u) ++above;
                }
                found = above < market.capacities[best];
            }
            if (any_acceptable && !found) return false;
        }
    }
    return true;
}

bool check_ergin_acyclicity(const Market& market) {
    if (market.n > kErginMaxStudents) throw InputTooLarge("check_ergin_acyclicity supports at most 200 students");
    const RankTable ranks(market);
    const int n = market.n;
    if (n < 3) return true;

    for (SchoolId s = 0; s < market.m; ++s) {
        const auto& ps = market.priorities[s];
        for (SchoolId t = 0; t < market.m; ++t) {
            if (t == s) continue;
            const auto& pt = market.priorities[t];
            // k P_t i, with i P_s j P_s k.
            for (int ri_t = 0; ri_t < static_cast<int>(pt.size()); ++ri_t) {
                const StudentId i = pt[ri_t];
                const int ri_s = ranks.priority_rank(s, i);
                if (ri_s == RankTable::kUnranked) continue;
                for (int rk_t = 0; rk_t < ri_t; ++rk_t) {
                    const StudentId k = pt[rk_t];
                    const int rk_s = ranks.priority_rank(s, k);
                    if (rk_s == RankTable::kUnranked || rk_s <= ri_s + 1) continue;
                    for (int rj_s = ri_s + 1; rj_s < rk_s; ++rj_s) {
                        const StudentId j = ps[rj_s];
                        // Scarcity: disjoint sets above j at s and above i at t,
                        // of sizes q_s - 1 and q_t - 1, drawn from the others.
                        int above_j = 0;
                        int above_i = 0;
                        int both = 0;
                        for (StudentId l = 0; l < n; ++l) {
                            if (l == i || l == j || l == k) continue;
                            const int ls = ranks.priority_rank(s, l);
                            const int lt = ranks.priority_rank(t, l);
                            const bool a = ls != RankTable::kUnranked && ls < rj_s;
                            const bool b = lt != RankTable::kUnranked && lt < ri_t;
                            above_j += a;
                            above_i += b;
                            both += a && b;
                        }
                        const int need_s = market.capacities[s] - 1;
                        const int need_t = market.capacities[t] - 1;
                        if (above_j >= need_s && above_i >= need_t && above_j + above_i - both >= need_s + need_t)
                            return false;
                    }
                }
            }
        }
    }
    return true;
}

namespace detail {

Market simplify_in_order(const Market& market, std::span<const StudentId> order) {
    const RankTable ranks(market);
    std::vector<int> len(market.n);
    for (StudentId i = 0; i < market.n; ++i) len[i] = static_cast<int>(market.preferences[i].size());

    auto live_rank = [&](SchoolId s, StudentId i) {
        int above = 0;
        for (StudentId j : market.priorities[s]) {
            if (j == i) break;
            if (ranks.preference_rank(j, s) < len[j]) ++above;
        }
        return above;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (StudentId i : order) {
            const auto& list = market.preferences[i];
            for (int k = 0; k < len[i]; ++k) {
                if (live_rank(list[k], i) >= market.capacities[list[k]]) continue;
                if (k + 1 < len[i]) {
                    len[i] = k + 1;
                    changed = true;
                }
                break;
            }
        }
    }
    return truncated_market(market, len);
}

bool sequential_mbp_in_order(const Market& market, std::span<const StudentId> order) {
    std::vector<int> seats = market.capacities;
    std::vector<char> remaining(market.n, 1);
    int left = market.n;

    auto best_of = [&](StudentId i) {
        for (SchoolId s : market.preferences[i])
            if (seats[s] > 0) return s;
        return kOutside;
    };

    while (left > 0) {
        for (StudentId i : order)
            if (remaining[i] && best_of(i) == kOutside) {
                remaining[i] = 0;
                --left;
            }
        bool matched = false;
        for (StudentId i : order) {
            if (!remaining[i]) continue;
            const SchoolId s = best_of(i);
            int above = 0;
            for (StudentId j : market.priorities[s]) {
                if (j == i) break;
                if (remaining[j]) ++above;
            }
            if (above >= seats[s]) continue;
            --seats[s];
            remaining[i] = 0;
            --left;
            matched = true;
            break;
        }
        if (!matched && left > 0) return false;
    }
    return true;
}

}  // namespace detail

}  // namespace mbp
