#include "mbp/analysis.hpp"

#include <algorithm>

#include "mbp/mechanisms.hpp"

namespace mbp {

namespace {

// Student nodes are [0, n), school nodes [n, n + m), and node n + m is a sink
// standing for any free seat (including the outside option).
struct ImprovementGraph {
    int n = 0;
    int m = 0;
    std::vector<std::vector<int>> out;

    int sink() const { return n + m; }
};

ImprovementGraph improvement_graph(const Market& market, const Allocation& alloc) {
    const RankTable ranks(market);
    const auto seats = occupants(market, alloc);
    ImprovementGraph g;
    g.n = market.n;
    g.m = market.m;
    g.out.resize(market.n + market.m + 1);

    for (StudentId i = 0; i < market.n; ++i) {
        bool to_sink = ranks.prefers(i, kOutside, alloc[i]);
        for (SchoolId s : market.preferences[i]) {
            if (!ranks.prefers(i, s, alloc[i])) break;
            if (static_cast<int>(seats[s].size()) < market.capacities[s])
                to_sink = true;
            else
                g.out[i].push_back(market.n + s);
        }
        if (to_sink) g.out[i].push_back(g.sink());
    }
    for (SchoolId s = 0; s < market.m; ++s)
        for (StudentId j : seats[s]) g.out[market.n + s].push_back(j);
    return g;
}

// Tarjan SCC, iterative. Returns component id per node.
std::vector<int> strongly_connected(const std::vector<std::vector<int>>& out, std::vector<int>& sizes) {
    const int nodes = static_cast<int>(out.size());
    std::vector<int> index(nodes, -1), low(nodes, 0), comp(nodes, -1);
    std::vector<char> on_stack(nodes, 0);
    std::vector<int> stack;
    std::vector<std::pair<int, std::size_t>> frames;
    int counter = 0;
    sizes.clear();

    for (int root = 0; root < nodes; ++root) {
        if (index[root] != -1) continue;
        frames.emplace_back(root, 0);
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!frames.empty()) {
            auto& [v, edge] = frames.back();
            if (edge < out[v].size()) {
                const int w = out[v][edge++];
                if (index[w] == -1) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    frames.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                const int id = static_cast<int>(sizes.size());
                int size = 0;
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = id;
                    ++size;
                } while (w != v);
                sizes.push_back(size);
            }
            const int finished = v;
            frames.pop_back();
            if (!frames.empty()) {
                const int parent = frames.back().first;
                low[parent] = std::min(low[parent], low[finished]);
            }
        }
    }
    return comp;
}

bool envyfree_fast(const Market& market, const RankTable& ranks, const std::vector<SchoolId>& a,
                   const std::vector<int>& load) {
    for (StudentId i = 0; i < market.n; ++i) {
        for (SchoolId s : market.preferences[i]) {
            if (s == a[i]) break;
            if (load[s] < market.capacities[s]) return false;
            const int ri = ranks.priority_rank(s, i);
            for (StudentId j = 0; j < market.n; ++j)
                if (a[j] == s && ranks.priority_rank(s, j) > ri) return false;
        }
    }
    return true;
}

}  // namespace

std::vector<BlockingPair> blocking_pairs(const Market& market, const Allocation& alloc) {
    const RankTable ranks(market);
    const auto seats = occupants(market, alloc);
    std::vector<BlockingPair> out;

    // Occupants missing from a school's list rank below everyone on it.
    auto rank_at = [&](SchoolId s, StudentId j) {
        const int r = ranks.priority_rank(s, j);
        return r == RankTable::kUnranked ? market.n : r;
    };

    for (StudentId i = 0; i < market.n; ++i) {
        if (ranks.prefers(i, kOutside, alloc[i])) out.push_back({i, kOutside, BlockReason::Vacancy});
        for (SchoolId s : market.preferences[i]) {
            if (!ranks.prefers(i, s, alloc[i])) break;
            if (static_cast<int>(seats[s].size()) < market.capacities[s]) {
                out.push_back({i, s, BlockReason::Vacancy});
                continue;
            }
            StudentId lowest = -1;
            for (StudentId j : seats[s])
                if (lowest == -1 || rank_at(s, j) > rank_at(s, lowest)) lowest = j;
            if (lowest != -1 && rank_at(s, i) < rank_at(s, lowest))
                out.push_back({i, s, BlockReason::Priority, lowest});
        }
    }
    return out;
}

bool is_envyfree(const Market& market, const Allocation& alloc) { return blocking_pairs(market, alloc).empty(); }

bool is_pareto_efficient(const Market& market, const Allocation& alloc) {
    const auto g = improvement_graph(market, alloc);
    for (StudentId i = 0; i < market.n; ++i)
        if (!g.out[i].empty() && g.out[i].back() == g.sink()) return false;
    std::vector<int> sizes;
    strongly_connected(g.out, sizes);
    return std::all_of(sizes.begin(), sizes.end(), [](int size) { return size == 1; });
}

std::set<StudentId> pareto_improvable_students(const Market& market, const Allocation& alloc) {
    const auto g = improvement_graph(market, alloc);
    std::vector<int> sizes;
    const auto comp = strongly_connected(g.out, sizes);

    const int nodes = static_cast<int>(g.out.size());
    std::vector<std::vector<int>> in(nodes);
    for (int v = 0; v < nodes; ++v)
        for (int w : g.out[v]) in[w].push_back(v);
    std::vector<char> reaches(nodes, 0);
    std::vector<int> frontier{g.sink()};
    reaches[g.sink()] = 1;
    while (!frontier.empty()) {
        const int w = frontier.back();
        frontier.pop_back();
        for (int v : in[w])
            if (!reaches[v]) {
                reaches[v] = 1;
                frontier.push_back(v);
            }
    }

    std::set<StudentId> out;
    for (StudentId i = 0; i < market.n; ++i)
        if (reaches[i] || sizes[comp[i]] > 1) out.insert(i);
    return out;
}

std::set<StudentId> justified_envy_students(const Market& market, const Allocation& alloc) {
    std::set<StudentId> out;
    for (const auto& bp : blocking_pairs(market, alloc))
        if (bp.reason == BlockReason::Priority) out.insert(bp.student);
    return out;
}

std::set<Allocation> enumerate_envyfree(const Market& market) {
    if (market.n > kEnvyfreeMaxStudents || market.m > kEnvyfreeMaxSchools ||
        std::any_of(market.capacities.begin(), market.capacities.end(),
                    [](int q) { return q > kEnvyfreeMaxCapacity; }))
        throw InputTooLarge("enumerate_envyfree supports at most 6 students, 4 schools, capacity 2");

    // Envyfree allocations are individually rational, so each student ranges
    // over their acceptable schools plus the outside option.
    const RankTable ranks(market);
    const int n = market.n;
    std::vector<SchoolId> a(n, kOutside);
    std::vector<int> load(market.m, 0);
    std::set<Allocation> out;

    auto recurse = [&](auto&& self, StudentId i) -> void {
        if (i == n) {
            if (envyfree_fast(market, ranks, a, load)) out.insert(Allocation(a));
            return;
        }
        a[i] = kOutside;
        self(self, i + 1);
        for (SchoolId s : market.preferences[i]) {
            if (load[s] == market.capacities[s]) continue;
            ++load[s];
            a[i] = s;
            self(self, i + 1);
            --load[s];
        }
        a[i] = kOutside;
    };
    recurse(recurse, 0);
    return out;
}

bool envyfree_unique(const Market& market) { return student_da(market) == school_da(market); }

std::set<Allocation> enumerate_ia_nash_outcomes(const Market& market) {
    if (market.n > kIaNashMaxStudents || market.m > kIaNashMaxSchools)
        throw InputTooLarge("enumerate_ia_nash_outcomes supports at most 3 students and 3 schools");
    const int n = market.n;
    const RankTable ranks(market);

    // Every strict ordering of every subset of schools.
    std::vector<std::vector<SchoolId>> strategies;
    for (unsigned mask = 0; mask < (1u << market.m); ++mask) {
        std::vector<SchoolId> subset;
        for (SchoolId s = 0; s < market.m; ++s)
            if (mask >> s & 1u) subset.push_back(s);
        do {
            strategies.push_back(subset);
        } while (std::next_permutation(subset.begin(), subset.end()));
    }
    const auto k = static_cast<int>(strategies.size());

    int profiles = 1;
    for (int i = 0; i < n; ++i) profiles *= k;

    std::vector<Allocation> outcome(profiles);
    std::vector<std::vector<SchoolId>> reports(n);
    for (int p = 0; p < profiles; ++p) {
        int code = p;
        for (StudentId i = 0; i < n; ++i) {
            reports[i] = strategies[code % k];
            code /= k;
        }
        outcome[p] = ia(market, reports);
    }

    std::set<Allocation> out;
    for (int p = 0; p < profiles; ++p) {
        bool equilibrium = true;
        int stride = 1;
        for (StudentId i = 0; i < n && equilibrium; ++i) {
            const int own = (p / stride) % k;
            const int base = p - own * stride;
            const int current = ranks.outcome_key(i, outcome[p][i]);
            for (int alt = 0; alt < k; ++alt) {
                if (ranks.outcome_key(i, outcome[base + alt * stride][i]) < current) {
                    equilibrium = false;
                    break;
                }
            }
            stride *= k;
        }
        if (equilibrium) out.insert(outcome[p]);
    }
    return out;
}

}  // namespace mbp
