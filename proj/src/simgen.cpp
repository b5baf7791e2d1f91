#include "mbp/simgen.hpp"

#include <random>
#include <stdexcept>

namespace mbp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double unit(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

void fill(std::vector<double>& out, std::size_t count, std::mt19937_64& gen) {
    out.resize(count);
    for (auto& x : out) x = unit(gen);
}

}  // namespace

void validate_params(const CardinalParams& p) {
    for (double w : {p.lambda, p.delta, p.alpha, p.beta})
        if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("cardinal weights must lie in [0, 1]");
    if (p.n < 1 || p.m < 1 || p.q < 1) throw std::invalid_argument("n, m and q must be at least 1");
}

MarketDraw draw(const CardinalParams& params, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    MarketDraw dr;
    dr.n = params.n;
    dr.m = params.m;
    const auto cells = static_cast<std::size_t>(params.n) * params.m;
    fill(dr.d, cells, gen);
    fill(dr.v, params.m, gen);
    fill(dr.eps, cells, gen);
    fill(dr.g, params.n, gen);
    fill(dr.eta, cells, gen);
    return dr;
}

CardinalMatrices cardinal_matrices(const CardinalParams& p, const MarketDraw& dr) {
    if (dr.n != p.n || dr.m != p.m) throw std::invalid_argument("draw dimensions do not match parameters");
    CardinalMatrices c;
    c.n = p.n;
    c.m = p.m;
    const auto cells = static_cast<std::size_t>(p.n) * p.m;
    c.u.resize(cells);
    c.pi.resize(cells);
    for (int i = 0; i < p.n; ++i) {
        for (int s = 0; s < p.m; ++s) {
            const auto k = static_cast<std::size_t>(i) * p.m + s;
            c.u[k] = p.lambda * (p.delta * dr.d[k] + (1.0 - p.delta) * dr.v[s]) + (1.0 - p.lambda) * dr.eps[k];
            c.pi[k] = p.alpha * (p.beta * dr.d[k] + (1.0 - p.beta) * dr.g[i]) + (1.0 - p.alpha) * dr.eta[k];
        }
    }
    return c;
}

Market build_market(const CardinalParams& params, const MarketDraw& dr) {
    return ordinal_from_cardinal(cardinal_matrices(params, dr), std::vector<int>(params.m, params.q),
                                 Acceptability::All);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t cell_index, std::uint64_t draw_index) {
    std::uint64_t h = splitmix64(master_seed);
    h = splitmix64(h ^ cell_index);
    return splitmix64(h ^ (draw_index * 0xd1b54a32d192ed03ULL));
}

}  // namespace mbp
