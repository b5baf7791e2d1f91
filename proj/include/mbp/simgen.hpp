#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mbp/market.hpp"

namespace mbp {

/// Weights of the cardinal model
///   u  = lambda * (delta * d + (1 - delta) * v) + (1 - lambda) * eps
///   pi = alpha  * (beta  * d + (1 - beta)  * g) + (1 - alpha)  * eta
/// plus market size and a uniform school capacity.
struct CardinalParams {
    double lambda = 1.0;
    double delta = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    int n = 1;
    int m = 1;
    int q = 1;
};

/// Throws std::invalid_argument on weights outside [0, 1] or sizes below 1.
void validate_params(const CardinalParams& params);

struct MarketDraw {
    int n = 0;
    int m = 0;
    std::vector<double> d;    // n x m, row-major
    std::vector<double> v;    // m
    std::vector<double> eps;  // n x m
    std::vector<double> g;    // n
    std::vector<double> eta;  // n x m
};

/// Name of the pinned generator; part of every results header.
inline constexpr std::string_view kGeneratorName = "mt19937_64+splitmix64/v1";

/// Independent U[0,1) entries, drawn in the order d, v, eps, g, eta from
/// std::mt19937_64 seeded with `seed`. Uses a fixed 53-bit conversion rather
/// than std::uniform_real_distribution, so draws match across platforms.
MarketDraw draw(const CardinalParams& params, std::uint64_t seed);

CardinalMatrices cardinal_matrices(const CardinalParams& params, const MarketDraw& dr);

Market build_market(const CardinalParams& params, const MarketDraw& dr);

/// Seed for draw `draw_index` of cell `cell_index` under `master_seed`.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t cell_index, std::uint64_t draw_index);

}  // namespace mbp
