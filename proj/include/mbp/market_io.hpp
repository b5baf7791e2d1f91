#pragma once

#include <filesystem>
#include <string>

#include "mbp/market.hpp"

namespace mbp {

// Market files are JSON objects:
//   {"n": 3, "m": 3, "capacities": [1, 1, 1],
//    "preferences": [[0, 2, 1], [1, 0], [2]],
//    "priorities":  [[1, 0], [0, 1], [0, 2]]}
// Ids are 0-based. "raw_priorities" may replace "priorities"; it holds full
// orderings that are filtered to each school's applicants on load.

Market parse_market(const std::string& text);
std::string dump_market(const Market& market);

Market read_market(const std::filesystem::path& path);
void write_market(const Market& market, const std::filesystem::path& path);

}  // namespace mbp
