#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mbp/market.hpp"

namespace mbp {

/// Three small reference markets.
///   example-1: unit capacities, no mutually best pair until truncated.
///   example-2: school 1 has two seats; mutually best pairs appear only when
///              a school's top-q students are considered.
///   example-3: DA efficient and equal to TTC, yet two envyfree allocations.
Market example1();
Market example2();
Market example3();

struct ExampleFixture {
    std::string name;
    Market market;
    Allocation student_da;
    Allocation school_da;
    Allocation ttc;
    Allocation ia;  // truthful reports
    bool seq_mbp = false;
    bool gmbp = false;
    bool da_efficient = false;
    bool da_eq_ttc = false;
    bool envyfree_unique = false;
};

std::vector<ExampleFixture> example_fixtures();

/// Runs every mechanism and check on each fixture and writes a report with a
/// diff for every mismatch. Returns true when everything matches.
bool run_examples(const std::vector<ExampleFixture>& fixtures, std::ostream& out);

}  // namespace mbp
