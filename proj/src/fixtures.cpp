#include "mbp/fixtures.hpp"

#include <algorithm>
#include <ostream>

#include "mbp/analysis.hpp"
#include "mbp/conditions.hpp"
#include "mbp/harness.hpp"
#include "mbp/mechanisms.hpp"

namespace mbp {

namespace {

Allocation alloc(std::vector<SchoolId> a) { return Allocation(std::move(a)); }

std::string format_certificate(const SeqMbpCertificate& cert) {
    std::string students;
    std::string schools;
    for (const auto& step : cert.steps) {
        std::string i = "i" + std::to_string(step.student + 1);
        std::string s = step.school == kOutside ? "outside" : "s" + std::to_string(step.school + 1);
        const auto width = std::max(i.size(), s.size());
        i.resize(width, ' ');
        s.resize(width, ' ');
        students += i + ' ';
        schools += s + ' ';
    }
    return "    " + students + "\n    " + schools + "\n";
}

std::string format_lists(const Market& market) {
    std::string out;
    for (StudentId i = 0; i < market.n; ++i) {
        out += "    i" + std::to_string(i + 1) + ":";
        for (SchoolId s : market.preferences[i]) out += " s" + std::to_string(s + 1);
        out += '\n';
    }
    for (SchoolId s = 0; s < market.m; ++s) {
        out += "    s" + std::to_string(s + 1) + ":";
        for (StudentId i : market.priorities[s]) out += " i" + std::to_string(i + 1);
        out += " (q=" + std::to_string(market.capacities[s]) + ")\n";
    }
    return out;
}

}  // namespace

Market example1() {
    Market m;
    m.n = 3;
    m.m = 3;
    m.capacities = {1, 1, 1};
    m.preferences = {{0, 2, 1}, {1, 0}, {2}};
    m.priorities = {{1, 0}, {0, 1}, {0, 2}};
    return m;
}

Market example2() {
    Market m;
    m.n = 4;
    m.m = 3;
    m.capacities = {2, 1, 1};
    m.preferences = {{1, 0}, {0}, {0, 1}, {0, 1, 2}};
    // School 2's full ordering is i2 i1 i4 i3; i2 does not apply there.
    m.priorities = restrict_priorities({{0, 1, 2, 3}, {1, 0, 3, 2}, {3, 0, 1, 2}}, m.preferences, m.m);
    return m;
}

Market example3() {
    Market m;
    m.n = 3;
    m.m = 3;
    m.capacities = {1, 1, 1};
    m.preferences = {{2, 0}, {1}, {0, 1, 2}};
    m.priorities = {{0, 2}, {1, 2}, {2, 0}};
    return m;
}

std::vector<ExampleFixture> example_fixtures() {
    const auto diagonal = alloc({0, 1, 2});
    const auto ex2 = alloc({1, 0, 0, 2});
    const auto ex3 = alloc({2, 1, 0});
    return {
        {"example-1", example1(), diagonal, diagonal, diagonal, diagonal, false, true, true, true, true},
        {"example-2", example2(), ex2, ex2, ex2, ex2, true, true, true, true, true},
        {"example-3", example3(), ex3, diagonal, ex3, ex3, false, false, true, true, false},
    };
}

bool run_examples(const std::vector<ExampleFixture>& fixtures, std::ostream& out) {
    bool all_ok = true;
    for (const auto& fx : fixtures) {
        out << "== " << fx.name << '\n' << format_lists(fx.market);
        bool ok = true;

        auto check_alloc = [&](const char* label, const Allocation& expected, const Allocation& actual) {
            if (expected == actual) {
                out << "  ok   " << label << ' ' << format_allocation(actual) << '\n';
                return;
            }
            ok = false;
            out << "  FAIL " << label << '\n'
                << "  --- expected\n  +++ actual\n"
                << "  -" << format_allocation(expected) << '\n'
                << "  +" << format_allocation(actual) << '\n';
        };
        auto check_flag = [&](const char* label, bool expected, bool actual) {
            out << (expected == actual ? "  ok   " : "  FAIL ") << label << " = " << (actual ? "true" : "false");
            if (expected != actual) {
                ok = false;
                out << " (expected " << (expected ? "true" : "false") << ")";
            }
            out << '\n';
        };

        const auto report = validate_market(fx.market);
        if (!report.ok()) {
            ok = false;
            for (const auto& v : report.violations) out << "  FAIL invalid market: " << v << '\n';
        } else {
            const auto da = student_da(fx.market);
            check_alloc("student-da", fx.student_da, da);
            check_alloc("school-da ", fx.school_da, school_da(fx.market));
            check_alloc("ttc       ", fx.ttc, ttc(fx.market));
            check_alloc("ia        ", fx.ia, ia(fx.market, fx.market.preferences));

            const auto seq = check_sequential_mbp(fx.market);
            const auto gmbp = check_gmbp(fx.market);
            const auto eval = evaluate_market(fx.market);
            check_flag("seq_mbp", fx.seq_mbp, seq.has_value());
            check_flag("gmbp", fx.gmbp, gmbp.has_value());
            check_flag("da_efficient", fx.da_efficient, *eval.da_efficient);
            check_flag("da_eq_ttc", fx.da_eq_ttc, *eval.da_eq_ttc);
            check_flag("envyfree_unique", fx.envyfree_unique, envyfree_unique(fx.market));

            if (seq) out << "  sequential MBP ordering:\n" << format_certificate(*seq);
            if (gmbp) {
                out << "  simplified market (" << gmbp->simplified.rounds << " truncation rounds):\n"
                    << format_lists(gmbp->simplified.market) << "  GMBP ordering on the simplified market:\n"
                    << format_certificate(gmbp->certificate);
            }
        }
        out << "  => " << (ok ? "PASS" : "FAIL") << "\n\n";
        all_ok = all_ok && ok;
    }
    out << (all_ok ? "all examples match\n" : "MISMATCH\n");
    return all_ok;
}

}  // namespace mbp
