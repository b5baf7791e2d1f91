#include <cstdlib>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "mbp/analysis.hpp"
#include "mbp/conditions.hpp"
#include "mbp/fixtures.hpp"
#include "mbp/harness.hpp"
#include "mbp/market_io.hpp"
#include "mbp/mechanisms.hpp"

namespace {

using namespace mbp;

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string name_school(SchoolId s) { return s == kOutside ? "outside" : "s" + std::to_string(s + 1); }

void print_certificate(const SeqMbpCertificate& cert) {
    for (const auto& step : cert.steps) {
        std::cout << "    i" << step.student + 1 << " -> " << name_school(step.school);
        if (step.school != kOutside) std::cout << "  (seats left " << step.remaining_before << ")";
        std::cout << '\n';
    }
}

void print_market(const Market& market) {
    for (StudentId i = 0; i < market.n; ++i) {
        std::cout << "    i" << i + 1 << ":";
        for (SchoolId s : market.preferences[i]) std::cout << " s" << s + 1;
        std::cout << '\n';
    }
    for (SchoolId s = 0; s < market.m; ++s) {
        std::cout << "    s" << s + 1 << ":";
        for (StudentId i : market.priorities[s]) std::cout << " i" << i + 1;
        std::cout << "  (q=" << market.capacities[s] << ")\n";
    }
}

int cmd_check(const std::string& path) {
    const auto market = read_market(path);
    std::cout << "market: " << market.n << " students, " << market.m << " schools\n";

    const auto seq = check_sequential_mbp(market);
    std::cout << "sequential MBP: " << yes_no(seq.has_value()) << '\n';
    if (seq) print_certificate(*seq);

    const auto gmbp = check_gmbp(market);
    std::cout << "GMBP: " << yes_no(gmbp.has_value()) << '\n';
    const auto simplified = gmbp ? gmbp->simplified : simplify(market);
    std::cout << "  simplified market (" << simplified.rounds << " truncation rounds):\n";
    print_market(simplified.market);
    if (gmbp) {
        std::cout << "  ordering on the simplified market:\n";
        print_certificate(gmbp->certificate);
    }

    if (market.n <= kMbpEverywhereMaxStudents && market.m <= kMbpEverywhereMaxSchools)
        std::cout << "MBP everywhere: " << yes_no(check_mbp_everywhere(market)) << '\n';
    else
        std::cout << "MBP everywhere: skipped (needs <= " << kMbpEverywhereMaxStudents << " students and <= "
                  << kMbpEverywhereMaxSchools << " schools)\n";
    if (market.n <= kErginMaxStudents)
        std::cout << "Ergin acyclicity: " << yes_no(check_ergin_acyclicity(market)) << '\n';
    else
        std::cout << "Ergin acyclicity: skipped (needs <= " << kErginMaxStudents << " students)\n";

    const auto da = student_da(market);
    std::cout << "DA efficient: " << yes_no(is_pareto_efficient(market, da)) << '\n'
              << "DA == TTC: " << yes_no(da == ttc(market)) << '\n'
              << "envyfree set unique: " << yes_no(envyfree_unique(market)) << '\n';
    return 0;
}

int cmd_diagnose(const std::string& path, const std::string& mech_name) {
    const auto mech = parse_mechanism(mech_name);
    if (!mech) {
        std::cerr << "unknown mechanism \"" << mech_name << "\" (student-da, school-da, ttc, ia)\n";
        return 2;
    }
    const auto market = read_market(path);
    const auto alloc = run_mechanism(*mech, market);
    std::cout << "mechanism: " << mechanism_name(*mech) << '\n' << "allocation: " << format_allocation(alloc) << '\n';

    const auto blocks = blocking_pairs(market, alloc);
    std::cout << "blocking pairs: " << blocks.size() << '\n';
    for (const auto& bp : blocks) {
        std::cout << "    (i" << bp.student + 1 << ", " << name_school(bp.school) << ") ";
        if (bp.reason == BlockReason::Vacancy)
            std::cout << "vacancy\n";
        else
            std::cout << "priority over i" << bp.occupant + 1 << '\n';
    }
    const auto improvable = pareto_improvable_students(market, alloc);
    const auto envious = justified_envy_students(market, alloc);
    const double n = std::max(1, market.n);
    std::cout << "pareto efficient: " << yes_no(is_pareto_efficient(market, alloc)) << '\n'
              << std::fixed << std::setprecision(2)
              << "% students with a Pareto-improving trade: " << 100.0 * improvable.size() / n << '\n'
              << "% students with justified envy: " << 100.0 * envious.size() / n << '\n';
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& preset_name, const std::optional<std::uint64_t>& seed,
            const std::optional<int>& workers, const std::string& out) {
    ExperimentConfig config;
    if (!preset_name.empty()) {
        auto p = preset(preset_name);
        if (!p) {
            std::cerr << "unknown preset \"" << preset_name << "\" (smoke, table3-row1, table3-orderings)\n";
            return 2;
        }
        config = *p;
    } else if (config_path.empty()) {
        std::cerr << "run needs --config or --preset\n";
        return 2;
    }
    if (!config_path.empty()) config = read_config(config_path, config);
    if (seed) config.master_seed = *seed;
    if (workers) config.workers = *workers;
    if (!out.empty()) config.output = out;

    const auto result = run_sweep(config, &std::cerr);
    std::cout << "wrote " << result.rows.size() << " cells to " << config.output.string() << '\n'
              << std::fixed << std::setprecision(2);
    for (const auto& s : result.summary)
        std::cout << "lambda=" << s.lambda << " alpha=" << s.alpha << ": DA efficient " << s.pct_da_efficient
                  << "  seq MBP " << s.pct_seq_mbp << "  GMBP " << s.pct_gmbp << "  DA==TTC " << s.pct_da_eq_ttc
                  << "  (" << s.markets << " markets)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"School-choice mechanisms and mutually-best-pairs conditions"};
    app.require_subcommand(1);

    std::string config_path, preset_name, out;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    auto* run = app.add_subcommand("run", "Monte Carlo sweep over the cardinal model");
    run->add_option("--config", config_path, "JSON experiment config");
    run->add_option("--preset", preset_name, "smoke | table3-row1 | table3-orderings");
    run->add_option("--seed", seed, "master seed");
    run->add_option("--workers", workers, "worker threads");
    run->add_option("--out", out, "results CSV path");

    std::string market_path;
    auto* check = app.add_subcommand("check", "Report condition verdicts for a market file");
    check->add_option("market", market_path, "market file")->required();

    std::string diag_path, mech_name;
    auto* diagnose = app.add_subcommand("diagnose", "Run a mechanism and report trade-off diagnostics");
    diagnose->add_option("market", diag_path, "market file")->required();
    diagnose->add_option("--mechanism", mech_name, "student-da | school-da | ttc | ia")->required();

    auto* examples = app.add_subcommand("examples", "Check the built-in reference markets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, preset_name, seed, workers, out);
        if (*check) return cmd_check(market_path);
        if (*diagnose) return cmd_diagnose(diag_path, mech_name);
        if (*examples) return run_examples(example_fixtures(), std::cout) ? 0 : 1;
    } catch (const ImplicationViolation& e) {
        std::cerr << "implication violated: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
