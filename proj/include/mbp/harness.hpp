#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbp/conditions.hpp"
#include "mbp/market.hpp"
#include "mbp/simgen.hpp"

namespace mbp {

struct MetricFlags {
    bool da_efficient = true;
    bool seq_mbp = true;
    bool gmbp = true;
    bool da_eq_ttc = true;

    bool operator==(const MetricFlags&) const = default;
};

/// Per-market verdicts. Metrics that were not requested stay nullopt.
struct MarketEval {
    std::optional<bool> da_efficient;
    std::optional<bool> seq_mbp;
    std::optional<bool> gmbp;
    std::optional<bool> da_eq_ttc;
    /// Student- and school-proposing DA coincide; computed alongside gmbp.
    std::optional<bool> envyfree_unique;
    /// Every school has a single seat.
    bool unit_capacities = false;

    bool operator==(const MarketEval&) const = default;
};

MarketEval evaluate_market(const Market& market, const MetricFlags& metrics = {});

/// Describes the first broken implication among seq_mbp => gmbp and
/// gmbp => (da_efficient and envyfree_unique). seq_mbp => da_eq_ttc is only
/// checked on unit-capacity markets: with multi-seat schools, TTC can hand a
/// seat to a student who traded for it with another student's priority, so
/// the two mechanisms may differ even when sequential MBP holds.
std::optional<std::string> implication_violation(const MarketEval& eval);

/// Fatal: a market contradicted one of the implications above.
class ImplicationViolation : public std::runtime_error {
public:
    ImplicationViolation(const std::string& what, std::filesystem::path dump)
        : std::runtime_error(what), dump_path(std::move(dump)) {}
    std::filesystem::path dump_path;
};

struct CellResult {
    double lambda = 0;
    double alpha = 0;
    double delta = 0;
    double beta = 0;
    int draws = 0;
    double pct_da_efficient = 0;
    double pct_seq_mbp = 0;
    double pct_gmbp = 0;
    double pct_da_eq_ttc = 0;
};

struct CellOptions {
    MetricFlags metrics;
    std::filesystem::path dump_dir = ".";
    int workers = 1;
};

/// Evaluates `draws` markets of one parameter cell. Throws
/// std::invalid_argument for draws < 1 and ImplicationViolation (after
/// dumping the offending market to options.dump_dir) on a broken implication.
CellResult run_cell(const CardinalParams& params, int draws, std::uint64_t master_seed, std::uint64_t cell_index,
                    const CellOptions& options = {});

/// Per-draw verdicts of one cell, in draw order.
std::vector<MarketEval> evaluate_cell(const CardinalParams& params, int draws, std::uint64_t master_seed,
                                      std::uint64_t cell_index, const CellOptions& options = {});

CellResult aggregate_cell(const CardinalParams& params, const std::vector<MarketEval>& evals);

struct ExperimentConfig {
    int n = 1000;
    int m = 50;
    int q = 20;
    std::vector<double> lambda_values{1.0};
    std::vector<double> alpha_values{1.0};
    std::vector<double> delta_values{1.0};
    std::vector<double> beta_values{1.0};
    int draws_per_cell = 100;
    std::uint64_t master_seed = 20240101;
    MetricFlags metrics;
    std::filesystem::path output = "results.csv";
    int workers = 1;
};

/// Throws std::invalid_argument naming the first broken field.
void validate_config(const ExperimentConfig& config);

/// Evenly spaced values from 0 to 1 inclusive, `steps` intervals.
std::vector<double> unit_grid(int steps);

/// Known presets: "smoke", "table3-row1", "table3-orderings".
std::optional<ExperimentConfig> preset(const std::string& name);

/// Reads a JSON config whose keys mirror ExperimentConfig; keys absent from
/// the file keep the values already in `base`.
ExperimentConfig read_config(const std::filesystem::path& path, ExperimentConfig base = {});
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});

/// Cells in sweep order: lambda outermost, then alpha, delta, beta.
std::vector<CardinalParams> sweep_cells(const ExperimentConfig& config);

struct SummaryRow {
    double lambda = 0;
    double alpha = 0;
    int cells = 0;
    int markets = 0;
    double pct_da_efficient = 0;
    double pct_seq_mbp = 0;
    double pct_gmbp = 0;
    double pct_da_eq_ttc = 0;
    /// Binomial standard errors over all pooled markets, in percentage points.
    double se_da_efficient = 0;
    double se_seq_mbp = 0;
    double se_gmbp = 0;
    double se_da_eq_ttc = 0;
};

/// Averages cell rows over the delta/beta grid for each (lambda, alpha).
std::vector<SummaryRow> summarize(const std::vector<CellResult>& rows);

struct SweepResult {
    std::vector<CellResult> rows;
    std::vector<SummaryRow> summary;
};

/// Runs every cell and writes config.output: `#` metadata lines, the header
/// row, one row per cell, then `# summary` lines. Completed cells are also
/// appended to `<output>.partial`; a rerun with the same config picks them up
/// instead of recomputing them. The partial file is removed on success.
SweepResult run_sweep(const ExperimentConfig& config, std::ostream* progress = nullptr);

/// Column order of the results CSV.
inline constexpr const char* kCsvHeader =
    "lambda,alpha,delta,beta,draws,pct_da_efficient,pct_seq_mbp,pct_gmbp,pct_da_eq_ttc";

std::string format_csv_row(const CellResult& row);

/// Parses the rows of a results CSV (comment lines skipped).
std::vector<CellResult> read_results_csv(const std::filesystem::path& path);

}  // namespace mbp
