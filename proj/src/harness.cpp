#include "mbp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mbp/analysis.hpp"
#include "mbp/market_io.hpp"
#include "mbp/mechanisms.hpp"

namespace mbp {

namespace {

constexpr const char* kVersion = "mbp 1.0.0";

double pct(int hits, int total) { return total == 0 ? 0.0 : 100.0 * hits / total; }

std::string fmt_value(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string fmt_pct(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

// Runs fn(item) for item in [0, count) on `workers` threads.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    if (threads == 1 || count <= 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, count); ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const auto k = next.fetch_add(1);
                if (k >= count) return;
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = count;
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::filesystem::path dump_violation(const Market& market, const std::filesystem::path& dir, std::uint64_t cell,
                                     std::uint64_t draw_index) {
    std::filesystem::create_directories(dir);
    auto path = dir / ("violation-cell" + std::to_string(cell) + "-draw" + std::to_string(draw_index) + ".json");
    write_market(market, path);
    return path;
}

MarketEval evaluate_draw(const CardinalParams& params, std::uint64_t master_seed, std::uint64_t cell,
                         std::uint64_t k, const CellOptions& options) {
    const auto market = build_market(params, draw(params, derive_seed(master_seed, cell, k)));
    auto eval = evaluate_market(market, options.metrics);
    if (auto broken = implication_violation(eval)) {
        const auto path = dump_violation(market, options.dump_dir, cell, k);
        throw ImplicationViolation("cell " + std::to_string(cell) + " draw " + std::to_string(k) + ": " + *broken +
                                       " (market written to " + path.string() + ")",
                                   path);
    }
    return eval;
}

std::string fingerprint(const ExperimentConfig& c) {
    std::ostringstream out;
    out << kGeneratorName << ';' << c.n << ';' << c.m << ';' << c.q << ';' << c.draws_per_cell << ';'
        << c.master_seed << ';' << c.metrics.da_efficient << c.metrics.seq_mbp << c.metrics.gmbp
        << c.metrics.da_eq_ttc;
    for (const auto* values : {&c.lambda_values, &c.alpha_values, &c.delta_values, &c.beta_values}) {
        out << ';';
        for (double v : *values) out << fmt_value(v) << ' ';
    }
    return out.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

CellResult parse_row(const std::string& line) {
    const auto f = split(line, ',');
    if (f.size() != 9) throw std::runtime_error("results row must have 9 fields: " + line);
    CellResult r;
    r.lambda = std::stod(f[0]);
    r.alpha = std::stod(f[1]);
    r.delta = std::stod(f[2]);
    r.beta = std::stod(f[3]);
    r.draws = std::stoi(f[4]);
    r.pct_da_efficient = std::stod(f[5]);
    r.pct_seq_mbp = std::stod(f[6]);
    r.pct_gmbp = std::stod(f[7]);
    r.pct_da_eq_ttc = std::stod(f[8]);
    return r;
}

}  // namespace

MarketEval evaluate_market(const Market& market, const MetricFlags& metrics) {
    MarketEval eval;
    eval.unit_capacities =
        std::all_of(market.capacities.begin(), market.capacities.end(), [](int q) { return q == 1; });
    std::optional<Allocation> da;
    if (metrics.da_efficient || metrics.da_eq_ttc) da = student_da(market);
    if (metrics.da_efficient) eval.da_efficient = is_pareto_efficient(market, *da);
    if (metrics.da_eq_ttc) eval.da_eq_ttc = (*da == ttc(market));
    if (metrics.seq_mbp) eval.seq_mbp = check_sequential_mbp(market).has_value();
    if (metrics.gmbp) {
        eval.gmbp = check_gmbp(market).has_value();
        eval.envyfree_unique = envyfree_unique(market);
    }
    return eval;
}

std::optional<std::string> implication_violation(const MarketEval& e) {
    auto is = [](const std::optional<bool>& b) { return b.has_value() && *b; };
    auto isnt = [](const std::optional<bool>& b) { return b.has_value() && !*b; };
    if (is(e.seq_mbp) && isnt(e.gmbp)) return "seq_mbp holds but gmbp fails";
    if (is(e.gmbp) && isnt(e.da_efficient)) return "gmbp holds but DA is inefficient";
    if (is(e.gmbp) && isnt(e.envyfree_unique)) return "gmbp holds but student and school DA differ";
    if (e.unit_capacities && is(e.seq_mbp) && isnt(e.da_eq_ttc)) return "seq_mbp holds but DA differs from TTC";
    return std::nullopt;
}

std::vector<MarketEval> evaluate_cell(const CardinalParams& params, int draws, std::uint64_t master_seed,
                                      std::uint64_t cell_index, const CellOptions& options) {
    validate_params(params);
    if (draws < 1) throw std::invalid_argument("draws must be at least 1");
    std::vector<MarketEval> evals(draws);
    parallel_for(static_cast<std::size_t>(draws), options.workers, [&](std::size_t k) {
        evals[k] = evaluate_draw(params, master_seed, cell_index, k, options);
    });
    return evals;
}

CellResult aggregate_cell(const CardinalParams& params, const std::vector<MarketEval>& evals) {
    CellResult r{params.lambda, params.alpha, params.delta, params.beta, static_cast<int>(evals.size())};
    auto share = [&](std::optional<bool> MarketEval::*field) {
        int hits = 0;
        for (const auto& e : evals) {
            if (!(e.*field).has_value()) return std::nan("");
            hits += *(e.*field);
        }
        return pct(hits, static_cast<int>(evals.size()));
    };
    r.pct_da_efficient = share(&MarketEval::da_efficient);
    r.pct_seq_mbp = share(&MarketEval::seq_mbp);
    r.pct_gmbp = share(&MarketEval::gmbp);
    r.pct_da_eq_ttc = share(&MarketEval::da_eq_ttc);
    return r;
}

CellResult run_cell(const CardinalParams& params, int draws, std::uint64_t master_seed, std::uint64_t cell_index,
                    const CellOptions& options) {
    return aggregate_cell(params, evaluate_cell(params, draws, master_seed, cell_index, options));
}

void validate_config(const ExperimentConfig& c) {
    if (c.n < 1 || c.m < 1 || c.q < 1) throw std::invalid_argument("n, m and q must be at least 1");
    if (c.draws_per_cell < 1) throw std::invalid_argument("draws_per_cell must be at least 1");
    if (c.workers < 1) throw std::invalid_argument("workers must be at least 1");
    const std::pair<const char*, const std::vector<double>*> lists[] = {{"lambda_values", &c.lambda_values},
                                                                        {"alpha_values", &c.alpha_values},
                                                                        {"delta_values", &c.delta_values},
                                                                        {"beta_values", &c.beta_values}};
    for (const auto& [name, values] : lists) {
        if (values->empty()) throw std::invalid_argument(std::string(name) + " must not be empty");
        for (double v : *values)
            if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(name) + " entries must lie in [0, 1]");
    }
}

std::vector<double> unit_grid(int steps) {
    std::vector<double> out;
    for (int k = 0; k <= steps; ++k) out.push_back(static_cast<double>(k) / steps);
    return out;
}

std::optional<ExperimentConfig> preset(const std::string& name) {
    ExperimentConfig c;
    if (name == "smoke") {
        c.n = 50;
        c.m = 5;
        c.q = 10;
        c.delta_values = unit_grid(2);
        c.beta_values = unit_grid(2);
        c.draws_per_cell = 20;
        c.output = "smoke.csv";
        return c;
    }
    if (name == "table3-row1") {
        c.delta_values = unit_grid(20);
        c.beta_values = unit_grid(20);
        c.draws_per_cell = 100;
        c.output = "table3-row1.csv";
        return c;
    }
    if (name == "table3-orderings") {
        c.lambda_values = {1.0, 0.75, 0.5, 0.25, 0.0};
        c.alpha_values = {1.0, 0.95};
        c.delta_values = unit_grid(4);
        c.beta_values = unit_grid(4);
        c.draws_per_cell = 200;
        c.output = "table3-orderings.csv";
        return c;
    }
    return std::nullopt;
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig c) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed config: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
    static const char* known[] = {"n",           "m",           "q",           "lambda_values", "alpha_values",
                                  "delta_values", "beta_values", "draws_per_cell", "master_seed", "metrics",
                                  "output",      "workers"};
    for (const auto& [key, _] : doc.items())
        if (std::find(std::begin(known), std::end(known), key) == std::end(known))
            throw std::invalid_argument("unknown config key \"" + key + "\"");
    try {
        if (doc.contains("n")) c.n = doc["n"].get<int>();
        if (doc.contains("m")) c.m = doc["m"].get<int>();
        if (doc.contains("q")) c.q = doc["q"].get<int>();
        if (doc.contains("lambda_values")) c.lambda_values = doc["lambda_values"].get<std::vector<double>>();
        if (doc.contains("alpha_values")) c.alpha_values = doc["alpha_values"].get<std::vector<double>>();
        if (doc.contains("delta_values")) c.delta_values = doc["delta_values"].get<std::vector<double>>();
        if (doc.contains("beta_values")) c.beta_values = doc["beta_values"].get<std::vector<double>>();
        if (doc.contains("draws_per_cell")) c.draws_per_cell = doc["draws_per_cell"].get<int>();
        if (doc.contains("master_seed")) c.master_seed = doc["master_seed"].get<std::uint64_t>();
        if (doc.contains("output")) c.output = doc["output"].get<std::string>();
        if (doc.contains("workers")) c.workers = doc["workers"].get<int>();
        if (doc.contains("metrics")) {
            const auto& mt = doc["metrics"];
            if (mt.contains("da_efficient")) c.metrics.da_efficient = mt["da_efficient"].get<bool>();
            if (mt.contains("seq_mbp")) c.metrics.seq_mbp = mt["seq_mbp"].get<bool>();
            if (mt.contains("gmbp")) c.metrics.gmbp = mt["gmbp"].get<bool>();
            if (mt.contains("da_eq_ttc")) c.metrics.da_eq_ttc = mt["da_eq_ttc"].get<bool>();
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad config value: ") + e.what());
    }
    validate_config(c);
    return c;
}

ExperimentConfig read_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), std::move(base));
}

std::vector<CardinalParams> sweep_cells(const ExperimentConfig& c) {
    std::vector<CardinalParams> cells;
    for (double lambda : c.lambda_values)
        for (double alpha : c.alpha_values)
            for (double delta : c.delta_values)
                for (double beta : c.beta_values) cells.push_back({lambda, delta, alpha, beta, c.n, c.m, c.q});
    return cells;
}

std::vector<SummaryRow> summarize(const std::vector<CellResult>& rows) {
    std::vector<SummaryRow> out;
    std::map<std::pair<double, double>, std::size_t> slot;
    for (const auto& r : rows) {
        const auto key = std::make_pair(r.lambda, r.alpha);
        auto [it, inserted] = slot.try_emplace(key, out.size());
        if (inserted) out.push_back({r.lambda, r.alpha});
        auto& s = out[it->second];
        ++s.cells;
        s.markets += r.draws;
        s.pct_da_efficient += r.pct_da_efficient;
        s.pct_seq_mbp += r.pct_seq_mbp;
        s.pct_gmbp += r.pct_gmbp;
        s.pct_da_eq_ttc += r.pct_da_eq_ttc;
    }
    auto se = [](double p, int markets) {
        const double f = p / 100.0;
        return markets > 0 ? 100.0 * std::sqrt(f * (1.0 - f) / markets) : 0.0;
    };
    for (auto& s : out) {
        s.pct_da_efficient /= s.cells;
        s.pct_seq_mbp /= s.cells;
        s.pct_gmbp /= s.cells;
        s.pct_da_eq_ttc /= s.cells;
        s.se_da_efficient = se(s.pct_da_efficient, s.markets);
        s.se_seq_mbp = se(s.pct_seq_mbp, s.markets);
        s.se_gmbp = se(s.pct_gmbp, s.markets);
        s.se_da_eq_ttc = se(s.pct_da_eq_ttc, s.markets);
    }
    return out;
}

std::string format_csv_row(const CellResult& r) {
    return fmt_value(r.lambda) + ',' + fmt_value(r.alpha) + ',' + fmt_value(r.delta) + ',' + fmt_value(r.beta) + ',' +
           std::to_string(r.draws) + ',' + fmt_pct(r.pct_da_efficient) + ',' + fmt_pct(r.pct_seq_mbp) + ',' +
           fmt_pct(r.pct_gmbp) + ',' + fmt_pct(r.pct_da_eq_ttc);
}

SweepResult run_sweep(const ExperimentConfig& config, std::ostream* progress) {
    validate_config(config);
    const auto cells = sweep_cells(config);
    const auto draws = static_cast<std::size_t>(config.draws_per_cell);
    const auto partial_path = std::filesystem::path(config.output.string() + ".partial");
    const auto signature = "# config " + fingerprint(config);

    std::vector<std::optional<CellResult>> done(cells.size());
    {
        std::ifstream in(partial_path);
        std::string line;
        if (in && std::getline(in, line) && line == signature) {
            while (std::getline(in, line)) {
                const auto comma = line.find(',');
                if (comma == std::string::npos) continue;
                try {
                    const auto idx = std::stoul(line.substr(0, comma));
                    if (idx < done.size()) done[idx] = parse_row(line.substr(comma + 1));
                } catch (const std::exception&) {
                    // A torn final line from an interrupted run; recompute that cell.
                }
            }
        }
    }

    std::ofstream partial;
    {
        const bool resuming = std::any_of(done.begin(), done.end(), [](const auto& d) { return d.has_value(); });
        partial.open(partial_path, resuming ? std::ios::app : std::ios::trunc);
        if (!partial) throw std::runtime_error("cannot write " + partial_path.string());
        if (!resuming) partial << signature << '\n' << std::flush;
    }

    std::vector<std::size_t> todo;
    for (std::size_t c = 0; c < cells.size(); ++c)
        if (!done[c]) todo.push_back(c);

    CellOptions options;
    options.metrics = config.metrics;
    options.dump_dir = config.output.has_parent_path() ? config.output.parent_path() : std::filesystem::path(".");

    std::vector<MarketEval> evals(todo.size() * draws);
    std::vector<std::atomic<std::size_t>> finished(todo.size());
    std::mutex out_mutex;
    std::size_t cells_done = 0;

    parallel_for(evals.size(), config.workers, [&](std::size_t item) {
        const std::size_t t = item / draws;
        const std::size_t k = item % draws;
        const std::size_t c = todo[t];
        evals[item] = evaluate_draw(cells[c], config.master_seed, c, k, options);
        if (finished[t].fetch_add(1) + 1 != draws) return;

        const std::vector<MarketEval> cell_evals(evals.begin() + t * draws, evals.begin() + (t + 1) * draws);
        auto row = aggregate_cell(cells[c], cell_evals);
        std::lock_guard lock(out_mutex);
        done[c] = row;
        partial << c << ',' << format_csv_row(row) << '\n' << std::flush;
        ++cells_done;
        if (progress)
            *progress << "cell " << cells_done << "/" << todo.size() << "  " << format_csv_row(row) << std::endl;
    });
    partial.close();

    SweepResult result;
    for (auto& d : done) result.rows.push_back(*d);
    result.summary = summarize(result.rows);

    std::ofstream out(config.output);
    if (!out) throw std::runtime_error("cannot write " + config.output.string());
    out << "# generator: " << kGeneratorName << '\n'
        << "# master_seed: " << config.master_seed << '\n'
        << "# version: " << kVersion << '\n'
        << "# n: " << config.n << ", m: " << config.m << ", q: " << config.q
        << ", draws_per_cell: " << config.draws_per_cell << '\n'
        << kCsvHeader << '\n';
    for (const auto& r : result.rows) out << format_csv_row(r) << '\n';
    out << "# summary: lambda,alpha,cells,markets,pct_da_efficient,pct_seq_mbp,pct_gmbp,pct_da_eq_ttc,"
           "se_da_efficient,se_seq_mbp,se_gmbp,se_da_eq_ttc\n";
    for (const auto& s : result.summary) {
        out << "# summary: " << fmt_value(s.lambda) << ',' << fmt_value(s.alpha) << ',' << s.cells << ','
            << s.markets << ',' << fmt_pct(s.pct_da_efficient) << ',' << fmt_pct(s.pct_seq_mbp) << ','
            << fmt_pct(s.pct_gmbp) << ',' << fmt_pct(s.pct_da_eq_ttc) << ',' << fmt_pct(s.se_da_efficient) << ','
            << fmt_pct(s.se_seq_mbp) << ',' << fmt_pct(s.se_gmbp) << ',' << fmt_pct(s.se_da_eq_ttc) << '\n';
    }
    out.close();
    if (!out) throw std::runtime_error("failed writing " + config.output.string());
    std::filesystem::remove(partial_path);
    return result;
}

std::vector<CellResult> read_results_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<CellResult> rows;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != kCsvHeader) throw std::runtime_error("unexpected results header: " + line);
            header = true;
            continue;
        }
        rows.push_back(parse_row(line));
    }
    return rows;
}

}  // namespace mbp
