#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "cloudedge/scenario.hpp"

using namespace cloudedge;

namespace {

// Exit codes: 0 success, 1 I/O failure, 2 usage or validation problem.
constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ScenarioFile resolve_scenario(const std::string& path) {
    if (path.empty()) return ScenarioFile{}; // stock full-scale defaults
    std::ifstream in(path);
    if (!in) throw io_error("cannot open scenario file: " + path);
    return parse_scenario(in, path);
}

std::string strategy_list() {
    std::string out;
    for (StrategyKind k : all_strategies()) {
        if (!out.empty()) out += ", ";
        out += strategy_name(k);
    }
    return out;
}

bool file_has_content(const std::string& path) {
    std::ifstream in(path);
    return in && in.peek() != std::ifstream::traits_type::eof();
}

void append_row(const std::string& path, const std::string& row) {
    const bool fresh = !file_has_content(path);
    std::ofstream out(path, std::ios::app);
    if (!out) throw io_error("cannot open output file: " + path);
    if (fresh) out << csv_header() << "\n";
    out << row << "\n";
    if (!out) throw io_error("write failed: " + path);
}

std::string summary_path(const std::string& out_path) {
    const std::size_t dot = out_path.rfind('.');
    const std::size_t slash = out_path.rfind('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return out_path + "_summary.csv";
    return out_path.substr(0, dot) + "_summary" + out_path.substr(dot);
}

int cmd_run(const std::string& scenario_path, const std::string& strategy,
            std::uint64_t seed, bool seed_set, const std::string& out) {
    ScenarioFile s = resolve_scenario(scenario_path);
    if (!strategy.empty()) s.config.strategy = parse_strategy(strategy);
    if (seed_set) s.config.seed = seed;
    if (!out.empty()) s.output = out;

    const SimMetrics m = run(s.config);
    append_row(s.output, csv_row(strategy_name(s.config.strategy), s.config.seed,
                                 s.config.arrival_rate, m));

    std::cout << strategy_name(s.config.strategy) << " seed=" << s.config.seed
              << " rate=" << format_sig9(s.config.arrival_rate)
              << ": delay=" << format_sig9(m.avg_task_delay_s)
              << "s processed=" << format_sig9(m.processing_rate)
              << "/slot success=" << format_sig9(100.0 * m.offload_success_rate)
              << "% energy=" << format_sig9(m.total_energy_j)
              << "J blocked=" << format_sig9(m.final_blocking_kb) << "kb -> " << s.output
              << "\n";
    return kExitOk;
}

int cmd_sweep(const std::string& scenario_path, const std::vector<double>& rates,
              const std::vector<std::string>& strategies, int seeds, int jobs,
              const std::string& out) {
    ScenarioFile s = resolve_scenario(scenario_path);

    SweepConfig sc;
    sc.base = s.config;
    sc.rates = rates.empty() ? s.sweep_rates : rates;
    if (strategies.empty()) {
        sc.strategies = s.sweep_strategies;
    } else {
        for (const std::string& name : strategies)
            sc.strategies.push_back(parse_strategy(name));
    }
    sc.num_seeds = seeds > 0 ? seeds : s.sweep_seeds;
    sc.jobs = jobs;

    const std::string out_path = out.empty() ? s.output : out;
    const std::vector<SweepPoint> points = sweep(sc);

    std::ofstream grid(out_path, std::ios::trunc);
    if (!grid) throw io_error("cannot open output file: " + out_path);
    grid << csv_header() << "\n";
    for (const SweepPoint& p : points)
        grid << csv_row(strategy_name(p.strategy),
                        static_cast<std::uint64_t>(p.seed_index), p.arrival_rate,
                        p.metrics)
             << "\n";
    if (!grid) throw io_error("write failed: " + out_path);

    const std::string sum_path = summary_path(out_path);
    std::ofstream sum(sum_path, std::ios::trunc);
    if (!sum) throw io_error("cannot open output file: " + sum_path);
    sum << summary_header() << "\n";
    const std::vector<SummaryRow> rows = summarize(points);
    for (const SummaryRow& r : rows) sum << summary_row(r) << "\n";
    if (!sum) throw io_error("write failed: " + sum_path);

    std::cout << "swept " << sc.rates.size() << " rates x " << sc.strategies.size()
              << " strategies x " << sc.num_seeds << " seeds: " << points.size()
              << " rows -> " << out_path << ", " << rows.size() << " summary rows -> "
              << sum_path << "\n";
    return kExitOk;
}

int cmd_validate(const std::string& scenario_path) {
    const ScenarioFile s = resolve_scenario(scenario_path);
    std::cout << describe(s);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collaborative cloud-edge computation offloading simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    if (const char* env = std::getenv("OFFLOADSIM_SCENARIO")) scenario_path = env;
    app.add_option("--scenario", scenario_path,
                   "Scenario file (default: $OFFLOADSIM_SCENARIO, else built-in "
                   "full-scale defaults)")
        ->expected(1);
    app.fallthrough();

    CLI::App* run_cmd = app.add_subcommand("run", "Run one simulation, append a CSV row");
    std::string run_strategy;
    std::uint64_t run_seed = 0;
    std::string run_out;
    run_cmd->add_option("--strategy", run_strategy,
                        "Placement strategy (" + strategy_list() + ")");
    CLI::Option* seed_opt = run_cmd->add_option("--seed", run_seed, "Run seed");
    run_cmd->add_option("--out", run_out, "Results CSV path (appended)");

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Run a rate x strategy x seed grid, write CSVs");
    std::vector<double> sweep_rates;
    std::vector<std::string> sweep_strategies;
    int sweep_seeds = 0;
    int sweep_jobs = 0;
    std::string sweep_out;
    sweep_cmd->add_option("--rates", sweep_rates, "Arrival rates (comma separated)")
        ->delimiter(',');
    sweep_cmd
        ->add_option("--strategies", sweep_strategies,
                     "Strategies (comma separated; " + strategy_list() + ")")
        ->delimiter(',');
    sweep_cmd->add_option("--seeds", sweep_seeds, "Seeds per grid point");
    sweep_cmd->add_option("--jobs", sweep_jobs, "Concurrent runs (default: cores)");
    sweep_cmd->add_option("--out", sweep_out, "Grid CSV path (summary lands next to it)");

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "Parse the scenario and print the resolved config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run_cmd->parsed())
            return cmd_run(scenario_path, run_strategy, run_seed,
                           seed_opt->count() > 0, run_out);
        if (sweep_cmd->parsed())
            return cmd_sweep(scenario_path, sweep_rates, sweep_strategies, sweep_seeds,
                             sweep_jobs, sweep_out);
        if (validate_cmd->parsed()) return cmd_validate(scenario_path);
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (std::string(e.what()).find("unknown strategy") != std::string::npos)
            std::cerr << "valid strategies: " << strategy_list() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
