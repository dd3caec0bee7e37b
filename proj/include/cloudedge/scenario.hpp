#ifndef CLOUDEDGE_SCENARIO_HPP
#define CLOUDEDGE_SCENARIO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "cloudedge/simulator.hpp"

namespace cloudedge {

// Scenario text format: one `key = value` per line, `#` starts a comment,
// unknown keys are errors. Every key has a default (the stock hardware set),
// so an empty file is a valid full-scale scenario.

struct ScenarioFile {
    SimConfig config;
    std::vector<double> sweep_rates = {0.1, 0.5, 1.0, 1.5, 2.0};
    std::vector<StrategyKind> sweep_strategies = all_strategies();
    int sweep_seeds = 5;
    std::string output = "results.csv";
};

// Errors name the source, line, and key: "desk.scenario:7: key 'seed': ...".
ScenarioFile parse_scenario(std::istream& in, const std::string& name);
ScenarioFile load_scenario(const std::string& path);

// The scaled-down reference scenario used by tests and benches: 20 devices,
// 3 edges, 10 channels, 1000 slots. Kept in sync with scenarios/desk.scenario.
ScenarioFile desk_scenario();

// Resolved configuration, one key per line, in scenario-file syntax.
std::string describe(const ScenarioFile& scenario);

// Result table schema. Floats are rendered with 9 significant digits.
std::string format_sig9(double v);
std::string csv_header();
std::string csv_row(const std::string& strategy, std::uint64_t seed, double arrival_rate,
                    const SimMetrics& m);

// Per-(rate, strategy) means over seeds, in first-appearance order.
struct SummaryRow {
    StrategyKind strategy = StrategyKind::CloudEdge;
    double arrival_rate = 0.0;
    int seeds = 0;
    double avg_task_delay_s = 0.0;
    double processing_rate = 0.0;
    double peak_blocking_kb = 0.0;
    double final_blocking_kb = 0.0;
    double total_energy_j = 0.0;
    double offload_success_rate = 0.0;
    double ot_iterations_mean = 0.0;
    double ot_fallback_mean = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<SweepPoint>& points);
std::string summary_header();
std::string summary_row(const SummaryRow& row);

} // namespace cloudedge

#endif
