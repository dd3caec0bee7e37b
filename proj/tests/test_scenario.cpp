#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cloudedge/scenario.hpp"

#include <sstream>

using namespace cloudedge;

namespace {

ScenarioFile parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in, "test");
}

} // namespace

TEST_CASE("an empty scenario resolves to the stock full-scale setup") {
    const ScenarioFile s = parse_text("");
    CHECK(s.config.num_devices == 100);
    CHECK(s.config.num_edges == 3);
    CHECK(s.config.device_capacity_hz == 1e9);
    CHECK(s.config.device_cycles_per_bit == 1000.0);
    CHECK(s.config.device_compute_power_w == 0.5);
    CHECK(s.config.device_upload_power_w == 0.1);
    CHECK(s.config.device_download_power_w == 0.15);
    CHECK(s.config.edge_capacity_hz == 1e10);
    CHECK(s.config.edge_cycles_per_bit == 200.0);
    CHECK(s.config.edge_upload_power_w == 0.2);
    CHECK(s.config.edge_download_power_w == 0.3);
    CHECK(s.config.cloud_capacity_hz == 1e11);
    CHECK(s.config.cloud_cycles_per_bit == 50.0);
    CHECK(s.config.bandwidth_hz == 5e7);
    CHECK(s.config.num_channels == 50);
    CHECK(s.config.noise_power_w == 1e-13);
    CHECK(s.config.fiber_rate_bps == 1e9);
    CHECK(s.config.data_min_kb == 1);
    CHECK(s.config.data_max_kb == 500);
    CHECK(s.config.deadline_s == 1.0);
    CHECK(s.config.energy_budget_j == 0.5);
    CHECK(s.config.slot_length_s == 0.1);
    CHECK(s.config.strategy == StrategyKind::CloudEdge);
}

TEST_CASE("partial overrides leave the other keys at their defaults") {
    const ScenarioFile s = parse_text("num_devices = 20\n# a comment\n\nseed = 42\n");
    CHECK(s.config.num_devices == 20);
    CHECK(s.config.seed == 42);
    CHECK(s.config.num_edges == 3);
    CHECK(s.config.bandwidth_hz == 5e7);
}

TEST_CASE("comments, blank lines, and inline comments are ignored") {
    const ScenarioFile s = parse_text("# full line\n  \n\nnum_edges = 5 # trailing\n");
    CHECK(s.config.num_edges == 5);
}

TEST_CASE("scenario rejections name the key and line") {
    CHECK_THROWS_WITH_AS(parse_text("num_devices = 20\nbogus_key = 1\n"),
                         doctest::Contains("test:2"), config_error);
    CHECK_THROWS_WITH_AS(parse_text("bogus_key = 1\n"),
                         doctest::Contains("'bogus_key'"), config_error);
    CHECK_THROWS_WITH_AS(parse_text("num_devices 20\n"),
                         doctest::Contains("expected 'key = value'"), config_error);
    CHECK_THROWS_WITH_AS(parse_text("num_devices =\n"), doctest::Contains("missing value"),
                         config_error);
    CHECK_THROWS_WITH_AS(parse_text("num_devices = twenty\n"),
                         doctest::Contains("malformed value"), config_error);
    CHECK_THROWS_WITH_AS(parse_text("arrival_rate = 1.5x\n"),
                         doctest::Contains("'arrival_rate'"), config_error);
    CHECK_THROWS_AS(parse_text("strategy = nosuch\n"), config_error);
    CHECK_THROWS_AS(parse_text("arrival_process = sometimes\n"), config_error);
    CHECK_THROWS_AS(parse_text("ot_marginals = maybe\n"), config_error);
}

TEST_CASE("out-of-range values fail validation even when well-formed") {
    CHECK_THROWS_AS(parse_text("arrival_rate = -1\n"), config_error);
    CHECK_THROWS_AS(parse_text("num_devices = 0\n"), config_error);
    CHECK_THROWS_AS(parse_text("data_min_kb = 7\ndata_max_kb = 3\n"), config_error);
    CHECK_THROWS_AS(parse_text("sweep_seeds = 0\n"), config_error);
    CHECK_THROWS_AS(parse_text("sweep_rates = 1.0,-0.5\n"), config_error);
}

TEST_CASE("sweep grids and enums parse from lists and names") {
    const ScenarioFile s = parse_text(
        "sweep_rates = 0.5, 1.0, 2.0\n"
        "sweep_strategies = local, cloud-edge\n"
        "sweep_seeds = 3\n"
        "strategy = greedy\n"
        "arrival_process = periodic\n"
        "ot_marginals = fill\n"
        "output = out.csv\n");
    CHECK(s.sweep_rates == std::vector<double>{0.5, 1.0, 2.0});
    CHECK(s.sweep_strategies ==
          std::vector<StrategyKind>{StrategyKind::LocalOnly, StrategyKind::CloudEdge});
    CHECK(s.sweep_seeds == 3);
    CHECK(s.config.strategy == StrategyKind::Greedy);
    CHECK(s.config.arrival_process == ArrivalProcess::Periodic);
    CHECK(s.config.ot.marginals == OtMarginals::CapacityFill);
    CHECK(s.output == "out.csv");
}

TEST_CASE("describe emits a parseable round-trip of the resolved config") {
    ScenarioFile s = desk_scenario();
    s.config.seed = 99;
    s.config.ot.epsilon = 0.001;
    s.config.ot.relaxation = 1.25;
    const ScenarioFile back = parse_text(describe(s));
    CHECK(back.config.num_devices == s.config.num_devices);
    CHECK(back.config.num_channels == s.config.num_channels);
    CHECK(back.config.seed == 99);
    CHECK(back.config.ot.epsilon == 0.001);
    CHECK(back.config.ot.relaxation == 1.25);
    CHECK(back.sweep_rates == s.sweep_rates);
    CHECK(back.output == s.output);
}

TEST_CASE("the checked-in desk scenario matches the built-in one") {
    const ScenarioFile file = load_scenario(std::string(TEST_SCENARIO_DIR) + "/desk.scenario");
    const ScenarioFile code = desk_scenario();
    CHECK(describe(file) == describe(code));
}

TEST_CASE("missing scenario files are an error") {
    CHECK_THROWS_AS(load_scenario("/no/such/file.scenario"), config_error);
}

TEST_CASE("result rows render floats with nine significant digits") {
    CHECK(format_sig9(0.123456789123) == "0.123456789");
    CHECK(format_sig9(1.0) == "1");
    CHECK(format_sig9(12345678912.0) == "1.23456789e+10");
    CHECK(format_sig9(0.0) == "0");

    SimMetrics m;
    m.avg_task_delay_s = 0.0123456789123;
    m.processing_rate = 2.5;
    m.peak_blocking_kb = 1234.5;
    m.final_blocking_kb = 1000.25;
    m.total_energy_j = 98.7654321123;
    m.offload_success_rate = 0.985;
    m.ot_iterations_mean = 41.25;
    m.ot_fallback_count = 3;
    CHECK(csv_row("cloud-edge", 7, 1.5, m) ==
          "cloud-edge,7,1.5,0.0123456789,2.5,1234.5,1000.25,98.7654321,0.985,41.25,3");
    CHECK(csv_header() ==
          "strategy,seed,arrival_rate,avg_task_delay_s,processing_rate,peak_blocking_kb,"
          "final_blocking_kb,total_energy_j,offload_success_rate,ot_iterations_mean,"
          "ot_fallback_count");
}

TEST_CASE("summaries average the detail rows per rate and strategy") {
    std::vector<SweepPoint> points(4);
    points[0] = {1.0, StrategyKind::LocalOnly, 0, 11, {}};
    points[1] = {1.0, StrategyKind::LocalOnly, 1, 12, {}};
    points[2] = {2.0, StrategyKind::LocalOnly, 0, 11, {}};
    points[3] = {2.0, StrategyKind::LocalOnly, 1, 12, {}};
    points[0].metrics.avg_task_delay_s = 0.2;
    points[1].metrics.avg_task_delay_s = 0.4;
    points[0].metrics.ot_fallback_count = 1;
    points[1].metrics.ot_fallback_count = 2;
    points[2].metrics.final_blocking_kb = 10.0;
    points[3].metrics.final_blocking_kb = 30.0;

    const std::vector<SummaryRow> rows = summarize(points);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].strategy == StrategyKind::LocalOnly);
    CHECK(rows[0].arrival_rate == 1.0);
    CHECK(rows[0].seeds == 2);
    CHECK(rows[0].avg_task_delay_s == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(rows[0].ot_fallback_mean == doctest::Approx(1.5));
    CHECK(rows[1].arrival_rate == 2.0);
    CHECK(rows[1].final_blocking_kb == doctest::Approx(20.0).epsilon(1e-12));

    CHECK(summary_row(rows[0]).rfind("local,1,2,0.3,", 0) == 0);
}
