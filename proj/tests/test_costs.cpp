#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cloudedge/ot.hpp"
#include "reference_equations.hpp"
#include "test_support.hpp"

#include <vector>

using namespace cloudedge;

namespace {

// Channel sized for two devices with the unit-SNR geometry.
ChannelModel two_device_channel() {
    ChannelModel ch = testsup::unit_snr_channel();
    ch.tx_power_w = {0.1, 0.1};
    ch.channel_gain = {1e-12, 1e-12};
    return ch;
}

CostContext make_context(const ChannelModel& ch, std::size_t num_nodes,
                         std::size_t num_devices) {
    CostContext ctx;
    ctx.channel = &ch;
    ctx.wireless_rate_bps.assign(num_devices, 5e7);
    ctx.backlog_cycles.assign(num_nodes, 0.0);
    return ctx;
}

} // namespace

TEST_CASE("single task on its own device prices at the local completion delay") {
    const ChannelModel ch = testsup::unit_snr_channel();
    const std::vector<Task> tasks = {testsup::task_kb(200)};
    const std::vector<NodeProfile> nodes = {testsup::device_profile(0)};
    const CostContext ctx = make_context(ch, nodes.size(), 1);

    const BuiltCosts built = build_cost_matrix(tasks, nodes, ctx);
    REQUIRE(built.cost.entries.rows() == 1);
    REQUIRE(built.cost.entries.cols() == 1);
    CHECK(built.cost.entries(0, 0) ==
          doctest::Approx(refeq::local_time_s(200.0 * 1000.0, 1000.0, 1e9)).epsilon(1e-12));
    CHECK(built.feasible_entries == 1);
}

TEST_CASE("queue backlog adds backlog/capacity seconds to a node's column") {
    const ChannelModel ch = testsup::unit_snr_channel();
    const std::vector<Task> tasks = {testsup::task_kb(100), testsup::task_kb(250)};
    const std::vector<NodeProfile> nodes = {testsup::device_profile(0),
                                            testsup::edge_profile(100)};
    CostContext ctx = make_context(ch, nodes.size(), 1);

    const BuiltCosts idle = build_cost_matrix(tasks, nodes, ctx);
    ctx.backlog_cycles[1] = 5e8; // half a second of edge work
    const BuiltCosts busy = build_cost_matrix(tasks, nodes, ctx);

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        CHECK(busy.cost.entries(i, 0) == doctest::Approx(idle.cost.entries(i, 0)));
        CHECK(busy.cost.entries(i, 1) ==
              doctest::Approx(idle.cost.entries(i, 1) + 5e8 / 1e10).epsilon(1e-12));
    }
}

TEST_CASE("a placement missing its deadline is priced at 10x the best feasible entry") {
    const ChannelModel ch = testsup::unit_snr_channel();
    // 100 kilobits with a 50 ms deadline: edge finishes in 4 ms, local needs
    // 100 ms and the cloud pays the 15 ms fiber latency on top of a slow path.
    Task t = testsup::task_kb(100);
    t.deadline_s = 0.05;
    ChannelModel slow_fiber = ch;
    slow_fiber.fiber_latency_s = 0.1;

    const std::vector<NodeProfile> nodes = {testsup::device_profile(0),
                                            testsup::edge_profile(100),
                                            testsup::cloud_profile(200)};
    CostContext ctx = make_context(slow_fiber, nodes.size(), 1);

    const BuiltCosts built = build_cost_matrix({t}, nodes, ctx);
    const double edge_delay = refeq::edge_time_s(1e5, 200.0, 1e10, 5e7);
    CHECK(built.feasible_entries == 1);
    CHECK(built.cost.entries(0, 1) == doctest::Approx(edge_delay).epsilon(1e-12));
    CHECK(built.penalty == doctest::Approx(10.0 * edge_delay).epsilon(1e-12));
    CHECK(built.cost.entries(0, 0) == doctest::Approx(built.penalty));
    CHECK(built.cost.entries(0, 2) == doctest::Approx(built.penalty));
}

TEST_CASE("with no feasible placement the penalty falls back to 10x the largest delay") {
    const ChannelModel ch = testsup::unit_snr_channel();
    Task t = testsup::task_kb(100);
    t.deadline_s = 1e-6;

    const std::vector<NodeProfile> nodes = {testsup::device_profile(0),
                                            testsup::edge_profile(100),
                                            testsup::cloud_profile(200)};
    CostContext ctx = make_context(ch, nodes.size(), 1);

    const BuiltCosts built = build_cost_matrix({t}, nodes, ctx);
    const double local_delay = refeq::local_time_s(1e5, 1000.0, 1e9);
    const double cloud_delay =
        refeq::cloud_time_s(1e5, 50.0, 1e11, 5e7, 1, 1e9, 0.015);
    const double worst = std::max(local_delay, cloud_delay);
    CHECK(built.feasible_entries == 0);
    CHECK(built.penalty == doctest::Approx(10.0 * worst).epsilon(1e-12));
    for (std::size_t j = 0; j < nodes.size(); ++j)
        CHECK(built.cost.entries(0, j) == doctest::Approx(built.penalty));
}

TEST_CASE("other devices' processors are never candidates") {
    const ChannelModel ch = two_device_channel();
    const std::vector<Task> tasks = {testsup::task_kb(100, 0), testsup::task_kb(100, 1)};
    const std::vector<NodeProfile> nodes = {testsup::device_profile(0),
                                            testsup::device_profile(1),
                                            testsup::edge_profile(100)};
    CostContext ctx = make_context(ch, nodes.size(), 2);

    const BuiltCosts built = build_cost_matrix(tasks, nodes, ctx);
    const double local_delay = refeq::local_time_s(1e5, 1000.0, 1e9);
    CHECK(built.cost.entries(0, 0) == doctest::Approx(local_delay).epsilon(1e-12));
    CHECK(built.cost.entries(1, 1) == doctest::Approx(local_delay).epsilon(1e-12));
    CHECK(built.cost.entries(0, 1) == doctest::Approx(built.penalty));
    CHECK(built.cost.entries(1, 0) == doctest::Approx(built.penalty));
    CHECK(built.feasible_entries == 4); // two local runs + each task on the edge
}

TEST_CASE("cloud pricing reflects the shared wireless hop") {
    const ChannelModel ch = testsup::unit_snr_channel();
    const std::vector<Task> tasks = {testsup::task_kb(100)};
    const std::vector<NodeProfile> nodes = {testsup::device_profile(0),
                                            testsup::cloud_profile(200)};
    CostContext one = make_context(ch, nodes.size(), 1);
    CostContext four = one;
    four.concurrent_offloaders = 4;

    const double alone = build_cost_matrix(tasks, nodes, one).cost.entries(0, 1);
    const double shared = build_cost_matrix(tasks, nodes, four).cost.entries(0, 1);
    // Three extra shares of the 2 ms wireless transfer.
    CHECK(shared - alone == doctest::Approx(3.0 * 1e5 / 5e7).epsilon(1e-12));
}

TEST_CASE("cost construction rejects malformed inputs") {
    const ChannelModel ch = testsup::unit_snr_channel();
    const std::vector<Task> tasks = {testsup::task_kb(100)};
    const std::vector<NodeProfile> nodes = {testsup::device_profile(0)};
    CostContext ctx = make_context(ch, nodes.size(), 1);

    CHECK_THROWS_AS(build_cost_matrix({}, nodes, ctx), misuse_error);
    CHECK_THROWS_AS(build_cost_matrix(tasks, {}, ctx), misuse_error);

    CostContext no_channel = ctx;
    no_channel.channel = nullptr;
    CHECK_THROWS_AS(build_cost_matrix(tasks, nodes, no_channel), misuse_error);

    CostContext short_backlog = ctx;
    short_backlog.backlog_cycles.clear();
    CHECK_THROWS_AS(build_cost_matrix(tasks, nodes, short_backlog), misuse_error);

    CostContext no_rate = ctx;
    no_rate.wireless_rate_bps.clear();
    CHECK_THROWS_AS(build_cost_matrix(tasks, nodes, no_rate), misuse_error);

    const std::vector<Task> foreign = {testsup::task_kb(100, 7)};
    CHECK_THROWS_AS(build_cost_matrix(foreign, nodes, ctx), misuse_error);
}
