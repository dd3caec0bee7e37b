#ifndef CLOUDEDGE_SIMULATOR_HPP
#define CLOUDEDGE_SIMULATOR_HPP

#include <cstdint>
#include <deque>
#include <vector>

#include "cloudedge/model.hpp"
#include "cloudedge/strategies.hpp"

namespace cloudedge {

// Slotted-time network simulation. Each slot: tasks arrive at devices, the
// configured strategy places the whole batch, devices pay the wireless/fiber
// transfer cost up front, and every node then drains its FIFO queue by one
// slot of compute. Interference and the cloud's wireless sharing factor are
// taken from the previous slot's placements, so each slot prices the channel
// it actually observed.

enum class ArrivalProcess { Poisson, Periodic };

struct SimConfig {
    // population (one cloud node is always present)
    int num_devices = 100;
    int num_edges = 3;

    // device hardware
    double device_capacity_hz = 1e9;
    double device_cycles_per_bit = 1000.0;
    double device_compute_power_w = 0.5;
    double device_upload_power_w = 0.1;
    double device_download_power_w = 0.15;

    // edge hardware
    double edge_capacity_hz = 1e10;
    double edge_cycles_per_bit = 200.0;
    double edge_upload_power_w = 0.2;
    double edge_download_power_w = 0.3;

    // cloud hardware
    double cloud_capacity_hz = 1e11;
    double cloud_cycles_per_bit = 50.0;

    // wireless access and fiber backhaul
    double bandwidth_hz = 5e7;
    int num_channels = 50;
    double noise_power_w = 1e-13;
    double tx_power_w = 0.1;
    double gain_min = 1e-7; // per-device gain drawn log-uniformly per run
    double gain_max = 1e-5;
    double fiber_rate_bps = 1e9;
    double fiber_latency_s = 0.015;

    // workload
    ArrivalProcess arrival_process = ArrivalProcess::Poisson;
    double arrival_rate = 1.0; // tasks per device per slot
    int data_min_kb = 1;
    int data_max_kb = 500;
    double deadline_s = 1.0;
    double energy_budget_j = 0.5;

    // simulation
    int num_slots = 1000;
    double slot_length_s = 0.1;
    std::uint64_t seed = 1;
    StrategyKind strategy = StrategyKind::CloudEdge;
    double gamma1 = 0.5; // greedy's delay weight
    OtParams ot;

    void validate() const; // throws config_error
};

struct SimMetrics {
    double avg_task_delay_s = 0.0;   // completed tasks only
    double processing_rate = 0.0;    // completed tasks per slot
    double peak_blocking_kb = 0.0;   // largest end-of-slot queued payload
    double final_blocking_kb = 0.0;
    double total_energy_j = 0.0;     // device-side energy, charged at placement
    double offload_success_rate = 0.0; // in-budget completions / generated
    double ot_iterations_mean = 0.0;
    std::int64_t ot_fallback_count = 0;
    std::int64_t generated = 0;
    std::int64_t completed = 0;
    std::int64_t conservation_violations = 0;

    bool operator==(const SimMetrics&) const = default;
};

// One queued (or running) task on a node.
struct WorkItem {
    std::int64_t task_id = 0;
    int data_kb = 0;
    double total_cycles = 0.0;
    double remaining_cycles = 0.0;
    int enqueue_slot = 0;
    double transmit_s = 0.0; // paid before compute; part of the final delay
    double deadline_s = 0.0;
    double energy_budget_j = 0.0;
    double energy_j = 0.0; // device energy charged for this placement
};

struct NodeState {
    NodeProfile profile;
    std::deque<WorkItem> queue;
    double backlog_cycles = 0.0;
};

// The slot's arrivals for every device, sizes uniform in [data_min_kb,
// data_max_kb]. Streams are keyed by (seed, slot, device), and parameter
// mapping is inverse-CDF, so raising arrival_rate only ever appends tasks to
// a (slot, device) batch; the shared prefix is unchanged.
std::vector<Task> generate_arrivals(const SimConfig& config, std::uint64_t run_seed,
                                    int slot, std::int64_t& next_task_id);

class Simulator {
public:
    explicit Simulator(const SimConfig& config);

    void step(); // advance one slot
    int current_slot() const { return slot_; }

    const std::vector<NodeState>& nodes() const { return nodes_; }
    const ChannelModel& channel() const { return channel_; }

    SimMetrics metrics() const; // snapshot of the counters so far

private:
    SlotSnapshot make_snapshot(std::vector<Task> pending) const;
    Assignment dispatch(const SlotSnapshot& snapshot);
    void place(const Task& task, int node_index, const SlotSnapshot& snapshot);
    void drain();

    SimConfig cfg_;
    std::uint64_t run_seed_ = 0;
    ChannelModel channel_;
    std::vector<NodeState> nodes_;
    int slot_ = 0;
    std::int64_t next_task_id_ = 0;

    // previous slot's placement facts, feeding this slot's channel estimate
    std::vector<char> offloaded_last_;
    int off_device_last_ = 0;

    // previous slot's transport column potentials, reused as a warm start
    std::vector<double> ot_warm_log_v_;

    // counters
    std::int64_t generated_ = 0;
    std::int64_t completed_ = 0;
    std::int64_t queued_ = 0;
    std::int64_t succeeded_ = 0;
    std::int64_t conservation_violations_ = 0;
    double delay_sum_s_ = 0.0;
    double energy_sum_j_ = 0.0;
    double blocking_kb_ = 0.0;
    double peak_blocking_kb_ = 0.0;
    std::int64_t ot_calls_ = 0;
    std::int64_t ot_iterations_sum_ = 0;
    std::int64_t ot_fallbacks_ = 0;
};

SimMetrics run(const SimConfig& config);

// Sweep grid, evaluated run-by-run. Every (rate, strategy) pair with the same
// seed index shares one run seed derived only from (config seed, seed index),
// so compared curves see identical workloads and channel draws.
struct SweepConfig {
    SimConfig base;
    std::vector<double> rates;
    std::vector<StrategyKind> strategies;
    int num_seeds = 5;
    int jobs = 0; // <= 0: library default thread count
};

struct SweepPoint {
    double arrival_rate = 0.0;
    StrategyKind strategy = StrategyKind::CloudEdge;
    int seed_index = 0;
    std::uint64_t run_seed = 0;
    SimMetrics metrics;
};

// Points ordered rate-major, then strategy, then seed index.
std::vector<SweepPoint> sweep(const SweepConfig& config);

} // namespace cloudedge

#endif
