#include "cloudedge/simulator.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cloudedge/rng.hpp"

namespace cloudedge {

namespace {

// Stream tags keep every random purpose on its own splitmix64 stream.
constexpr std::uint64_t kStreamArrivalCount = 0xA1;
constexpr std::uint64_t kStreamArrivalSize = 0xA2;
constexpr std::uint64_t kStreamChannelGain = 0xC1;
constexpr std::uint64_t kStreamRandomPolicy = 0xD1;
constexpr std::uint64_t kStreamRunSeed = 0x5EED;

void require(bool ok, const char* what) {
    if (!ok) throw config_error(what);
}

} // namespace

void SimConfig::validate() const {
    require(num_devices >= 1, "config: num_devices must be at least 1");
    require(num_edges >= 0, "config: num_edges must be nonnegative");
    require(device_capacity_hz > 0.0 && edge_capacity_hz > 0.0 && cloud_capacity_hz > 0.0,
            "config: compute capacities must be positive");
    require(device_cycles_per_bit > 0.0 && edge_cycles_per_bit > 0.0 &&
                cloud_cycles_per_bit > 0.0,
            "config: cycles_per_bit must be positive");
    require(device_compute_power_w > 0.0 && device_upload_power_w > 0.0,
            "config: device powers must be positive");
    require(bandwidth_hz > 0.0, "config: bandwidth must be positive");
    require(num_channels >= 1, "config: num_channels must be at least 1");
    require(noise_power_w > 0.0, "config: noise power must be positive");
    require(tx_power_w > 0.0, "config: transmit power must be positive");
    require(gain_min > 0.0 && gain_max >= gain_min, "config: bad channel gain range");
    require(fiber_rate_bps > 0.0, "config: fiber rate must be positive");
    require(fiber_latency_s >= 0.0, "config: fiber latency must be nonnegative");
    require(arrival_rate >= 0.0, "config: arrival rate must be nonnegative");
    require(data_min_kb >= 1 && data_max_kb >= data_min_kb, "config: bad data size range");
    require(deadline_s > 0.0, "config: deadline must be positive");
    require(energy_budget_j > 0.0, "config: energy budget must be positive");
    require(num_slots >= 1, "config: num_slots must be at least 1");
    require(slot_length_s > 0.0, "config: slot length must be positive");
    require(gamma1 >= 0.0 && gamma1 <= 1.0, "config: gamma1 must be in [0, 1]");
    require(ot.commit_fraction > 0.0 && ot.commit_fraction <= 1.0,
            "config: ot_commit_fraction must be in (0, 1]");
    require(ot.tolerance > 0.0, "config: ot_tolerance must be positive");
    require(ot.max_iterations >= 1, "config: ot_max_iterations must be at least 1");
}

std::vector<Task> generate_arrivals(const SimConfig& config, std::uint64_t run_seed,
                                    int slot, std::int64_t& next_task_id) {
    std::vector<Task> out;
    for (int d = 0; d < config.num_devices; ++d) {
        int count = 0;
        if (config.arrival_process == ArrivalProcess::Poisson) {
            Rng counter(derive_seed(run_seed, kStreamArrivalCount, slot, d));
            count = counter.next_poisson(config.arrival_rate);
        } else {
            // Integral pacing: device d emits floor((s+1)r) - floor(sr) tasks,
            // spreading a fractional rate evenly over slots.
            const double r = config.arrival_rate;
            count = static_cast<int>(std::floor((slot + 1) * r + 1e-9) -
                                     std::floor(slot * r + 1e-9));
        }
        if (count <= 0) continue;
        Rng sizes(derive_seed(run_seed, kStreamArrivalSize, slot, d));
        for (int k = 0; k < count; ++k) {
            Task t;
            t.id = next_task_id++;
            t.data_size_kb = sizes.next_int(config.data_min_kb, config.data_max_kb);
            t.deadline_s = config.deadline_s;
            t.energy_budget_j = config.energy_budget_j;
            t.origin_device = d;
            t.created_slot = slot;
            out.push_back(t);
        }
    }
    return out;
}

Simulator::Simulator(const SimConfig& config) : cfg_(config) {
    cfg_.validate();
    run_seed_ = cfg_.seed;

    channel_.bandwidth_hz = cfg_.bandwidth_hz;
    channel_.num_channels = cfg_.num_channels;
    channel_.noise_power_w = cfg_.noise_power_w;
    channel_.fiber_rate_bps = cfg_.fiber_rate_bps;
    channel_.fiber_latency_s = cfg_.fiber_latency_s;
    channel_.tx_power_w.assign(static_cast<std::size_t>(cfg_.num_devices), cfg_.tx_power_w);
    channel_.channel_gain.resize(static_cast<std::size_t>(cfg_.num_devices));
    for (int d = 0; d < cfg_.num_devices; ++d) {
        Rng g(derive_seed(run_seed_, kStreamChannelGain, d));
        channel_.channel_gain[static_cast<std::size_t>(d)] =
            g.next_log_uniform(cfg_.gain_min, cfg_.gain_max);
    }

    nodes_.reserve(static_cast<std::size_t>(cfg_.num_devices + cfg_.num_edges + 1));
    for (int d = 0; d < cfg_.num_devices; ++d) {
        NodeState n;
        n.profile.id = d;
        n.profile.node_class = NodeClass::Device;
        n.profile.compute_capacity_hz = cfg_.device_capacity_hz;
        n.profile.cycles_per_bit = cfg_.device_cycles_per_bit;
        n.profile.compute_power_w = cfg_.device_compute_power_w;
        n.profile.upload_power_w = cfg_.device_upload_power_w;
        n.profile.download_power_w = cfg_.device_download_power_w;
        nodes_.push_back(std::move(n));
    }
    for (int e = 0; e < cfg_.num_edges; ++e) {
        NodeState n;
        n.profile.id = cfg_.num_devices + e;
        n.profile.node_class = NodeClass::Edge;
        n.profile.compute_capacity_hz = cfg_.edge_capacity_hz;
        n.profile.cycles_per_bit = cfg_.edge_cycles_per_bit;
        n.profile.upload_power_w = cfg_.edge_upload_power_w;
        n.profile.download_power_w = cfg_.edge_download_power_w;
        nodes_.push_back(std::move(n));
    }
    {
        NodeState n;
        n.profile.id = cfg_.num_devices + cfg_.num_edges;
        n.profile.node_class = NodeClass::Cloud;
        n.profile.compute_capacity_hz = cfg_.cloud_capacity_hz;
        n.profile.cycles_per_bit = cfg_.cloud_cycles_per_bit;
        nodes_.push_back(std::move(n));
    }

    offloaded_last_.assign(static_cast<std::size_t>(cfg_.num_devices), 0);
}

SlotSnapshot Simulator::make_snapshot(std::vector<Task> pending) const {
    SlotSnapshot s;
    s.pending_tasks = std::move(pending);
    s.nodes.reserve(nodes_.size());
    for (const NodeState& n : nodes_) s.nodes.push_back({n.profile, n.backlog_cycles});
    s.channel = &channel_;
    s.slot_length_s = cfg_.slot_length_s;
    s.active_offloaders = std::max(1, off_device_last_);

    s.wireless_rate_bps.resize(static_cast<std::size_t>(cfg_.num_devices));
    std::vector<int> interferers;
    for (int d = 0; d < cfg_.num_devices; ++d) {
        interferers.clear();
        for (int e = 0; e < cfg_.num_devices; ++e) {
            if (e == d) continue;
            if (e % cfg_.num_channels != d % cfg_.num_channels) continue;
            if (offloaded_last_[static_cast<std::size_t>(e)]) interferers.push_back(e);
        }
        s.wireless_rate_bps[static_cast<std::size_t>(d)] =
            transmission_rate(channel_, d, interferers);
    }
    return s;
}

Assignment Simulator::dispatch(const SlotSnapshot& snapshot) {
    switch (cfg_.strategy) {
    case StrategyKind::CloudEdge: {
        OtParams params = cfg_.ot;
        params.warm_col_log_scaling = ot_warm_log_v_;
        OtDecision decision = decide_ot(snapshot, params);
        ++ot_calls_;
        ot_iterations_sum_ += decision.iterations;
        if (decision.fallback) ++ot_fallbacks_;
        if (!decision.col_log_scaling.empty())
            ot_warm_log_v_ = std::move(decision.col_log_scaling);
        return decision.assignment;
    }
    case StrategyKind::Greedy:
        return decide_greedy(snapshot, cfg_.gamma1);
    case StrategyKind::LocalOnly:
        return decide_fixed(snapshot, NodeClass::Device);
    case StrategyKind::EdgeOnly:
        return decide_fixed(snapshot, NodeClass::Edge);
    case StrategyKind::CloudOnly:
        return decide_fixed(snapshot, NodeClass::Cloud);
    case StrategyKind::Random: {
        Rng rng(derive_seed(run_seed_, kStreamRandomPolicy, slot_));
        return decide_random(snapshot, rng);
    }
    }
    throw misuse_error("dispatch: bad strategy kind");
}

void Simulator::place(const Task& task, int node_index, const SlotSnapshot& snapshot) {
    NodeState& node = nodes_[static_cast<std::size_t>(node_index)];
    const NodeProfile& device =
        nodes_[static_cast<std::size_t>(task.origin_device)].profile;
    const double rate =
        snapshot.wireless_rate_bps[static_cast<std::size_t>(task.origin_device)];

    TimeEnergy te;
    double transmit_s = 0.0;
    switch (node.profile.node_class) {
    case NodeClass::Device:
        te = local_time_energy(task, node.profile);
        break;
    case NodeClass::Edge:
        te = edge_time_energy(task, device, node.profile, rate);
        transmit_s = task_bits(task) / rate;
        break;
    case NodeClass::Cloud:
        te = cloud_time_energy(task, device, node.profile, rate,
                               snapshot.active_offloaders, channel_);
        transmit_s = task_bits(task) / rate *
                         static_cast<double>(snapshot.active_offloaders) +
                     task_bits(task) / channel_.fiber_rate_bps + channel_.fiber_latency_s;
        break;
    }

    WorkItem item;
    item.task_id = task.id;
    item.data_kb = task.data_size_kb;
    item.total_cycles = task_cycles(task, node.profile);
    item.remaining_cycles = item.total_cycles;
    item.enqueue_slot = slot_;
    item.transmit_s = transmit_s;
    item.deadline_s = task.deadline_s;
    item.energy_budget_j = task.energy_budget_j;
    item.energy_j = te.energy_j;

    node.backlog_cycles += item.total_cycles;
    blocking_kb_ += static_cast<double>(item.data_kb);
    energy_sum_j_ += te.energy_j;
    node.queue.push_back(item);
    ++queued_;
}

void Simulator::drain() {
    for (NodeState& node : nodes_) {
        double budget = node.profile.compute_capacity_hz * cfg_.slot_length_s;
        double used = 0.0;
        while (budget > 0.0 && !node.queue.empty()) {
            WorkItem& item = node.queue.front();
            const double use = std::min(budget, item.remaining_cycles);
            item.remaining_cycles -= use;
            node.backlog_cycles -= use;
            budget -= use;
            used += use;
            blocking_kb_ -= static_cast<double>(item.data_kb) * use / item.total_cycles;
            if (item.remaining_cycles > 0.0) break;

            const double offset_s = used / node.profile.compute_capacity_hz;
            const double delay = item.transmit_s +
                                 static_cast<double>(slot_ - item.enqueue_slot) *
                                     cfg_.slot_length_s +
                                 offset_s;
            delay_sum_s_ += delay;
            ++completed_;
            --queued_;
            if (delay <= item.deadline_s && item.energy_j <= item.energy_budget_j)
                ++succeeded_;
            node.queue.pop_front();
        }
        // Anything beyond float dust here means the drain accounting is wrong.
        if (node.backlog_cycles < -1e-3) ++conservation_violations_;
        if (node.backlog_cycles < 0.0) node.backlog_cycles = 0.0; // float dust
    }
    if (blocking_kb_ < -1e-6) ++conservation_violations_;
    if (blocking_kb_ < 0.0) blocking_kb_ = 0.0;
}

void Simulator::step() {
    std::vector<Task> arrivals = generate_arrivals(cfg_, run_seed_, slot_, next_task_id_);
    generated_ += static_cast<std::int64_t>(arrivals.size());

    std::vector<char> offloaded_now(static_cast<std::size_t>(cfg_.num_devices), 0);
    int off_device_now = 0;

    if (!arrivals.empty()) {
        const SlotSnapshot snapshot = make_snapshot(arrivals);
        const Assignment assignment = dispatch(snapshot);
        for (std::size_t i = 0; i < arrivals.size(); ++i) {
            place(arrivals[i], assignment[i], snapshot);
            const NodeClass placed =
                nodes_[static_cast<std::size_t>(assignment[i])].profile.node_class;
            if (placed != NodeClass::Device) {
                offloaded_now[static_cast<std::size_t>(arrivals[i].origin_device)] = 1;
                ++off_device_now;
            }
        }
    }

    drain();

    peak_blocking_kb_ = std::max(peak_blocking_kb_, blocking_kb_);
    if (generated_ != completed_ + queued_) ++conservation_violations_;

    offloaded_last_ = std::move(offloaded_now);
    off_device_last_ = off_device_now;
    ++slot_;
}

SimMetrics Simulator::metrics() const {
    SimMetrics m;
    m.generated = generated_;
    m.completed = completed_;
    m.conservation_violations = conservation_violations_;
    m.avg_task_delay_s = completed_ > 0 ? delay_sum_s_ / static_cast<double>(completed_) : 0.0;
    m.processing_rate =
        slot_ > 0 ? static_cast<double>(completed_) / static_cast<double>(slot_) : 0.0;
    m.peak_blocking_kb = peak_blocking_kb_;
    m.final_blocking_kb = blocking_kb_;
    m.total_energy_j = energy_sum_j_;
    m.offload_success_rate =
        generated_ > 0 ? static_cast<double>(succeeded_) / static_cast<double>(generated_)
                       : 0.0;
    m.ot_iterations_mean =
        ot_calls_ > 0 ? static_cast<double>(ot_iterations_sum_) / static_cast<double>(ot_calls_)
                      : 0.0;
    m.ot_fallback_count = ot_fallbacks_;
    return m;
}

SimMetrics run(const SimConfig& config) {
    Simulator sim(config);
    for (int s = 0; s < config.num_slots; ++s) sim.step();
    return sim.metrics();
}

std::vector<SweepPoint> sweep(const SweepConfig& config) {
    config.base.validate();
    if (config.rates.empty() || config.strategies.empty() || config.num_seeds < 1)
        throw config_error("sweep: empty rate grid, strategy list, or seed count");

    std::vector<SweepPoint> points;
    for (double rate : config.rates)
        for (StrategyKind strategy : config.strategies)
            for (int s = 0; s < config.num_seeds; ++s) {
                SweepPoint p;
                p.arrival_rate = rate;
                p.strategy = strategy;
                p.seed_index = s;
                p.run_seed = derive_seed(config.base.seed, kStreamRunSeed, s);
                points.push_back(p);
            }

#ifdef _OPENMP
    const int jobs = config.jobs > 0 ? config.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(points.size()); ++i) {
        SweepPoint& p = points[static_cast<std::size_t>(i)];
        SimConfig run_cfg = config.base;
        run_cfg.arrival_rate = p.arrival_rate;
        run_cfg.strategy = p.strategy;
        run_cfg.seed = p.run_seed;
        p.metrics = run(run_cfg);
    }
    return points;
}

} // namespace cloudedge
