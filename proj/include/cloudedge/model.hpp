#ifndef CLOUDEDGE_MODEL_HPP
#define CLOUDEDGE_MODEL_HPP

#include <cstdint>
#include <vector>

#include "cloudedge/errors.hpp"

namespace cloudedge {

// Physical model of a collaborative offloading network: battery-powered
// devices, edge servers reachable over a shared wireless uplink, and a remote
// cloud reached through the edge over fiber. All rates are bit/s, times are
// seconds, powers are watts, energies are joules. Task data sizes are carried
// in kilobits (1 kilobit = 1000 bits) to match how workloads are specified.

enum class NodeClass { Device, Edge, Cloud };

struct Task {
    std::int64_t id = 0;
    int data_size_kb = 0;      // payload, kilobits
    double deadline_s = 0.0;   // completion budget
    double energy_budget_j = 0.0;
    int origin_device = 0;     // device id that generated the task
    int created_slot = 0;
};

struct NodeProfile {
    int id = 0;
    NodeClass node_class = NodeClass::Device;
    double compute_capacity_hz = 0.0; // cycles per second
    double cycles_per_bit = 0.0;      // workload intensity when run on this class
    double compute_power_w = 0.0;     // device-only: power while computing locally
    double upload_power_w = 0.0;
    double download_power_w = 0.0;
};

// Wireless access with a fixed channel count plus the fiber hop to the cloud.
// tx_power_w / channel_gain are per-device tables indexed by device id.
struct ChannelModel {
    double bandwidth_hz = 0.0;
    int num_channels = 0;
    double noise_power_w = 0.0; // receiver noise floor
    std::vector<double> tx_power_w;
    std::vector<double> channel_gain;
    double fiber_rate_bps = 0.0;
    double fiber_latency_s = 0.0;
};

struct TimeEnergy {
    double time_s = 0.0;
    double energy_j = 0.0;
};

inline double task_bits(const Task& t) { return static_cast<double>(t.data_size_kb) * 1000.0; }

// Cycles the task costs on a node of the given profile.
inline double task_cycles(const Task& t, const NodeProfile& node) {
    return task_bits(t) * node.cycles_per_bit;
}

// Shannon rate of a device's uplink. Co-channel transmissions by `interferers`
// (device ids, excluding the sender) add to the noise floor.
double transmission_rate(const ChannelModel& channel, int device,
                         const std::vector<int>& interferers);

// Run on the originating device: compute time only, energy at compute power.
TimeEnergy local_time_energy(const Task& task, const NodeProfile& device);

// Offload to an edge server: wireless transfer at `rate_bps` plus edge
// compute. Device energy is upload power held for the whole completion time.
TimeEnergy edge_time_energy(const Task& task, const NodeProfile& device,
                            const NodeProfile& edge, double rate_bps);

// Offload to the cloud: the wireless hop is shared by `concurrent_offloaders`
// simultaneous uploads, then the payload crosses the fiber backhaul.
TimeEnergy cloud_time_energy(const Task& task, const NodeProfile& device,
                             const NodeProfile& cloud, double rate_bps,
                             int concurrent_offloaders, const ChannelModel& channel);

// Scalar placement score: delay_weight * time + (1 - delay_weight) * energy.
// delay_weight in [0, 1]; 1 ranks by time alone, 0 by energy alone.
double classification_weight(double time_s, double energy_j, double delay_weight);

// Completion within both budgets (inclusive).
bool feasible(const Task& task, double time_s, double energy_j);

} // namespace cloudedge

#endif
