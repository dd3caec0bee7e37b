#include "cloudedge/model.hpp"

#include <cmath>
#include <string>

namespace cloudedge {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw misuse_error(what);
}

void require_class(const NodeProfile& node, NodeClass cls, const char* what) {
    require(node.node_class == cls, what);
}

} // namespace

double transmission_rate(const ChannelModel& channel, int device,
                         const std::vector<int>& interferers) {
    const int n = static_cast<int>(channel.channel_gain.size());
    require(channel.bandwidth_hz > 0.0, "transmission_rate: bandwidth must be positive");
    require(channel.noise_power_w > 0.0, "transmission_rate: noise power must be positive");
    require(channel.tx_power_w.size() == channel.channel_gain.size(),
            "transmission_rate: tx power and gain tables must have equal length");
    require(device >= 0 && device < n, "transmission_rate: unknown device id");

    double interference = 0.0;
    for (int m : interferers) {
        require(m >= 0 && m < n, "transmission_rate: unknown interferer id");
        require(m != device, "transmission_rate: sender cannot interfere with itself");
        interference += channel.tx_power_w[m] * channel.channel_gain[m];
    }
    const double signal = channel.tx_power_w[device] * channel.channel_gain[device];
    return channel.bandwidth_hz * std::log2(1.0 + signal / (channel.noise_power_w + interference));
}

TimeEnergy local_time_energy(const Task& task, const NodeProfile& device) {
    require_class(device, NodeClass::Device, "local_time_energy: node is not a device");
    require(device.compute_capacity_hz > 0.0, "local_time_energy: capacity must be positive");
    require(task.data_size_kb >= 0, "local_time_energy: negative data size");

    TimeEnergy te;
    te.time_s = task_cycles(task, device) / device.compute_capacity_hz;
    te.energy_j = device.compute_power_w * te.time_s;
    return te;
}

TimeEnergy edge_time_energy(const Task& task, const NodeProfile& device,
                            const NodeProfile& edge, double rate_bps) {
    require_class(device, NodeClass::Device, "edge_time_energy: origin is not a device");
    require_class(edge, NodeClass::Edge, "edge_time_energy: target is not an edge");
    require(edge.compute_capacity_hz > 0.0, "edge_time_energy: capacity must be positive");
    require(rate_bps > 0.0, "edge_time_energy: rate must be positive");

    TimeEnergy te;
    te.time_s = task_cycles(task, edge) / edge.compute_capacity_hz + task_bits(task) / rate_bps;
    te.energy_j = device.upload_power_w * te.time_s;
    return te;
}

TimeEnergy cloud_time_energy(const Task& task, const NodeProfile& device,
                             const NodeProfile& cloud, double rate_bps,
                             int concurrent_offloaders, const ChannelModel& channel) {
    require_class(device, NodeClass::Device, "cloud_time_energy: origin is not a device");
    require_class(cloud, NodeClass::Cloud, "cloud_time_energy: target is not the cloud");
    require(cloud.compute_capacity_hz > 0.0, "cloud_time_energy: capacity must be positive");
    require(rate_bps > 0.0, "cloud_time_energy: rate must be positive");
    require(concurrent_offloaders >= 1, "cloud_time_energy: offloader count must be >= 1");
    require(channel.fiber_rate_bps > 0.0, "cloud_time_energy: fiber rate must be positive");
    require(channel.fiber_latency_s >= 0.0, "cloud_time_energy: fiber latency must be nonnegative");

    const double bits = task_bits(task);
    const double uplink_s = bits / channel.fiber_rate_bps + channel.fiber_latency_s;
    TimeEnergy te;
    te.time_s = task_cycles(task, cloud) / cloud.compute_capacity_hz
              + (bits / rate_bps) * static_cast<double>(concurrent_offloaders)
              + uplink_s;
    te.energy_j = device.upload_power_w * te.time_s;
    return te;
}

double classification_weight(double time_s, double energy_j, double delay_weight) {
    require(delay_weight >= 0.0 && delay_weight <= 1.0,
            "classification_weight: delay weight must be in [0, 1]");
    return delay_weight * time_s + (1.0 - delay_weight) * energy_j;
}

bool feasible(const Task& task, double time_s, double energy_j) {
    return time_s <= task.deadline_s && energy_j <= task.energy_budget_j;
}

} // namespace cloudedge
