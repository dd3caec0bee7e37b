#include "cloudedge/ot.hpp"

#include <algorithm>
#include <cmath>

namespace cloudedge {

namespace {

struct Priced {
    double delay = 0.0;
    bool feasible = false;
};

Priced price_placement(const Task& task, const NodeProfile& device,
                       const NodeProfile& node, const CostContext& ctx) {
    Priced out;
    TimeEnergy te;
    switch (node.node_class) {
    case NodeClass::Device:
        if (node.id != task.origin_device) return out; // foreign device, infeasible
        te = local_time_energy(task, node);
        break;
    case NodeClass::Edge:
        te = edge_time_energy(task, device, node, ctx.wireless_rate_bps[device.id]);
        break;
    case NodeClass::Cloud:
        te = cloud_time_energy(task, device, node, ctx.wireless_rate_bps[device.id],
                               ctx.concurrent_offloaders, *ctx.channel);
        break;
    }
    out.feasible = feasible(task, te.time_s, te.energy_j);
    out.delay = te.time_s;
    return out;
}

} // namespace

BuiltCosts build_cost_matrix(const std::vector<Task>& tasks,
                             const std::vector<NodeProfile>& nodes,
                             const CostContext& context) {
    if (tasks.empty() || nodes.empty())
        throw misuse_error("build_cost_matrix: empty task or node list");
    if (context.channel == nullptr)
        throw misuse_error("build_cost_matrix: missing channel model");
    if (context.backlog_cycles.size() != nodes.size())
        throw misuse_error("build_cost_matrix: backlog list does not match node list");

    std::vector<const NodeProfile*> device_by_id;
    for (const NodeProfile& n : nodes) {
        if (n.node_class != NodeClass::Device) continue;
        if (n.id >= static_cast<int>(device_by_id.size()))
            device_by_id.resize(static_cast<std::size_t>(n.id) + 1, nullptr);
        device_by_id[static_cast<std::size_t>(n.id)] = &n;
    }

    BuiltCosts out;
    out.cost.entries = Matrix(tasks.size(), nodes.size());
    Matrix& c = out.cost.entries;
    std::vector<char> ok(tasks.size() * nodes.size(), 0);

    double max_feasible = 0.0;
    double max_any = 0.0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const Task& task = tasks[i];
        if (task.origin_device < 0 ||
            task.origin_device >= static_cast<int>(device_by_id.size()) ||
            device_by_id[static_cast<std::size_t>(task.origin_device)] == nullptr)
            throw misuse_error("build_cost_matrix: task origin device not in node list");
        const NodeProfile& device = *device_by_id[static_cast<std::size_t>(task.origin_device)];
        if (static_cast<std::size_t>(device.id) >= context.wireless_rate_bps.size())
            throw misuse_error("build_cost_matrix: no wireless rate for device");
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const Priced p = price_placement(task, device, nodes[j], context);
            const double backlog_s =
                context.backlog_cycles[j] / nodes[j].compute_capacity_hz;
            const double entry = p.delay + backlog_s;
            c(i, j) = entry;
            ok[i * nodes.size() + j] = p.feasible ? 1 : 0;
            max_any = std::max(max_any, entry);
            if (p.feasible) {
                max_feasible = std::max(max_feasible, entry);
                ++out.feasible_entries;
            }
        }
    }

    // Infeasible placements keep a large finite price so exp(-C/eps) > 0.
    const double base = out.feasible_entries > 0 ? max_feasible : max_any;
    out.penalty = 10.0 * std::max(base, 1e-9);
    for (std::size_t i = 0; i < tasks.size(); ++i)
        for (std::size_t j = 0; j < nodes.size(); ++j)
            if (!ok[i * nodes.size() + j]) c(i, j) = out.penalty;
    return out;
}

} // namespace cloudedge
