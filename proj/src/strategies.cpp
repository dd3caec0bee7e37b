#include "cloudedge/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cloudedge {

namespace {

void validate_snapshot(const SlotSnapshot& s, bool needs_channel) {
    if (s.nodes.empty()) throw misuse_error("strategy: node list is empty");
    for (const NodeSlot& n : s.nodes)
        if (n.backlog_cycles < 0.0) throw misuse_error("strategy: negative backlog");
    if (needs_channel && s.channel == nullptr)
        throw misuse_error("strategy: snapshot carries no channel model");
    if (!(s.slot_length_s > 0.0))
        throw misuse_error("strategy: slot length must be positive");
}

// node index per device id, -1 where absent
std::vector<int> device_index_by_id(const SlotSnapshot& s) {
    std::vector<int> map;
    for (std::size_t idx = 0; idx < s.nodes.size(); ++idx) {
        const NodeProfile& p = s.nodes[idx].profile;
        if (p.node_class != NodeClass::Device) continue;
        if (p.id >= static_cast<int>(map.size()))
            map.resize(static_cast<std::size_t>(p.id) + 1, -1);
        map[static_cast<std::size_t>(p.id)] = static_cast<int>(idx);
    }
    return map;
}

int origin_index(const std::vector<int>& map, const Task& t) {
    if (t.origin_device < 0 || t.origin_device >= static_cast<int>(map.size()))
        return -1;
    return map[static_cast<std::size_t>(t.origin_device)];
}

double rate_for(const SlotSnapshot& s, int device_id) {
    if (device_id < 0 || static_cast<std::size_t>(device_id) >= s.wireless_rate_bps.size())
        throw misuse_error("strategy: no wireless rate for device");
    return s.wireless_rate_bps[static_cast<std::size_t>(device_id)];
}

TimeEnergy price(const SlotSnapshot& s, const Task& t, const NodeProfile& device,
                 const NodeProfile& node) {
    switch (node.node_class) {
    case NodeClass::Device:
        return local_time_energy(t, node);
    case NodeClass::Edge:
        return edge_time_energy(t, device, node, rate_for(s, t.origin_device));
    case NodeClass::Cloud:
        break;
    }
    return cloud_time_energy(t, device, node, rate_for(s, t.origin_device),
                             s.active_offloaders, *s.channel);
}

} // namespace

Assignment decide_greedy(const SlotSnapshot& snapshot, double gamma1) {
    validate_snapshot(snapshot, true);
    const std::vector<int> dev_index = device_index_by_id(snapshot);

    std::vector<double> backlog(snapshot.nodes.size());
    for (std::size_t j = 0; j < snapshot.nodes.size(); ++j)
        backlog[j] = snapshot.nodes[j].backlog_cycles;

    Assignment out(snapshot.pending_tasks.size(), -1);
    for (std::size_t ti = 0; ti < snapshot.pending_tasks.size(); ++ti) {
        const Task& t = snapshot.pending_tasks[ti];
        const int origin = origin_index(dev_index, t);
        if (origin < 0)
            throw misuse_error("decide_greedy: task origin device not in node list");
        const NodeProfile& device = snapshot.nodes[static_cast<std::size_t>(origin)].profile;

        double best = std::numeric_limits<double>::infinity();
        int best_j = -1;
        for (std::size_t j = 0; j < snapshot.nodes.size(); ++j) {
            const NodeProfile& node = snapshot.nodes[j].profile;
            if (node.node_class == NodeClass::Device && node.id != t.origin_device)
                continue;
            const TimeEnergy te = price(snapshot, t, device, node);
            const double wait = backlog[j] / node.compute_capacity_hz;
            const double score = classification_weight(te.time_s + wait, te.energy_j, gamma1);
            if (score < best) {
                best = score;
                best_j = static_cast<int>(j);
            }
        }
        out[ti] = best_j;
        backlog[static_cast<std::size_t>(best_j)] +=
            task_cycles(t, snapshot.nodes[static_cast<std::size_t>(best_j)].profile);
    }
    return out;
}

Assignment decide_fixed(const SlotSnapshot& snapshot, NodeClass target) {
    validate_snapshot(snapshot, false);
    Assignment out(snapshot.pending_tasks.size(), -1);

    if (target == NodeClass::Device) {
        const std::vector<int> dev_index = device_index_by_id(snapshot);
        for (std::size_t ti = 0; ti < snapshot.pending_tasks.size(); ++ti) {
            const int origin = origin_index(dev_index, snapshot.pending_tasks[ti]);
            if (origin < 0)
                throw config_error("local placement: task origin device not in node list");
            out[ti] = origin;
        }
        return out;
    }

    // One shared target for the whole batch, chosen from the snapshot state.
    int chosen = -1;
    for (std::size_t j = 0; j < snapshot.nodes.size(); ++j) {
        const NodeSlot& n = snapshot.nodes[j];
        if (n.profile.node_class != target) continue;
        if (chosen < 0) {
            chosen = static_cast<int>(j);
            continue;
        }
        const NodeSlot& cur = snapshot.nodes[static_cast<std::size_t>(chosen)];
        if (n.backlog_cycles < cur.backlog_cycles ||
            (n.backlog_cycles == cur.backlog_cycles && n.profile.id < cur.profile.id))
            chosen = static_cast<int>(j);
    }
    if (chosen < 0)
        throw config_error("fixed placement: no node of the requested class");
    std::fill(out.begin(), out.end(), chosen);
    return out;
}

Assignment decide_random(const SlotSnapshot& snapshot, Rng& rng) {
    validate_snapshot(snapshot, false);
    const std::vector<int> dev_index = device_index_by_id(snapshot);

    std::vector<int> shared; // edges then cloud, in node-list order
    for (std::size_t j = 0; j < snapshot.nodes.size(); ++j)
        if (snapshot.nodes[j].profile.node_class == NodeClass::Edge)
            shared.push_back(static_cast<int>(j));
    for (std::size_t j = 0; j < snapshot.nodes.size(); ++j)
        if (snapshot.nodes[j].profile.node_class == NodeClass::Cloud)
            shared.push_back(static_cast<int>(j));

    Assignment out(snapshot.pending_tasks.size(), -1);
    for (std::size_t ti = 0; ti < snapshot.pending_tasks.size(); ++ti) {
        const int origin = origin_index(dev_index, snapshot.pending_tasks[ti]);
        if (origin < 0)
            throw config_error("random placement: task origin device not in node list");
        const int pick = rng.next_int(0, static_cast<int>(shared.size()));
        out[ti] = pick == 0 ? origin : shared[static_cast<std::size_t>(pick - 1)];
    }
    return out;
}

OtDecision decide_ot(const SlotSnapshot& snapshot, const OtParams& params) {
    validate_snapshot(snapshot, true);
    OtDecision out;
    const std::size_t n = snapshot.pending_tasks.size();
    const std::size_t m = snapshot.nodes.size();
    if (n == 0) return out;
    if (!(params.commit_fraction > 0.0) || params.commit_fraction > 1.0)
        throw misuse_error("decide_ot: commit_fraction must be in (0, 1]");

    std::vector<NodeProfile> profiles;
    profiles.reserve(m);
    CostContext ctx;
    ctx.channel = snapshot.channel;
    ctx.wireless_rate_bps = snapshot.wireless_rate_bps;
    ctx.concurrent_offloaders = snapshot.active_offloaders;
    for (const NodeSlot& node : snapshot.nodes) {
        profiles.push_back(node.profile);
        ctx.backlog_cycles.push_back(node.backlog_cycles);
    }
    const BuiltCosts built = build_cost_matrix(snapshot.pending_tasks, profiles, ctx);

    const bool bounded = params.marginals == OtMarginals::CapacityBounded;
    const std::vector<int> dev_index = device_index_by_id(snapshot);

    std::vector<double> demand(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Task& t = snapshot.pending_tasks[i];
        if (bounded) {
            demand[i] = task_bits(t);
        } else {
            const int origin = origin_index(dev_index, t);
            if (origin < 0)
                throw misuse_error("decide_ot: task origin device not in node list");
            demand[i] =
                task_cycles(t, snapshot.nodes[static_cast<std::size_t>(origin)].profile);
        }
    }

    const double frac = bounded ? params.commit_fraction : 1.0;
    std::vector<double> capacity(m);
    for (std::size_t j = 0; j < m; ++j) {
        const NodeSlot& node = snapshot.nodes[j];
        const double free_cycles = std::max(
            frac * node.profile.compute_capacity_hz * snapshot.slot_length_s -
                node.backlog_cycles,
            0.0);
        const double weight =
            bounded ? free_cycles / node.profile.cycles_per_bit : free_cycles;
        capacity[j] = std::max(weight, 1e-9);
    }

    const double total_demand = std::accumulate(demand.begin(), demand.end(), 0.0);
    const double total_capacity = std::accumulate(capacity.begin(), capacity.end(), 0.0);
    const bool slack = bounded && total_demand < total_capacity;

    CostMatrix solve_cost = built.cost;
    std::vector<double> a_weights = demand;
    if (slack) {
        // Phantom source with zero cost everywhere; it soaks up the capacity
        // the real tasks leave unused, turning column mass into an upper bound.
        Matrix with_slack(n + 1, m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
                with_slack(i, j) = solve_cost.entries(i, j);
        solve_cost.entries = std::move(with_slack);
        a_weights.push_back(total_capacity - total_demand);
    }

    SinkhornParams sp;
    sp.epsilon =
        params.epsilon > 0.0 ? params.epsilon : auto_epsilon(built.cost, built.penalty);
    sp.tolerance = params.tolerance;
    sp.max_iterations = params.max_iterations;
    sp.relaxation = params.relaxation;
    if (params.warm_col_log_scaling.size() == m) {
        // Re-center before exponentiating so the init stays positive and
        // finite; a clamped start is still far closer than all-ones.
        bool usable = true;
        double shift = 0.0;
        for (double v : params.warm_col_log_scaling) {
            if (!std::isfinite(v)) usable = false;
            shift += v;
        }
        if (usable) {
            shift /= static_cast<double>(m);
            sp.init_col_scaling.resize(m);
            for (std::size_t j = 0; j < m; ++j)
                sp.init_col_scaling[j] = std::exp(
                    std::clamp(params.warm_col_log_scaling[j] - shift, -600.0, 600.0));
        }
    }

    const DiscreteMeasure a = DiscreteMeasure::normalized(std::move(a_weights));
    const DiscreteMeasure b = DiscreteMeasure::normalized(std::move(capacity));
    const TransportPlan plan = sinkhorn(a, b, solve_cost, sp);
    out.iterations = plan.iterations;
    out.marginal_error = plan.marginal_error;
    out.col_log_scaling = plan.col_log_scaling;
    if (!plan.converged) {
        out.fallback = true;
        out.assignment = decide_greedy(snapshot, 1.0);
        return out;
    }

    // Harden the coupling, spending each node's planned mass as a soft quota
    // so a batch of near-identical rows does not pile onto one node.
    std::vector<double> quota(m, 0.0);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i) quota[j] += plan.coupling(i, j);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return demand[x] > demand[y]; });

    out.assignment.assign(n, -1);
    for (std::size_t i : order) {
        const double mass = a.weights[i];
        double best = 0.0;
        int best_j = -1;
        for (std::size_t j = 0; j < m; ++j) {
            const double score =
                plan.coupling(i, j) * std::min(1.0, quota[j] / mass);
            if (score > best) {
                best = score;
                best_j = static_cast<int>(j);
            }
        }
        if (best_j < 0) {
            // Quota exhausted everywhere or the row underflowed; fall back to
            // the plain plan argmax, then to the cheapest column.
            double best_p = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                if (plan.coupling(i, j) > best_p) {
                    best_p = plan.coupling(i, j);
                    best_j = static_cast<int>(j);
                }
            }
        }
        if (best_j < 0) {
            double best_c = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < m; ++j) {
                if (built.cost.entries(i, j) < best_c) {
                    best_c = built.cost.entries(i, j);
                    best_j = static_cast<int>(j);
                }
            }
        }
        out.assignment[i] = best_j;
        quota[static_cast<std::size_t>(best_j)] =
            std::max(0.0, quota[static_cast<std::size_t>(best_j)] - mass);
    }
    return out;
}

StrategyKind parse_strategy(const std::string& name) {
    for (StrategyKind k : all_strategies())
        if (name == strategy_name(k)) return k;
    throw config_error("unknown strategy: " + name);
}

const char* strategy_name(StrategyKind kind) {
    switch (kind) {
    case StrategyKind::CloudEdge: return "cloud-edge";
    case StrategyKind::Greedy: return "greedy";
    case StrategyKind::LocalOnly: return "local";
    case StrategyKind::EdgeOnly: return "edge";
    case StrategyKind::CloudOnly: return "cloud";
    case StrategyKind::Random: return "random";
    }
    throw misuse_error("strategy_name: bad kind");
}

const std::vector<StrategyKind>& all_strategies() {
    static const std::vector<StrategyKind> kinds = {
        StrategyKind::CloudEdge, StrategyKind::Greedy,   StrategyKind::LocalOnly,
        StrategyKind::EdgeOnly,  StrategyKind::CloudOnly, StrategyKind::Random};
    return kinds;
}

} // namespace cloudedge
