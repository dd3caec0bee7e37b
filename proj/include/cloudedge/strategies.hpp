#ifndef CLOUDEDGE_STRATEGIES_HPP
#define CLOUDEDGE_STRATEGIES_HPP

#include <string>
#include <vector>

#include "cloudedge/model.hpp"
#include "cloudedge/ot.hpp"
#include "cloudedge/rng.hpp"

namespace cloudedge {

// Per-slot decision policies. Each one maps a snapshot of the pending tasks
// and node queues to a placement; the simulator applies the placement and
// owns everything that happens afterwards.

struct NodeSlot {
    NodeProfile profile;
    double backlog_cycles = 0.0;
};

struct SlotSnapshot {
    std::vector<Task> pending_tasks;
    std::vector<NodeSlot> nodes;
    const ChannelModel* channel = nullptr;
    std::vector<double> wireless_rate_bps; // by device id, this slot's estimate
    int active_offloaders = 1;             // wireless sharing factor for the cloud hop
    double slot_length_s = 0.1;
};

// Node index into SlotSnapshot::nodes, one entry per pending task.
using Assignment = std::vector<int>;

// How the transport marginals treat node capacity.
//  CapacityBounded: nodes offer commit_fraction of a slot's free capacity and
//    a zero-cost slack source absorbs whatever the tasks do not need, so
//    capacity acts as an upper bound.
//  CapacityFill: node weights are free capacity, normalized, with no slack;
//    the plan then spreads task mass in proportion to capacity even when the
//    tasks would all fit on the cheapest node.
enum class OtMarginals { CapacityBounded, CapacityFill };

struct OtParams {
    double epsilon = 0.0; // <= 0 picks the scale from the cost matrix
    // Marginal accuracy for the plan. Decisions come from per-row argmax with
    // quota bookkeeping, which is insensitive to marginal slack far below the
    // smallest task weight, so decision-grade accuracy is much looser than
    // solver-bench accuracy.
    double tolerance = 1e-4;
    int max_iterations = 10000;
    // Over-relaxation for the solver. Loaded slots produce instances with a
    // slow mode (slack mass draining off the contested nodes) that plain
    // Sinkhorn resolves only after thousands of sweeps; extrapolated updates
    // cut that several-fold and the solver's watchdog keeps the aggressive
    // setting safe on instances where it would oscillate.
    double relaxation = 1.6;
    double commit_fraction = 0.4;
    OtMarginals marginals = OtMarginals::CapacityBounded;
    // Optional warm start: column log scalings from an earlier solve over the
    // same node set (node prices drift slowly between slots). Ignored unless
    // the length matches the node count or any entry is non-finite.
    std::vector<double> warm_col_log_scaling;
};

struct OtDecision {
    Assignment assignment;
    int iterations = 0;
    bool fallback = false; // solver failed to converge; greedy answer returned
    double marginal_error = 0.0;
    // Column log scalings of this solve; feed into the next call's warm start.
    std::vector<double> col_log_scaling;
};

// Transport-based placement: demand-weighted task measure, capacity-weighted
// node measure, delay cost matrix, Sinkhorn, then rounding that respects the
// plan's per-node mass budget. Falls back to decide_greedy (delay-only) when
// the solver does not converge.
OtDecision decide_ot(const SlotSnapshot& snapshot, const OtParams& params = {});

// Tasks in order; each goes to the node with the smallest weighted time/energy
// score, seeing the backlog left by earlier placements in the same batch.
Assignment decide_greedy(const SlotSnapshot& snapshot, double gamma1);

// Everything to one class: Device = each task's origin, Edge = least-backlog
// edge at snapshot time (ties toward the lowest node index), Cloud = the cloud.
Assignment decide_fixed(const SlotSnapshot& snapshot, NodeClass target);

// Uniform choice among {origin device, every edge, the cloud} per task.
Assignment decide_random(const SlotSnapshot& snapshot, Rng& rng);

enum class StrategyKind { CloudEdge, Greedy, LocalOnly, EdgeOnly, CloudOnly, Random };

// Names accepted on the command line and written into result rows.
StrategyKind parse_strategy(const std::string& name); // config_error if unknown
const char* strategy_name(StrategyKind kind);
const std::vector<StrategyKind>& all_strategies();

} // namespace cloudedge

#endif
