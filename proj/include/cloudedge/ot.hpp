#ifndef CLOUDEDGE_OT_HPP
#define CLOUDEDGE_OT_HPP

#include <cstdint>
#include <vector>

#include "cloudedge/matrix.hpp"
#include "cloudedge/model.hpp"

namespace cloudedge {

// Entropic-regularized discrete optimal transport. The solver couples a source
// measure a (tasks / demand) with a target measure b (nodes / capacity) against
// a cost matrix C, by Sinkhorn scaling of the kernel exp(-C / epsilon). All
// iterations run in the log domain so small epsilon values stay stable.

struct DiscreteMeasure {
    std::vector<double> weights;

    static DiscreteMeasure uniform(std::size_t n);
    // Normalizes arbitrary nonnegative weights to total mass 1.
    static DiscreteMeasure normalized(std::vector<double> w);

    // Throws misuse_error unless weights are finite, nonnegative and sum to 1
    // within 1e-9.
    void validate() const;
};

struct CostMatrix {
    Matrix entries;

    void validate() const; // finite, nonnegative
};

struct TransportPlan {
    Matrix coupling;                  // P, row i = source, column j = target
    std::vector<double> row_scaling;  // u with P = diag(u) K diag(v)
    std::vector<double> col_scaling;  // v
    // log(u), log(v): finite even where the plain scalings over/underflow,
    // which makes them the safe currency for warm starts.
    std::vector<double> row_log_scaling;
    std::vector<double> col_log_scaling;
    int iterations = 0;
    double marginal_error = 0.0;      // max of the two L1 marginal gaps
    bool converged = false;
};

struct SinkhornParams {
    double epsilon = 0.0;   // entropic regularization, > 0
    double tolerance = 1e-6;
    int max_iterations = 10000;
    // Successive over-relaxation factor in [1, 2). 1 is the plain Sinkhorn
    // update; larger values extrapolate each potential step and can cut the
    // iteration count several-fold on instances with a slow linear mode. The
    // fixed point is the same for every value. When an over-relaxed run stops
    // making progress the solver decays the factor toward 1, so convergence
    // is never worse than a late plain restart.
    double relaxation = 1.0;
    // Optional warm starts for the scaling vectors; empty means all-ones.
    std::vector<double> init_row_scaling;
    std::vector<double> init_col_scaling;
};

// Production kernel: row/column updates parallelized with OpenMP. Results are
// identical to the reference run for any thread count because each row's
// reduction keeps a fixed evaluation order.
TransportPlan sinkhorn(const DiscreteMeasure& a, const DiscreteMeasure& b,
                       const CostMatrix& cost, const SinkhornParams& params);

// Plain serial implementation kept as the comparison baseline for tests and
// the kernel benchmark.
TransportPlan sinkhorn_reference(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                 const CostMatrix& cost, const SinkhornParams& params);

// Sum of C .* P.
double transport_cost(const TransportPlan& plan, const CostMatrix& cost);

/// Default regularization scale for a given cost matrix: a fixed fraction of
// the median entry. When some entries are infeasibility penalties, pass them
// in `exclude_above` so the median reflects only real placement costs.
double auto_epsilon(const CostMatrix& cost, double exclude_above = -1.0);

struct ExactResult {
    TransportPlan plan;
    double cost = 0.0;
};

// Exact minimizer for small instances (n, m <= 8), used as the test oracle.
// Uniform square instances are solved by enumerating permutations; everything
// else enumerates the vertices of the transportation polytope via the
// north-west-corner rule over all row/column orderings (cost grows as n!*m!).
ExactResult exact_ot_small(const DiscreteMeasure& a, const DiscreteMeasure& b,
                           const CostMatrix& cost);

/// Hardens a coupling into a per-row choice: argmax along each row, ties going
// to the lowest column index. A row without positive mass throws solver_error.
std::vector<int> round_to_assignment(const TransportPlan& plan);

// Inputs assembled once per decision epoch for pricing every (task, node)
// placement. Wireless rates are per device id; backlog is per node index,
// aligned with the node list handed to build_cost_matrix.
struct CostContext {
    const ChannelModel* channel = nullptr;
    std::vector<double> wireless_rate_bps;  // by device id
    std::vector<double> backlog_cycles;     // by node index
    int concurrent_offloaders = 1;          // sharing factor for the cloud hop
};

struct BuiltCosts {
    CostMatrix cost;
    double penalty = 0.0;      // value written into infeasible entries (0 if none)
    int feasible_entries = 0;
};

// Entry (i, j) = completion delay of task i on node j (model equations for the
// node's class) plus node j's queue backlog in seconds. Placements that are
// infeasible (deadline/energy, or a device column that is not the task's own
// device) are priced at 10x the largest feasible entry instead of infinity so
// the kernel exp(-C/eps) stays positive.
BuiltCosts build_cost_matrix(const std::vector<Task>& tasks,
                             const std::vector<NodeProfile>& nodes,
                             const CostContext& context);

} // namespace cloudedge

#endif
