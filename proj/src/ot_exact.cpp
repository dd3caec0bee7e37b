#include "cloudedge/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cloudedge {

namespace {

bool is_uniform(const std::vector<double>& w) {
    const double expect = 1.0 / static_cast<double>(w.size());
    for (double v : w)
        if (std::abs(v - expect) > 1e-12) return false;
    return true;
}

ExactResult from_coupling(Matrix coupling, const DiscreteMeasure& a,
                          const DiscreteMeasure& b, const CostMatrix& cost) {
    ExactResult result;
    result.plan.coupling = std::move(coupling);
    result.plan.iterations = 0;
    result.plan.converged = true;
    double row_err = 0.0;
    for (std::size_t i = 0; i < result.plan.coupling.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < result.plan.coupling.cols(); ++j)
            s += result.plan.coupling(i, j);
        row_err += std::abs(s - a.weights[i]);
    }
    double col_err = 0.0;
    for (std::size_t j = 0; j < result.plan.coupling.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < result.plan.coupling.rows(); ++i)
            s += result.plan.coupling(i, j);
        col_err += std::abs(s - b.weights[j]);
    }
    result.plan.marginal_error = std::max(row_err, col_err);
    result.cost = transport_cost(result.plan, cost);
    return result;
}

// Minimum over all scaled permutation matrices; valid for uniform square
// instances because the transportation polytope is then the Birkhoff polytope.
ExactResult solve_uniform_square(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                 const CostMatrix& cost) {
    const std::size_t n = a.weights.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::size_t> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += cost.entries(i, perm[i]);
        if (c < best_cost) {
            best_cost = c;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    Matrix coupling(n, n);
    const double mass = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) coupling(i, best[i]) = mass;
    return from_coupling(std::move(coupling), a, b, cost);
}

// North-west-corner fill under a fixed row/column ordering. Ties in the
// min() leave a zero allocation on the next step, so the resulting point in
// the polytope does not depend on which index advances first.
Matrix nw_corner(const std::vector<double>& a, const std::vector<double>& b,
                 const std::vector<std::size_t>& rperm,
                 const std::vector<std::size_t>& cperm) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    Matrix p(n, m);
    std::vector<double> ra(n), rb(m);
    for (std::size_t i = 0; i < n; ++i) ra[i] = a[rperm[i]];
    for (std::size_t j = 0; j < m; ++j) rb[j] = b[cperm[j]];
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        const double move = std::min(ra[i], rb[j]);
        p(rperm[i], cperm[j]) += move;
        ra[i] -= move;
        rb[j] -= move;
        if (ra[i] <= rb[j])
            ++i;
        else
            ++j;
    }
    return p;
}

// Every vertex of the transportation polytope is the north-west-corner
// solution for some pair of orderings, so scanning all pairs finds the
// optimal basic solution of the linear program.
ExactResult solve_general(const DiscreteMeasure& a, const DiscreteMeasure& b,
                          const CostMatrix& cost) {
    const std::size_t n = a.weights.size();
    const std::size_t m = b.weights.size();
    std::vector<std::size_t> rperm(n), cperm(m);
    std::iota(rperm.begin(), rperm.end(), 0);
    Matrix best;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        std::iota(cperm.begin(), cperm.end(), 0);
        do {
            Matrix p = nw_corner(a.weights, b.weights, rperm, cperm);
            double c = 0.0;
            for (std::size_t k = 0; k < p.data().size(); ++k)
                c += p.data()[k] * cost.entries.data()[k];
            if (c < best_cost) {
                best_cost = c;
                best = std::move(p);
            }
        } while (std::next_permutation(cperm.begin(), cperm.end()));
    } while (std::next_permutation(rperm.begin(), rperm.end()));
    return from_coupling(std::move(best), a, b, cost);
}

} // namespace

ExactResult exact_ot_small(const DiscreteMeasure& a, const DiscreteMeasure& b,
                           const CostMatrix& cost) {
    a.validate();
    b.validate();
    cost.validate();
    const std::size_t n = a.weights.size();
    const std::size_t m = b.weights.size();
    if (cost.entries.rows() != n || cost.entries.cols() != m)
        throw misuse_error("exact_ot_small: cost matrix shape does not match the measures");
    if (n > 8 || m > 8)
        throw misuse_error("exact_ot_small: instance too large for exhaustive search");
    if (n == m && is_uniform(a.weights) && is_uniform(b.weights))
        return solve_uniform_square(a, b, cost);
    if (n > 6 || m > 6)
        throw misuse_error(
            "exact_ot_small: non-uniform instances supported only up to 6 per side");
    return solve_general(a, b, cost);
}

} // namespace cloudedge
