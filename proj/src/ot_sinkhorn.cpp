#include "cloudedge/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cloudedge {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void validate_inputs(const DiscreteMeasure& a, const DiscreteMeasure& b,
                     const CostMatrix& cost, const SinkhornParams& params) {
    a.validate();
    b.validate();
    cost.validate();
    if (cost.entries.rows() != a.weights.size() || cost.entries.cols() != b.weights.size())
        throw misuse_error("sinkhorn: cost matrix shape does not match the measures");
    if (!(params.epsilon > 0.0))
        throw misuse_error("sinkhorn: epsilon must be positive");
    if (!(params.tolerance > 0.0))
        throw misuse_error("sinkhorn: tolerance must be positive");
    if (params.max_iterations < 1)
        throw misuse_error("sinkhorn: max_iterations must be at least 1");
    if (!(params.relaxation >= 1.0) || params.relaxation >= 2.0)
        throw misuse_error("sinkhorn: relaxation must be in [1, 2)");
    for (const auto* init : {&params.init_row_scaling, &params.init_col_scaling}) {
        if (!init->empty()) {
            const std::size_t want =
                init == &params.init_row_scaling ? a.weights.size() : b.weights.size();
            if (init->size() != want)
                throw misuse_error("sinkhorn: scaling initialization has the wrong length");
            for (double v : *init)
                if (!(v > 0.0) || !std::isfinite(v))
                    throw misuse_error("sinkhorn: scaling initialization must be positive");
        }
    }
}

std::vector<double> log_weights(const std::vector<double>& w) {
    std::vector<double> lw(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        lw[i] = w[i] > 0.0 ? std::log(w[i]) : kNegInf;
    return lw;
}

// log(sum(exp(x))) over `count` strided values; -inf when every term is -inf.
double logsumexp(const double* x, std::size_t count, std::size_t stride) {
    double mx = kNegInf;
    for (std::size_t k = 0; k < count; ++k) mx = std::max(mx, x[k * stride]);
    if (mx == kNegInf) return kNegInf;
    double s = 0.0;
    for (std::size_t k = 0; k < count; ++k) s += std::exp(x[k * stride] - mx);
    return mx + std::log(s);
}

// Exact convergence measure of the current potentials: max of the two L1
// marginal gaps of exp(alpha_i + beta_j - cdiv_ij), summed in the same order
// as materialize() so the in-loop decision and the reported plan agree
// bitwise. With plain updates the column gap is zero by construction, but
// over-relaxed updates leave residue on both sides, so termination has to
// look at the full picture.
double exact_marginal_error(const Matrix& cdiv, const std::vector<double>& alpha,
                            const std::vector<double>& beta,
                            const DiscreteMeasure& a, const DiscreteMeasure& b) {
    const std::size_t n = cdiv.rows();
    const std::size_t m = cdiv.cols();
    double row_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* crow = cdiv.row(i);
        double sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) sum += std::exp(alpha[i] + beta[j] - crow[j]);
        row_err += std::abs(sum - a.weights[i]);
    }
    double col_err = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += std::exp(alpha[i] + beta[j] - cdiv(i, j));
        col_err += std::abs(sum - b.weights[j]);
    }
    return std::max(row_err, col_err);
}

// Shared final assembly: P = exp(alpha_i + beta_j - C_ij / eps), plus the
// exact L1 marginal gaps of that matrix.
void materialize(const Matrix& cdiv, const std::vector<double>& alpha,
                 const std::vector<double>& beta, const DiscreteMeasure& a,
                 const DiscreteMeasure& b, TransportPlan& out) {
    const std::size_t n = cdiv.rows();
    const std::size_t m = cdiv.cols();
    out.coupling = Matrix(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        const double* crow = cdiv.row(i);
        double* prow = out.coupling.row(i);
        for (std::size_t j = 0; j < m; ++j)
            prow[j] = std::exp(alpha[i] + beta[j] - crow[j]);
    }
    double row_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* prow = out.coupling.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += prow[j];
        row_err += std::abs(s - a.weights[i]);
    }
    double col_err = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += out.coupling(i, j);
        col_err += std::abs(s - b.weights[j]);
    }
    out.marginal_error = std::max(row_err, col_err);

    out.row_scaling.resize(n);
    out.col_scaling.resize(m);
    for (std::size_t i = 0; i < n; ++i) out.row_scaling[i] = std::exp(alpha[i]);
    for (std::size_t j = 0; j < m; ++j) out.col_scaling[j] = std::exp(beta[j]);
    out.row_log_scaling = alpha;
    out.col_log_scaling = beta;
}

// Potentials are carried divided by epsilon: alpha = log(u), beta = log(v).
void init_potentials(const SinkhornParams& params, std::size_t n, std::size_t m,
                     std::vector<double>& alpha, std::vector<double>& beta) {
    alpha.assign(n, 0.0);
    beta.assign(m, 0.0);
    if (!params.init_row_scaling.empty())
        for (std::size_t i = 0; i < n; ++i) alpha[i] = std::log(params.init_row_scaling[i]);
    if (!params.init_col_scaling.empty())
        for (std::size_t j = 0; j < m; ++j) beta[j] = std::log(params.init_col_scaling[j]);
}

// Watchdog for over-relaxed runs, shared by both solver variants so their
// decisions stay in lockstep. Every 64 iterations the row error is compared
// against the best value seen so far; two checkpoints in a row without real
// improvement mean the relaxation factor has the iteration oscillating, so it
// decays toward the always-convergent plain update. Over-relaxed error decay
// is not monotone, which is why a single stalled window is forgiven. A
// non-finite error additionally asks the caller to restart from the initial
// potentials.
struct RelaxationGuard {
    double theta;
    double best = std::numeric_limits<double>::infinity();
    int stall = 0;
    int next_check = 64;

    explicit RelaxationGuard(double t) : theta(t) {}

    bool needs_reset(int iterations, double row_err) {
        if (iterations < next_check) return false;
        next_check = iterations + 64;
        if (!std::isfinite(row_err)) {
            theta = 1.0;
            best = std::numeric_limits<double>::infinity();
            stall = 0;
            return true;
        }
        if (row_err < 0.98 * best) {
            stall = 0;
        } else if (++stall >= 2) {
            theta = 1.0 + 0.5 * (theta - 1.0);
            if (theta < 1.05) theta = 1.0;
            stall = 0;
        }
        if (row_err < best) best = row_err;
        return false;
    }
};

} // namespace

TransportPlan sinkhorn(const DiscreteMeasure& a, const DiscreteMeasure& b,
                       const CostMatrix& cost, const SinkhornParams& params) {
    validate_inputs(a, b, cost, params);
    const std::size_t n = a.weights.size();
    const std::size_t m = b.weights.size();
    const double inv_eps = 1.0 / params.epsilon;

    Matrix cdiv(n, m);
    for (std::size_t k = 0; k < cdiv.data().size(); ++k)
        cdiv.data()[k] = cost.entries.data()[k] * inv_eps;

    const std::vector<double> loga = log_weights(a.weights);
    const std::vector<double> logb = log_weights(b.weights);

    std::vector<double> alpha, beta;
    init_potentials(params, n, m, alpha, beta);

    // Row pass: s_i = LSE_j(beta_j - cdiv_ij). Doubles as the row-marginal
    // probe, since the row sum of the current plan is exp(alpha_i + s_i).
    std::vector<double> s(n);
    std::vector<double> t(m);

    auto row_pass = [&]() {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
            const std::size_t i = static_cast<std::size_t>(ii);
            const double* crow = cdiv.row(i);
            double mx = kNegInf;
            for (std::size_t j = 0; j < m; ++j) mx = std::max(mx, beta[j] - crow[j]);
            if (mx == kNegInf) {
                s[i] = kNegInf;
                continue;
            }
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) acc += std::exp(beta[j] - crow[j] - mx);
            s[i] = mx + std::log(acc);
        }
    };
    auto col_pass = [&]() {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(m); ++jj) {
            const std::size_t j = static_cast<std::size_t>(jj);
            double mx = kNegInf;
            for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, alpha[i] - cdiv(i, j));
            if (mx == kNegInf) {
                t[j] = kNegInf;
                continue;
            }
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += std::exp(alpha[i] - cdiv(i, j) - mx);
            t[j] = mx + std::log(acc);
        }
    };

    const bool relaxed_run = params.relaxation != 1.0;
    TransportPlan plan;
    RelaxationGuard guard(params.relaxation);
    row_pass();
    while (true) {
        if (plan.iterations > 0) {
            double row_err = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double e = alpha[i] + s[i];
                const double sum = e == kNegInf ? 0.0 : std::exp(e);
                row_err += std::abs(sum - a.weights[i]);
            }
            // Plain updates satisfy the column marginals exactly, so the row
            // probe alone decides. Relaxed updates leave residue on both
            // sides; confirm with the full (more expensive) measure before
            // stopping. The guard sees the exact measure too, so both solver
            // variants make identical decisions.
            if (row_err <= params.tolerance &&
                (!relaxed_run ||
                 exact_marginal_error(cdiv, alpha, beta, a, b) <= params.tolerance))
                break;
            if (relaxed_run && plan.iterations == guard.next_check &&
                guard.needs_reset(plan.iterations,
                                  exact_marginal_error(cdiv, alpha, beta, a, b))) {
                init_potentials(params, n, m, alpha, beta);
                row_pass();
            }
        }
        if (plan.iterations >= params.max_iterations) break;
        if (guard.theta == 1.0) {
            for (std::size_t i = 0; i < n; ++i) alpha[i] = loga[i] - s[i];
        } else {
            for (std::size_t i = 0; i < n; ++i)
                alpha[i] = (1.0 - guard.theta) * alpha[i] + guard.theta * (loga[i] - s[i]);
        }
        col_pass();
        if (guard.theta == 1.0) {
            for (std::size_t j = 0; j < m; ++j) beta[j] = logb[j] - t[j];
        } else {
            for (std::size_t j = 0; j < m; ++j)
                beta[j] = (1.0 - guard.theta) * beta[j] + guard.theta * (logb[j] - t[j]);
        }
        ++plan.iterations;
        row_pass();
    }

    materialize(cdiv, alpha, beta, a, b, plan);
    plan.converged = plan.marginal_error <= params.tolerance;
    return plan;
}

TransportPlan sinkhorn_reference(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                 const CostMatrix& cost, const SinkhornParams& params) {
    validate_inputs(a, b, cost, params);
    const std::size_t n = a.weights.size();
    const std::size_t m = b.weights.size();
    const double inv_eps = 1.0 / params.epsilon;

    Matrix cdiv(n, m);
    for (std::size_t k = 0; k < cdiv.data().size(); ++k)
        cdiv.data()[k] = cost.entries.data()[k] * inv_eps;

    const std::vector<double> loga = log_weights(a.weights);
    const std::vector<double> logb = log_weights(b.weights);

    std::vector<double> alpha, beta;
    init_potentials(params, n, m, alpha, beta);

    std::vector<double> row_terms(m), col_terms(n);
    const bool relaxed_run = params.relaxation != 1.0;
    TransportPlan plan;
    RelaxationGuard guard(params.relaxation);
    while (plan.iterations < params.max_iterations) {
        if (guard.theta == 1.0) {
            for (std::size_t i = 0; i < n; ++i) {
                const double* crow = cdiv.row(i);
                for (std::size_t j = 0; j < m; ++j) row_terms[j] = beta[j] - crow[j];
                alpha[i] = loga[i] - logsumexp(row_terms.data(), m, 1);
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                const double* crow = cdiv.row(i);
                for (std::size_t j = 0; j < m; ++j) row_terms[j] = beta[j] - crow[j];
                alpha[i] = (1.0 - guard.theta) * alpha[i] +
                           guard.theta * (loga[i] - logsumexp(row_terms.data(), m, 1));
            }
        }
        if (guard.theta == 1.0) {
            for (std::size_t j = 0; j < m; ++j) {
                for (std::size_t i = 0; i < n; ++i) col_terms[i] = alpha[i] - cdiv(i, j);
                beta[j] = logb[j] - logsumexp(col_terms.data(), n, 1);
            }
        } else {
            for (std::size_t j = 0; j < m; ++j) {
                for (std::size_t i = 0; i < n; ++i) col_terms[i] = alpha[i] - cdiv(i, j);
                beta[j] = (1.0 - guard.theta) * beta[j] +
                          guard.theta * (logb[j] - logsumexp(col_terms.data(), n, 1));
            }
        }
        ++plan.iterations;

        if (relaxed_run) {
            // Same two-sided convergence measure and guard feed as the
            // production kernel, so the two variants stay in lockstep.
            const double err = exact_marginal_error(cdiv, alpha, beta, a, b);
            if (err <= params.tolerance) break;
            if (guard.needs_reset(plan.iterations, err))
                init_potentials(params, n, m, alpha, beta);
            continue;
        }

        // Full marginal check on the materialized plan each sweep.
        double row_err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* crow = cdiv.row(i);
            double sum = 0.0;
            for (std::size_t j = 0; j < m; ++j) sum += std::exp(alpha[i] + beta[j] - crow[j]);
            row_err += std::abs(sum - a.weights[i]);
        }
        if (row_err <= params.tolerance) break;
    }

    materialize(cdiv, alpha, beta, a, b, plan);
    plan.converged = plan.marginal_error <= params.tolerance;
    return plan;
}

double transport_cost(const TransportPlan& plan, const CostMatrix& cost) {
    if (!plan.coupling.same_shape(cost.entries))
        throw misuse_error("transport_cost: plan and cost matrix shapes differ");
    double total = 0.0;
    for (std::size_t k = 0; k < cost.entries.data().size(); ++k)
        total += plan.coupling.data()[k] * cost.entries.data()[k];
    return total;
}

double auto_epsilon(const CostMatrix& cost, double exclude_above) {
    cost.validate();
    std::vector<double> vals;
    vals.reserve(cost.entries.data().size());
    for (double v : cost.entries.data())
        if (exclude_above < 0.0 || v < exclude_above) vals.push_back(v);
    if (vals.empty())
        for (double v : cost.entries.data()) vals.push_back(v);
    std::sort(vals.begin(), vals.end());
    const double median = vals[vals.size() / 2];
    // One fifth of the median keeps the plan sharp enough that per-row argmax
    // rounding matches the unregularized choice, while staying well away from
    // the small-epsilon regime where the iteration stops contracting.
    // Degenerate all-zero costs still need a usable scale.
    return median > 0.0 ? 0.2 * median : 1e-6;
}

void DiscreteMeasure::validate() const {
    if (weights.empty()) throw misuse_error("measure: no weights");
    double sum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0)
            throw misuse_error("measure: weights must be finite and nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw misuse_error("measure: weights must sum to 1");
}

DiscreteMeasure DiscreteMeasure::uniform(std::size_t n) {
    if (n == 0) throw misuse_error("measure: size must be positive");
    DiscreteMeasure m;
    m.weights.assign(n, 1.0 / static_cast<double>(n));
    return m;
}

DiscreteMeasure DiscreteMeasure::normalized(std::vector<double> w) {
    double sum = 0.0;
    for (double v : w) {
        if (!std::isfinite(v) || v < 0.0)
            throw misuse_error("measure: weights must be finite and nonnegative");
        sum += v;
    }
    if (sum <= 0.0) throw misuse_error("measure: total mass must be positive");
    for (double& v : w) v /= sum;
    DiscreteMeasure m;
    m.weights = std::move(w);
    return m;
}

void CostMatrix::validate() const {
    if (entries.rows() == 0 || entries.cols() == 0)
        throw misuse_error("cost matrix: empty");
    for (double v : entries.data())
        if (!std::isfinite(v) || v < 0.0)
            throw misuse_error("cost matrix: entries must be finite and nonnegative");
}

std::vector<int> round_to_assignment(const TransportPlan& plan) {
    const Matrix& p = plan.coupling;
    if (p.rows() == 0) return {};
    std::vector<int> choice(p.rows(), 0);
    for (std::size_t i = 0; i < p.rows(); ++i) {
        const double* row = p.row(i);
        double best = 0.0;
        int arg = -1;
        for (std::size_t j = 0; j < p.cols(); ++j) {
            if (row[j] > best) {
                best = row[j];
                arg = static_cast<int>(j);
            }
        }
        if (arg < 0)
            throw solver_error("round_to_assignment: row without positive mass");
        choice[i] = arg;
    }
    return choice;
}

} // namespace cloudedge
