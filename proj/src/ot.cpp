#include "otx/ot.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <utility>

#include "otx/kernels.hpp"

namespace otx {

namespace {

constexpr double kMarginalSumTol = 1e-9;

void check_marginals(const Matrix& cost, const std::vector<double>& a,
                     const std::vector<double>& b) {
    if (a.size() != cost.rows() || b.size() != cost.cols()) {
        throw ShapeMismatch("ot: marginal lengths do not match the cost matrix");
    }
    double sa = 0.0, sb = 0.0;
    for (double v : a) {
        if (!(v > 0.0)) throw InfeasibleMarginals("ot: row marginal entries must be positive");
        sa += v;
    }
    for (double v : b) {
        if (!(v > 0.0)) throw InfeasibleMarginals("ot: column marginal entries must be positive");
        sb += v;
    }
    if (std::abs(sa - 1.0) > kMarginalSumTol || std::abs(sb - 1.0) > kMarginalSumTol) {
        throw InfeasibleMarginals("ot: marginals must each sum to 1");
    }
    if (!cost.all_finite()) {
        throw NonFiniteCost("ot: cost matrix contains NaN or Inf");
    }
}

double measure_violation(const Matrix& plan, const std::vector<double>& a,
                         const std::vector<double>& b) {
    const std::size_t n = plan.rows(), k = plan.cols();
    double worst = 0.0;
    std::vector<double> col(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* pi = plan.row(i);
        double rs = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            rs += pi[j];
            col[j] += pi[j];
        }
        worst = std::max(worst, std::abs(rs - a[i]));
    }
    for (std::size_t j = 0; j < k; ++j) worst = std::max(worst, std::abs(col[j] - b[j]));
    return worst;
}

TransportPlan sinkhorn_log(const Matrix& cost, const std::vector<double>& a,
                           const std::vector<double>& b, const SinkhornConfig& cfg) {
    const std::size_t n = cost.rows(), k = cost.cols();
    std::vector<double> log_a(n), log_b(k);
    for (std::size_t i = 0; i < n; ++i) log_a[i] = std::log(a[i]);
    for (std::size_t j = 0; j < k; ++j) log_b[j] = std::log(b[j]);

    // The row update stays an exact projection, so row sums match a by
    // construction and the column residual is the convergence measure.
    // Column updates switch to overrelaxation when the plain alternating
    // projections converge slowly; the fixed point is unchanged and the
    // decay rate is bounded by omega - 1. The residual may oscillate
    // while engaged, so only a blow-up past the best residual seen since
    // engagement drops back to plain sweeps.
    constexpr int kRateWindow = 10;
    constexpr double kSlowRate = 0.9;
    constexpr double kOmegaEngaged = 1.9;
    double omega = 1.0;
    double history[kRateWindow];
    int history_len = 0;
    double engaged_floor = std::numeric_limits<double>::infinity();

    std::vector<double> f(n, 0.0), g(k, 0.0), lse(k), colsum(k);
    bool converged = false;
    int iterations = 0;
    double residual = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        kernels::sinkhorn_row_update(cost, cfg.gamma, log_a, g, f);
        kernels::sinkhorn_col_lse(cost, cfg.gamma, f, lse);
        residual = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            colsum[j] = std::exp(g[j] / cfg.gamma + lse[j]);
            residual = std::max(residual, std::abs(colsum[j] - b[j]));
        }
        iterations = iter;
        if (residual <= cfg.tolerance) {
            converged = true;
            break;
        }
        if (iter == cfg.max_iterations) break;

        if (omega > 1.0) {
            engaged_floor = std::min(engaged_floor, residual);
            if (residual > 100.0 * engaged_floor) {
                omega = 1.0;
                history_len = 0;
            }
        } else {
            if (history_len == kRateWindow) {
                std::copy(history + 1, history + kRateWindow, history);
                --history_len;
            }
            history[history_len++] = residual;
            if (history_len == kRateWindow) {
                double rate = std::pow(residual / history[0],
                                       1.0 / static_cast<double>(kRateWindow - 1));
                if (rate >= kSlowRate) {
                    omega = kOmegaEngaged;
                    engaged_floor = residual;
                }
            }
        }
        for (std::size_t j = 0; j < k; ++j) {
            g[j] = (1.0 - omega) * g[j] + omega * cfg.gamma * (log_b[j] - lse[j]);
        }
    }

    TransportPlan out;
    out.plan = Matrix(n, k);
    kernels::plan_from_potentials(cost, cfg.gamma, f, g, out.plan);
    out.row_marginal = a;
    out.col_marginal = b;
    out.regularization = cfg.gamma;
    out.iterations_used = iterations;
    out.marginal_violation = measure_violation(out.plan, a, b);
    out.converged = converged;
    return out;
}

TransportPlan sinkhorn_naive(const Matrix& cost, const std::vector<double>& a,
                             const std::vector<double>& b, const SinkhornConfig& cfg) {
    const std::size_t n = cost.rows(), k = cost.cols();
    Matrix kernel(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) kernel(i, j) = std::exp(-cost(i, j) / cfg.gamma);
    }
    std::vector<double> u(n, 1.0), v(k, 1.0), kv(n), ktu(k);
    bool converged = false;
    int iterations = 0;
    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        kernels::matvec(kernel, v, kv);
        for (std::size_t i = 0; i < n; ++i) u[i] = a[i] / kv[i];
        kernels::matvec_t(kernel, u, ktu);
        double residual = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            residual = std::max(residual, std::abs(ktu[j] * v[j] - b[j]));
        }
        iterations = iter;
        if (residual <= cfg.tolerance) {
            converged = true;
            break;
        }
        if (iter == cfg.max_iterations) break;
        for (std::size_t j = 0; j < k; ++j) v[j] = b[j] / ktu[j];
    }

    TransportPlan out;
    out.plan = Matrix(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) out.plan(i, j) = u[i] * kernel(i, j) * v[j];
    }
    out.row_marginal = a;
    out.col_marginal = b;
    out.regularization = cfg.gamma;
    out.iterations_used = iterations;
    out.marginal_violation = measure_violation(out.plan, a, b);
    out.converged = converged;
    return out;
}

}  // namespace

TransportPlan sinkhorn(const Matrix& cost, const std::vector<double>& a,
                       const std::vector<double>& b, const SinkhornConfig& cfg) {
    if (!(cfg.gamma > 0.0) || !(cfg.tolerance > 0.0) || cfg.max_iterations < 1) {
        throw Error("sinkhorn: gamma and tolerance must be positive, max_iterations >= 1");
    }
    check_marginals(cost, a, b);
    return cfg.stabilized ? sinkhorn_log(cost, a, b, cfg) : sinkhorn_naive(cost, a, b, cfg);
}

TransportPlan sinkhorn(const Matrix& cost, const std::vector<double>& a,
                       const ClassWeights& b, const SinkhornConfig& cfg) {
    if (b.weights.size() != cost.cols()) {
        throw ShapeMismatch("sinkhorn: class weights do not match cost matrix columns");
    }
    return sinkhorn(cost, a, b.weights, cfg);
}

// ---------------------------------------------------------------------------
// Transportation simplex.
//
// Nodes 0..n-1 are rows, n..n+m-1 are columns. The basis is a spanning tree
// of n+m-1 arcs. Supplies carry an epsilon perturbation (absorbed by the
// last demand) so every basic solution stays nondegenerate; the final flows
// are re-solved on the optimal tree with the exact marginals.
// ---------------------------------------------------------------------------

namespace {

struct Arc {
    int row;
    int col;
    double flow;
};

constexpr double kPerturb = 1e-11;
constexpr double kReducedCostTol = 1e-12;

// Flows on a spanning tree are uniquely determined by the marginals; peel
// leaves until every arc is assigned.
std::vector<double> solve_tree_flows(const std::vector<Arc>& arcs, int n, int m,
                                     const std::vector<double>& a,
                                     const std::vector<double>& b) {
    const int num_nodes = n + m;
    std::vector<std::vector<int>> inc(static_cast<std::size_t>(num_nodes));
    for (std::size_t e = 0; e < arcs.size(); ++e) {
        inc[static_cast<std::size_t>(arcs[e].row)].push_back(static_cast<int>(e));
        inc[static_cast<std::size_t>(n + arcs[e].col)].push_back(static_cast<int>(e));
    }
    std::vector<double> balance(static_cast<std::size_t>(num_nodes));
    for (int i = 0; i < n; ++i) balance[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)];
    for (int j = 0; j < m; ++j) balance[static_cast<std::size_t>(n + j)] = b[static_cast<std::size_t>(j)];

    std::vector<int> degree(static_cast<std::size_t>(num_nodes));
    std::vector<char> arc_done(arcs.size(), 0);
    std::queue<int> leaves;
    for (int v = 0; v < num_nodes; ++v) {
        degree[static_cast<std::size_t>(v)] = static_cast<int>(inc[static_cast<std::size_t>(v)].size());
        if (degree[static_cast<std::size_t>(v)] == 1) leaves.push(v);
    }
    std::vector<double> flow(arcs.size(), 0.0);
    while (!leaves.empty()) {
        int v = leaves.front();
        leaves.pop();
        int live = -1;
        for (int e : inc[static_cast<std::size_t>(v)]) {
            if (!arc_done[static_cast<std::size_t>(e)]) {
                live = e;
                break;
            }
        }
        if (live < 0) continue;  // root of the peeled tree
        const Arc& arc = arcs[static_cast<std::size_t>(live)];
        int other = (v == arc.row) ? n + arc.col : arc.row;
        flow[static_cast<std::size_t>(live)] = balance[static_cast<std::size_t>(v)];
        balance[static_cast<std::size_t>(other)] -= balance[static_cast<std::size_t>(v)];
        balance[static_cast<std::size_t>(v)] = 0.0;
        arc_done[static_cast<std::size_t>(live)] = 1;
        if (--degree[static_cast<std::size_t>(other)] == 1) leaves.push(other);
        degree[static_cast<std::size_t>(v)] = 0;
    }
    return flow;
}

std::vector<Arc> northwest_corner(const std::vector<double>& a, const std::vector<double>& b) {
    const int n = static_cast<int>(a.size()), m = static_cast<int>(b.size());
    std::vector<double> ra = a, rb = b;
    std::vector<Arc> arcs;
    arcs.reserve(static_cast<std::size_t>(n + m - 1));
    int i = 0, j = 0;
    while (true) {
        double t = std::min(ra[static_cast<std::size_t>(i)], rb[static_cast<std::size_t>(j)]);
        arcs.push_back({i, j, t});
        ra[static_cast<std::size_t>(i)] -= t;
        rb[static_cast<std::size_t>(j)] -= t;
        if (i == n - 1 && j == m - 1) break;
        bool advance_row;
        if (i == n - 1) advance_row = false;
        else if (j == m - 1) advance_row = true;
        else advance_row = ra[static_cast<std::size_t>(i)] <= rb[static_cast<std::size_t>(j)];
        if (advance_row) ++i; else ++j;
    }
    return arcs;
}

// Duals u, v with u[0] = 0 solved over the basis tree.
void compute_duals(const std::vector<Arc>& arcs, const Matrix& cost, int n, int m,
                   std::vector<double>& u, std::vector<double>& v) {
    const int num_nodes = n + m;
    std::vector<std::vector<int>> inc(static_cast<std::size_t>(num_nodes));
    for (std::size_t e = 0; e < arcs.size(); ++e) {
        inc[static_cast<std::size_t>(arcs[e].row)].push_back(static_cast<int>(e));
        inc[static_cast<std::size_t>(n + arcs[e].col)].push_back(static_cast<int>(e));
    }
    u.assign(static_cast<std::size_t>(n), 0.0);
    v.assign(static_cast<std::size_t>(m), 0.0);
    std::vector<char> visited(static_cast<std::size_t>(num_nodes), 0);
    std::queue<int> frontier;
    visited[0] = 1;
    frontier.push(0);
    while (!frontier.empty()) {
        int node = frontier.front();
        frontier.pop();
        for (int e : inc[static_cast<std::size_t>(node)]) {
            const Arc& arc = arcs[static_cast<std::size_t>(e)];
            int other = (node == arc.row) ? n + arc.col : arc.row;
            if (visited[static_cast<std::size_t>(other)]) continue;
            double d = cost(static_cast<std::size_t>(arc.row), static_cast<std::size_t>(arc.col));
            if (other >= n) {
                v[static_cast<std::size_t>(other - n)] = d - u[static_cast<std::size_t>(arc.row)];
            } else {
                u[static_cast<std::size_t>(other)] = d - v[static_cast<std::size_t>(arc.col)];
            }
            visited[static_cast<std::size_t>(other)] = 1;
            frontier.push(other);
        }
    }
}

// Tree path between the endpoints of the entering arc, as a node sequence
// from row node `from_row` to column node `to_col`.
std::vector<int> tree_path(const std::vector<Arc>& arcs, int n, int m, int from_row,
                           int to_col) {
    const int num_nodes = n + m;
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(num_nodes));
    for (std::size_t e = 0; e < arcs.size(); ++e) {
        int rn = arcs[e].row, cn = n + arcs[e].col;
        adj[static_cast<std::size_t>(rn)].push_back({cn, static_cast<int>(e)});
        adj[static_cast<std::size_t>(cn)].push_back({rn, static_cast<int>(e)});
    }
    std::vector<int> parent(static_cast<std::size_t>(num_nodes), -1);
    std::vector<char> visited(static_cast<std::size_t>(num_nodes), 0);
    std::queue<int> frontier;
    visited[static_cast<std::size_t>(from_row)] = 1;
    frontier.push(from_row);
    int target = n + to_col;
    while (!frontier.empty()) {
        int node = frontier.front();
        frontier.pop();
        if (node == target) break;
        for (auto [other, e] : adj[static_cast<std::size_t>(node)]) {
            if (visited[static_cast<std::size_t>(other)]) continue;
            visited[static_cast<std::size_t>(other)] = 1;
            parent[static_cast<std::size_t>(other)] = node;
            frontier.push(other);
        }
    }
    std::vector<int> path;
    for (int node = target; node != -1; node = parent[static_cast<std::size_t>(node)]) {
        path.push_back(node);
    }
    std::reverse(path.begin(), path.end());
    return path;  // starts at from_row, ends at target
}

int find_arc(const std::vector<Arc>& arcs, int n, int node_a, int node_b) {
    int row = node_a < n ? node_a : node_b;
    int col = node_a < n ? node_b - n : node_a - n;
    for (std::size_t e = 0; e < arcs.size(); ++e) {
        if (arcs[e].row == row && arcs[e].col == col) return static_cast<int>(e);
    }
    return -1;
}

}  // namespace

ExactPlan exact_ot(const Matrix& cost, const std::vector<double>& a,
                   const std::vector<double>& b) {
    check_marginals(cost, a, b);
    const int n = static_cast<int>(cost.rows()), m = static_cast<int>(cost.cols());
    if (static_cast<std::size_t>(n) * static_cast<std::size_t>(m) > 1024) {
        throw InstanceTooLarge("exact_ot: instance exceeds the n*K <= 1024 cap");
    }

    // Perturbed marginals keep every pivot nondegenerate.
    std::vector<double> ap = a, bp = b;
    for (double& v : ap) v += kPerturb;
    bp[static_cast<std::size_t>(m - 1)] += kPerturb * static_cast<double>(n);

    std::vector<Arc> arcs = northwest_corner(ap, bp);
    std::vector<double> u, v;
    const long max_pivots = 200L * static_cast<long>(n + m) * static_cast<long>(n + m) + 1000;
    for (long pivot = 0;; ++pivot) {
        if (pivot > max_pivots) {
            throw Error("exact_ot: pivot limit exceeded");
        }
        compute_duals(arcs, cost, n, m, u, v);
        // Bland entering rule: first cell in row-major order with a
        // negative reduced cost.
        int enter_row = -1, enter_col = -1;
        for (int i = 0; i < n && enter_row < 0; ++i) {
            for (int j = 0; j < m; ++j) {
                double reduced = cost(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) -
                                 u[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(j)];
                if (reduced < -kReducedCostTol &&
                    find_arc(arcs, n, i, n + j) < 0) {
                    enter_row = i;
                    enter_col = j;
                    break;
                }
            }
        }
        if (enter_row < 0) break;  // optimal

        std::vector<int> path = tree_path(arcs, n, m, enter_row, enter_col);
        // Signs alternate around the cycle: the entering arc gains flow, the
        // path arc touching the entering row loses first.
        double theta = std::numeric_limits<double>::infinity();
        int leave = -1;
        for (std::size_t t = 0; t + 1 < path.size(); ++t) {
            if (t % 2 != 0) continue;  // minus arcs sit at even offsets
            int e = find_arc(arcs, n, path[t], path[t + 1]);
            if (arcs[static_cast<std::size_t>(e)].flow < theta) {
                theta = arcs[static_cast<std::size_t>(e)].flow;
                leave = e;
            }
        }
        for (std::size_t t = 0; t + 1 < path.size(); ++t) {
            int e = find_arc(arcs, n, path[t], path[t + 1]);
            arcs[static_cast<std::size_t>(e)].flow += (t % 2 == 0) ? -theta : theta;
        }
        arcs[static_cast<std::size_t>(leave)] = {enter_row, enter_col, theta};
    }

    // Optimality of the tree does not depend on the marginals, so the flows
    // can be re-solved exactly for the unperturbed problem.
    std::vector<double> flow = solve_tree_flows(arcs, n, m, a, b);
    ExactPlan out;
    out.plan = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(m), 0.0);
    for (std::size_t e = 0; e < arcs.size(); ++e) {
        if (flow[e] < -1e-6) {
            throw Error("exact_ot: infeasible tree flow, solver state corrupt");
        }
        double fl = std::max(flow[e], 0.0);  // degenerate arcs may round to -1e-17
        out.plan(static_cast<std::size_t>(arcs[e].row), static_cast<std::size_t>(arcs[e].col)) = fl;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < out.plan.rows(); ++i) {
        for (std::size_t j = 0; j < out.plan.cols(); ++j) {
            total += out.plan(i, j) * cost(i, j);
        }
    }
    out.cost = total;
    return out;
}

PlanObjective plan_objective(const TransportPlan& t, const Matrix& cost) {
    if (!t.plan.same_shape(cost)) {
        throw ShapeMismatch("plan_objective: plan and cost shapes differ");
    }
    PlanObjective obj;
    for (std::size_t i = 0; i < cost.rows(); ++i) {
        for (std::size_t j = 0; j < cost.cols(); ++j) {
            double p = t.plan(i, j);
            obj.transport_cost += p * cost(i, j);
            if (p > 0.0) obj.entropy -= p * std::log(p);
        }
    }
    obj.regularized_objective = obj.transport_cost - t.regularization * obj.entropy;
    return obj;
}

}  // namespace otx
