#include "plap/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace plap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Adjacency {
    std::vector<std::size_t> offset;       // n+1
    std::vector<std::uint32_t> neighbor;   // 2E
    std::vector<std::uint32_t> edge_index; // 2E, index into graph.edges
};

Adjacency build_adjacency(const GeometricGraph& g) {
    const std::size_t n = g.num_vertices();
    Adjacency adj;
    adj.offset.assign(n + 1, 0);
    for (const Edge& e : g.edges) {
        ++adj.offset[e.i + 1];
        ++adj.offset[e.j + 1];
    }
    for (std::size_t i = 0; i < n; ++i) adj.offset[i + 1] += adj.offset[i];
    adj.neighbor.resize(2 * g.edges.size());
    adj.edge_index.resize(2 * g.edges.size());
    std::vector<std::size_t> cur(adj.offset.begin(), adj.offset.end() - 1);
    for (std::uint32_t ei = 0; ei < g.edges.size(); ++ei) {
        const Edge& e = g.edges[ei];
        adj.neighbor[cur[e.i]] = e.j;
        adj.edge_index[cur[e.i]++] = ei;
        adj.neighbor[cur[e.j]] = e.i;
        adj.edge_index[cur[e.j]++] = ei;
    }
    return adj;
}

void validate_labels(const GeometricGraph& g, const LabelSet& labels) {
    if (labels.entries.empty()) throw std::invalid_argument("solve: label set is empty");
    std::vector<bool> seen(g.num_vertices(), false);
    for (const Label& l : labels.entries) {
        if (l.vertex >= g.num_vertices())
            throw std::invalid_argument("solve: label index out of range");
        if (seen[l.vertex]) throw std::invalid_argument("solve: duplicate label index");
        seen[l.vertex] = true;
    }
}

/// Every component containing an unlabeled vertex must contain a label.
void check_components_labeled(const GeometricGraph& g, const Adjacency& adj,
                              const std::vector<bool>& labeled) {
    const std::size_t n = g.num_vertices();
    std::vector<bool> reached(n, false);
    std::vector<std::uint32_t> stack;
    for (std::uint32_t v = 0; v < n; ++v) {
        if (!labeled[v] || reached[v]) continue;
        reached[v] = true;
        stack.push_back(v);
    }
    while (!stack.empty()) {
        const std::uint32_t v = stack.back();
        stack.pop_back();
        for (std::size_t k = adj.offset[v]; k < adj.offset[v + 1]; ++k) {
            const std::uint32_t u = adj.neighbor[k];
            if (!reached[u]) {
                reached[u] = true;
                stack.push_back(u);
            }
        }
    }
    for (std::uint32_t v = 0; v < n; ++v)
        if (!reached[v])
            throw std::invalid_argument("solve: vertex " + std::to_string(v) +
                                        " lies in a component with no label");
}

std::vector<double> edge_gradients_of(const GeometricGraph& g, const VertexFunction& f) {
    std::vector<double> grads(g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        grads[e] = g.edges[e].w * std::abs(f[g.edges[e].i] - f[g.edges[e].j]);
    return grads;
}

double objective_jp(const GeometricGraph& g, const VertexFunction& f, int p) {
    double s = 0.0;
    for (const Edge& e : g.edges) s += std::pow(e.w * std::abs(f[e.i] - f[e.j]), p);
    return s;
}

/// Solve the constrained weighted-Laplacian system: minimize
/// sum_e omega_e (f_i - f_j)^2 with fixed labeled values. Dense elimination
/// for <= 2000 unknowns, Jacobi-preconditioned CG above (warm-started).
void quadratic_solve(const GeometricGraph& g, const Adjacency& adj,
                     const std::vector<double>& omega, const std::vector<bool>& labeled,
                     VertexFunction& f, double tol) {
    const std::size_t n = g.num_vertices();
    std::vector<std::int64_t> free_id(n, -1);
    std::vector<std::uint32_t> free_list;
    for (std::uint32_t v = 0; v < n; ++v)
        if (!labeled[v]) {
            free_id[v] = static_cast<std::int64_t>(free_list.size());
            free_list.push_back(v);
        }
    const std::size_t m = free_list.size();
    if (m == 0) return;

    std::vector<double> diag(m, 0.0), rhs(m, 0.0);
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
        const Edge& e = g.edges[ei];
        const double w = omega[ei];
        const bool li = labeled[e.i], lj = labeled[e.j];
        if (!li) diag[free_id[e.i]] += w;
        if (!lj) diag[free_id[e.j]] += w;
        if (!li && lj) rhs[free_id[e.i]] += w * f[e.j];
        if (li && !lj) rhs[free_id[e.j]] += w * f[e.i];
    }

    if (m <= 2000) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd b(m);
        for (std::size_t r = 0; r < m; ++r) {
            A(r, r) = diag[r];
            b(r) = rhs[r];
        }
        for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
            const Edge& e = g.edges[ei];
            if (!labeled[e.i] && !labeled[e.j]) {
                A(free_id[e.i], free_id[e.j]) -= omega[ei];
                A(free_id[e.j], free_id[e.i]) -= omega[ei];
            }
        }
        Eigen::VectorXd x = A.ldlt().solve(b);
        for (std::size_t r = 0; r < m; ++r) f[free_list[r]] = x(r);
        return;
    }

    // CG with Jacobi preconditioner; matvec over the edge list
    auto matvec = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (std::size_t r = 0; r < m; ++r) y[r] = diag[r] * x[r];
        for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
            const Edge& e = g.edges[ei];
            if (!labeled[e.i] && !labeled[e.j]) {
                const std::size_t a = free_id[e.i], b2 = free_id[e.j];
                y[a] -= omega[ei] * x[b2];
                y[b2] -= omega[ei] * x[a];
            }
        }
    };
    std::vector<double> x(m), r(m), z(m), p(m), ap(m);
    for (std::size_t i = 0; i < m; ++i) x[i] = f[free_list[i]];  // warm start
    matvec(x, ap);
    double bnorm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        r[i] = rhs[i] - ap[i];
        bnorm2 += rhs[i] * rhs[i];
    }
    const double stop2 = tol * tol * std::max(bnorm2, 1e-300);
    double rz = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        z[i] = r[i] / std::max(diag[i], 1e-300);
        p[i] = z[i];
        rz += r[i] * z[i];
    }
    const std::size_t max_cg = 20 * m + 200;
    for (std::size_t it = 0; it < max_cg; ++it) {
        double rr = 0.0;
        for (std::size_t i = 0; i < m; ++i) rr += r[i] * r[i];
        if (rr <= stop2) break;
        matvec(p, ap);
        double pap = 0.0;
        for (std::size_t i = 0; i < m; ++i) pap += p[i] * ap[i];
        if (!(pap > 0.0)) throw std::runtime_error("quadratic_solve: CG breakdown (not SPD?)");
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < m; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        double rz_new = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            z[i] = r[i] / std::max(diag[i], 1e-300);
            rz_new += r[i] * z[i];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < m; ++i) p[i] = z[i] + beta * p[i];
    }
    for (std::size_t i = 0; i < m; ++i) f[free_list[i]] = x[i];
}

VertexFunction initial_guess(const GeometricGraph& g, const LabelSet& labels) {
    double mean = 0.0;
    for (const Label& l : labels.entries) mean += l.value;
    mean /= static_cast<double>(labels.entries.size());
    VertexFunction f(g.num_vertices(), mean);
    for (const Label& l : labels.entries) f[l.vertex] = l.value;
    return f;
}

double label_range(const LabelSet& labels) {
    double lo = kInf, hi = -kInf;
    for (const Label& l : labels.entries) {
        lo = std::min(lo, l.value);
        hi = std::max(hi, l.value);
    }
    return hi - lo;
}

}  // namespace

SolveResult solve_p2(const GeometricGraph& g, const LabelSet& labels, const SolveOptions& opts) {
    validate_labels(g, labels);
    const Adjacency adj = build_adjacency(g);
    std::vector<bool> labeled(g.num_vertices(), false);
    VertexFunction f = initial_guess(g, labels);
    for (const Label& l : labels.entries) labeled[l.vertex] = true;
    check_components_labeled(g, adj, labeled);

    std::vector<double> omega(g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) omega[e] = g.edges[e].w * g.edges[e].w;
    quadratic_solve(g, adj, omega, labeled, f, opts.linear_solver_tol);

    SolveResult res;
    res.objective = objective_jp(g, f, 2);
    res.edge_gradients = edge_gradients_of(g, f);
    res.f = std::move(f);
    res.iterations = 1;
    res.converged = true;
    return res;
}

SolveResult solve_even_p(const GeometricGraph& g, const LabelSet& labels, int p,
                         const SolveOptions& opts) {
    if (p < 2 || p % 2 != 0)
        throw std::invalid_argument("solve_even_p: p must be an even integer >= 2");
    if (p == 2) return solve_p2(g, labels, opts);
    validate_labels(g, labels);
    const Adjacency adj = build_adjacency(g);
    std::vector<bool> labeled(g.num_vertices(), false);
    for (const Label& l : labels.entries) labeled[l.vertex] = true;
    check_components_labeled(g, adj, labeled);

    const double range = label_range(labels);
    SolveResult res;
    if (range == 0.0) {
        // constant interpolation is the exact minimizer
        res.f.assign(g.num_vertices(), labels.entries.front().value);
        for (const Label& l : labels.entries) res.f[l.vertex] = l.value;
        res.objective = objective_jp(g, res.f, p);
        res.edge_gradients = edge_gradients_of(g, res.f);
        res.converged = true;
        return res;
    }

    VertexFunction f = solve_p2(g, labels, opts).f;
    double obj = objective_jp(g, f, p);
    double floor_abs = opts.smoothing_floor * range;
    const double floor_min = 1e-12 * range;
    std::vector<double> omega(g.edges.size());
    int iters = 0;
    bool converged = false;

    while (iters < opts.max_iters) {
        ++iters;
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            const Edge& ed = g.edges[e];
            const double delta = std::max(std::abs(f[ed.i] - f[ed.j]), floor_abs);
            omega[e] = std::pow(ed.w, p) * std::pow(delta, p - 2);
        }
        VertexFunction quad = f;
        quadratic_solve(g, adj, omega, labeled, quad, opts.linear_solver_tol);
        VertexFunction trial = quad;
        double new_obj = objective_jp(g, trial, p);
        // backtrack toward the current iterate if the reweighted step overshoots
        double t = 1.0;
        while (new_obj > obj && t > 1e-12) {
            t *= 0.5;
            for (std::size_t v = 0; v < f.size(); ++v) trial[v] = f[v] + t * (quad[v] - f[v]);
            new_obj = objective_jp(g, trial, p);
        }
        const double drop = obj - new_obj;
        const bool stalled = drop <= opts.rel_tol * std::max(obj, 1e-300);
        if (new_obj <= obj) {
            f = std::move(trial);
            obj = new_obj;
        }
        if (stalled) {
            if (floor_abs > floor_min) {
                floor_abs = std::max(floor_abs * 0.1, floor_min);
            } else {
                converged = true;
                break;
            }
        }
    }

    res.objective = obj;
    res.edge_gradients = edge_gradients_of(g, f);
    res.f = std::move(f);
    res.iterations = iters;
    res.converged = converged;
    return res;
}

SolveResult solve_penalized(const GeometricGraph& g, const LabelSet& labels, int p, double lambda,
                            const SolveOptions& opts) {
    if (!(lambda > 0.0)) throw std::invalid_argument("solve_penalized: lambda must be positive");
    if (p < 2 || p % 2 != 0)
        throw std::invalid_argument("solve_penalized: p must be an even integer >= 2");
    validate_labels(g, labels);
    const std::size_t n = g.num_vertices();
    const Adjacency adj = build_adjacency(g);

    std::vector<double> y(n, 0.0);
    std::vector<bool> observed(n, false);
    for (const Label& l : labels.entries) {
        y[l.vertex] = l.value;
        observed[l.vertex] = true;
    }

    // components with no observation do not affect the objective; pin them to 0
    std::vector<bool> dead(n, true);
    {
        std::vector<std::uint32_t> stack;
        for (std::uint32_t v = 0; v < n; ++v)
            if (observed[v]) {
                dead[v] = false;
                stack.push_back(v);
            }
        while (!stack.empty()) {
            const std::uint32_t v = stack.back();
            stack.pop_back();
            for (std::size_t k = adj.offset[v]; k < adj.offset[v + 1]; ++k) {
                const std::uint32_t u = adj.neighbor[k];
                if (dead[u]) {
                    dead[u] = false;
                    stack.push_back(u);
                }
            }
        }
    }

    // Unconstrained stationarity: (f_i - y_i) 1[observed] + lambda (L_omega f)_i = 0.
    // Solved as a regularized quadratic per IRLS pass (exact for p = 2).
    auto penalized_quadratic = [&](const std::vector<double>& omega, VertexFunction& f) {
        std::vector<std::uint32_t> active;
        std::vector<std::int64_t> id(n, -1);
        for (std::uint32_t v = 0; v < n; ++v)
            if (!dead[v]) {
                id[v] = static_cast<std::int64_t>(active.size());
                active.push_back(v);
            }
        const std::size_t m = active.size();
        std::vector<double> diag(m, 0.0), rhs(m, 0.0);
        for (std::size_t r = 0; r < m; ++r)
            if (observed[active[r]]) {
                diag[r] += 1.0;
                rhs[r] += y[active[r]];
            }
        for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
            const Edge& e = g.edges[ei];
            if (dead[e.i]) continue;
            diag[id[e.i]] += lambda * omega[ei];
            diag[id[e.j]] += lambda * omega[ei];
        }
        if (m <= 2000) {
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
            Eigen::VectorXd b(m);
            for (std::size_t r = 0; r < m; ++r) {
                A(r, r) = diag[r];
                b(r) = rhs[r];
            }
            for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
                const Edge& e = g.edges[ei];
                if (dead[e.i]) continue;
                A(id[e.i], id[e.j]) -= lambda * omega[ei];
                A(id[e.j], id[e.i]) -= lambda * omega[ei];
            }
            Eigen::VectorXd x = A.ldlt().solve(b);
            for (std::size_t r = 0; r < m; ++r) f[active[r]] = x(r);
        } else {
            auto matvec = [&](const std::vector<double>& xv, std::vector<double>& yv) {
                for (std::size_t r = 0; r < m; ++r) yv[r] = diag[r] * xv[r];
                for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
                    const Edge& e = g.edges[ei];
                    if (dead[e.i]) continue;
                    yv[id[e.i]] -= lambda * omega[ei] * xv[id[e.j]];
                    yv[id[e.j]] -= lambda * omega[ei] * xv[id[e.i]];
                }
            };
            std::vector<double> x(m), r(m), z(m), pv(m), ap(m);
            for (std::size_t i = 0; i < m; ++i) x[i] = f[active[i]];
            matvec(x, ap);
            double bnorm2 = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                r[i] = rhs[i] - ap[i];
                bnorm2 += rhs[i] * rhs[i];
            }
            const double stop2 =
                opts.linear_solver_tol * opts.linear_solver_tol * std::max(bnorm2, 1e-300);
            double rz = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                z[i] = r[i] / std::max(diag[i], 1e-300);
                pv[i] = z[i];
                rz += r[i] * z[i];
            }
            for (std::size_t it = 0; it < 20 * m + 200; ++it) {
                double rr = 0.0;
                for (std::size_t i = 0; i < m; ++i) rr += r[i] * r[i];
                if (rr <= stop2) break;
                matvec(pv, ap);
                double pap = 0.0;
                for (std::size_t i = 0; i < m; ++i) pap += pv[i] * ap[i];
                if (!(pap > 0.0)) throw std::runtime_error("solve_penalized: CG breakdown");
                const double alpha = rz / pap;
                for (std::size_t i = 0; i < m; ++i) {
                    x[i] += alpha * pv[i];
                    r[i] -= alpha * ap[i];
                }
                double rznew = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    z[i] = r[i] / std::max(diag[i], 1e-300);
                    rznew += r[i] * z[i];
                }
                const double beta = rznew / rz;
                rz = rznew;
                for (std::size_t i = 0; i < m; ++i) pv[i] = z[i] + beta * pv[i];
            }
            for (std::size_t i = 0; i < m; ++i) f[active[i]] = x[i];
        }
        for (std::uint32_t v = 0; v < n; ++v)
            if (dead[v]) f[v] = 0.0;
    };

    auto total_objective = [&](const VertexFunction& f) {
        double loss = 0.0;
        for (const Label& l : labels.entries) {
            const double d = f[l.vertex] - l.value;
            loss += d * d;
        }
        return loss + lambda * objective_jp(g, f, p);
    };

    VertexFunction f(n, 0.0);
    std::vector<double> omega(g.edges.size());
    SolveResult res;
    if (p == 2) {
        for (std::size_t e = 0; e < g.edges.size(); ++e) omega[e] = g.edges[e].w * g.edges[e].w;
        penalized_quadratic(omega, f);
        res.iterations = 1;
        res.converged = true;
    } else {
        const double range = label_range(labels);
        double floor_abs = opts.smoothing_floor * std::max(range, 1e-30);
        const double floor_min = 1e-12 * std::max(range, 1e-30);
        // p = 2 penalized solution as the convex warm start
        std::vector<double> om2(g.edges.size());
        for (std::size_t e = 0; e < g.edges.size(); ++e) om2[e] = g.edges[e].w * g.edges[e].w;
        penalized_quadratic(om2, f);
        double obj = total_objective(f);
        int iters = 0;
        bool converged = false;
        while (iters < opts.max_iters) {
            ++iters;
            // the p/2 factor makes the quadratic model gradient-consistent with
            // J_p against the fixed squared loss
            for (std::size_t e = 0; e < g.edges.size(); ++e) {
                const Edge& ed = g.edges[e];
                const double delta = std::max(std::abs(f[ed.i] - f[ed.j]), floor_abs);
                omega[e] = 0.5 * p * std::pow(ed.w, p) * std::pow(delta, p - 2);
            }
            VertexFunction quad = f;
            penalized_quadratic(omega, quad);
            VertexFunction trial = quad;
            double new_obj = total_objective(trial);
            double t = 1.0;
            while (new_obj > obj && t > 1e-12) {
                t *= 0.5;
                for (std::size_t v = 0; v < n; ++v) trial[v] = f[v] + t * (quad[v] - f[v]);
                new_obj = total_objective(trial);
            }
            const double drop = obj - new_obj;
            const bool stalled = drop <= opts.rel_tol * std::max(obj, 1e-300);
            if (new_obj <= obj) {
                f = std::move(trial);
                obj = new_obj;
            }
            if (stalled) {
                if (floor_abs > floor_min) {
                    floor_abs = std::max(floor_abs * 0.1, floor_min);
                } else {
                    converged = true;
                    break;
                }
            }
        }
        res.iterations = iters;
        res.converged = converged;
    }
    res.objective = objective_jp(g, f, p);
    res.edge_gradients = edge_gradients_of(g, f);
    res.f = std::move(f);
    return res;
}

// ---------------------------------------------------------------------------
// Lex-minimization
// ---------------------------------------------------------------------------

namespace {

struct LexGraph {
    std::vector<std::size_t> offset;
    std::vector<std::uint32_t> neighbor;
    std::vector<double> length;  // 1/w
};

LexGraph build_lex_graph(const GeometricGraph& g, const Adjacency& adj) {
    LexGraph lg;
    lg.offset = adj.offset;
    lg.neighbor = adj.neighbor;
    lg.length.resize(adj.neighbor.size());
    for (std::size_t k = 0; k < adj.neighbor.size(); ++k)
        lg.length[k] = 1.0 / g.edges[adj.edge_index[k]].w;
    return lg;
}

/// Nearest-terminal assignment for vertices not lying on any terminal pair
/// path; ties go to the smaller terminal index.
void assign_nearest_terminal(const LexGraph& lg, const std::vector<bool>& fixed,
                             VertexFunction& f) {
    const std::size_t n = fixed.size();
    using Item = std::tuple<double, std::uint32_t, std::uint32_t>;  // dist, terminal, vertex
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    std::vector<bool> done(n, false);
    for (std::uint32_t v = 0; v < n; ++v)
        if (fixed[v]) pq.emplace(0.0, v, v);
    while (!pq.empty()) {
        auto [d, t, v] = pq.top();
        pq.pop();
        if (done[v]) continue;
        done[v] = true;
        if (!fixed[v]) f[v] = f[t];
        for (std::size_t k = lg.offset[v]; k < lg.offset[v + 1]; ++k) {
            const std::uint32_t u = lg.neighbor[k];
            if (!done[u] && !fixed[u]) pq.emplace(d + lg.length[k], t, u);
        }
    }
}

SolveResult finish_lex(const GeometricGraph& g, VertexFunction f, int rounds) {
    SolveResult res;
    res.edge_gradients = edge_gradients_of(g, f);
    res.objective = res.edge_gradients.empty()
                        ? 0.0
                        : *std::max_element(res.edge_gradients.begin(), res.edge_gradients.end());
    res.f = std::move(f);
    res.iterations = rounds;
    res.converged = true;
    return res;
}

}  // namespace

SolveResult solve_lex_sequential(const GeometricGraph& g, const LabelSet& labels) {
    validate_labels(g, labels);
    const Adjacency adj = build_adjacency(g);
    std::vector<bool> fixed(g.num_vertices(), false);
    VertexFunction f(g.num_vertices(), 0.0);
    for (const Label& l : labels.entries) {
        fixed[l.vertex] = true;
        f[l.vertex] = l.value;
    }
    check_components_labeled(g, adj, fixed);
    const LexGraph lg = build_lex_graph(g, adj);
    const std::size_t n = g.num_vertices();

    std::vector<std::uint32_t> terminals;
    for (std::uint32_t v = 0; v < n; ++v)
        if (fixed[v]) terminals.push_back(v);

    std::vector<double> dist(n);
    std::vector<std::int64_t> pred(n);
    int rounds = 0;

    while (true) {
        ++rounds;
        double best_grad = -1.0;
        std::uint32_t best_u = 0, best_v = 0;
        std::vector<std::uint32_t> best_path;

        for (const std::uint32_t u : terminals) {
            // Dijkstra from u through free vertices; arrivals at other
            // terminals are recorded only via a free predecessor so every
            // candidate path has free interior. Distance ties prefer the
            // smaller predecessor index.
            std::fill(dist.begin(), dist.end(), kInf);
            std::fill(pred.begin(), pred.end(), -1);
            std::vector<double> reach(n, kInf);
            std::vector<std::int64_t> reach_pred(n, -1);
            using Item = std::pair<double, std::uint32_t>;
            std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
            dist[u] = 0.0;
            pq.emplace(0.0, u);
            std::vector<bool> done(n, false);
            while (!pq.empty()) {
                auto [d, x] = pq.top();
                pq.pop();
                if (done[x] || d > dist[x]) continue;
                done[x] = true;
                for (std::size_t k = lg.offset[x]; k < lg.offset[x + 1]; ++k) {
                    const std::uint32_t y2 = lg.neighbor[k];
                    const double nd = d + lg.length[k];
                    if (fixed[y2]) {
                        if (y2 != u && x != u) {
                            if (nd < reach[y2] ||
                                (nd == reach[y2] && static_cast<std::int64_t>(x) < reach_pred[y2])) {
                                reach[y2] = nd;
                                reach_pred[y2] = x;
                            }
                        }
                        continue;
                    }
                    if (nd < dist[y2] ||
                        (nd == dist[y2] && static_cast<std::int64_t>(x) < pred[y2])) {
                        dist[y2] = nd;
                        pred[y2] = static_cast<std::int64_t>(x);
                        pq.emplace(nd, y2);
                    }
                }
            }
            for (const std::uint32_t v : terminals) {
                if (v == u || reach[v] == kInf) continue;
                const double grad = std::abs(f[u] - f[v]) / reach[v];
                const auto key = std::minmax(u, v);
                bool better = grad > best_grad;
                if (!better && grad == best_grad) {
                    const auto bkey = std::minmax(best_u, best_v);
                    better = key < bkey;
                }
                if (better) {
                    best_grad = grad;
                    best_u = u;
                    best_v = v;
                    // predecessor chain runs v -> ... -> u (pred[u] = -1)
                    best_path.clear();
                    best_path.push_back(v);
                    std::int64_t x = reach_pred[v];
                    while (x >= 0) {
                        best_path.push_back(static_cast<std::uint32_t>(x));
                        x = pred[static_cast<std::size_t>(x)];
                    }
                    std::reverse(best_path.begin(), best_path.end());
                }
            }
        }

        if (best_grad < 0.0) break;  // no terminal pair connected through free vertices

        // interpolate along the path in path-length metric
        double total = 0.0;
        std::vector<double> acc(best_path.size(), 0.0);
        for (std::size_t s = 0; s + 1 < best_path.size(); ++s) {
            double len = kInf;
            for (std::size_t k = lg.offset[best_path[s]]; k < lg.offset[best_path[s] + 1]; ++k)
                if (lg.neighbor[k] == best_path[s + 1]) len = std::min(len, lg.length[k]);
            total += len;
            acc[s + 1] = total;
        }
        for (std::size_t s = 1; s + 1 < best_path.size(); ++s) {
            const std::uint32_t x = best_path[s];
            f[x] = f[best_u] + (f[best_v] - f[best_u]) * acc[s] / total;
            fixed[x] = true;
            terminals.push_back(x);
        }
        std::sort(terminals.begin(), terminals.end());
    }

    assign_nearest_terminal(lg, fixed, f);
    return finish_lex(g, std::move(f), rounds);
}

SolveResult solve_lex_bulk(const GeometricGraph& g, const LabelSet& labels) {
    validate_labels(g, labels);
    const Adjacency adj = build_adjacency(g);
    const std::size_t n = g.num_vertices();
    std::vector<bool> fixed(n, false);
    VertexFunction f(n, 0.0);
    for (const Label& l : labels.entries) {
        fixed[l.vertex] = true;
        f[l.vertex] = l.value;
    }
    check_components_labeled(g, adj, fixed);
    const LexGraph lg = build_lex_graph(g, adj);

    double scale = std::max(1.0, std::abs(label_range(labels)));

    // per-sweep scratch
    std::vector<double> hi(n), lo(n), dist_hi(n), dist_lo(n);
    std::vector<std::uint32_t> src_hi(n), src_lo(n);
    std::vector<bool> done(n);
    std::vector<std::uint32_t> boundary;  // fixed vertices with a free neighbor
    std::vector<std::pair<double, std::uint32_t>> heap;

    // mutable adjacency with lazy removal of fixed targets (fixedness is
    // monotone, so each edge slot is discarded at most once)
    std::vector<std::uint32_t> live_nb = lg.neighbor;
    std::vector<double> live_len = lg.length;
    std::vector<std::size_t> live_end(n);
    for (std::uint32_t v = 0; v < n; ++v) live_end[v] = lg.offset[v + 1];
    auto prune = [&](std::uint32_t v, std::size_t& k) {
        // drop fixed targets by swapping them past live_end
        while (k < live_end[v] && fixed[live_nb[k]]) {
            const std::size_t last = --live_end[v];
            std::swap(live_nb[k], live_nb[last]);
            std::swap(live_len[k], live_len[last]);
        }
    };

    // Upper envelope max_u (s * f_u - g * d_u(x)) over free-interior paths;
    // result for s = -1 is the negated lower envelope.
    auto sweep = [&](double grad_level, double sgn, std::vector<double>& val,
                     std::vector<double>& dst, std::vector<std::uint32_t>& src) {
        std::fill(val.begin(), val.end(), -kInf);
        std::fill(done.begin(), done.end(), false);
        heap.clear();
        for (const std::uint32_t v : boundary) {
            val[v] = sgn * f[v];
            dst[v] = 0.0;
            src[v] = v;
            heap.emplace_back(val[v], v);
        }
        std::make_heap(heap.begin(), heap.end());
        while (!heap.empty()) {
            std::pop_heap(heap.begin(), heap.end());
            const auto [d, x] = heap.back();
            heap.pop_back();
            if (done[x] || d < val[x]) continue;
            done[x] = true;
            for (std::size_t k = lg.offset[x]; k < live_end[x];) {
                prune(x, k);
                if (k >= live_end[x]) break;
                const std::uint32_t y2 = live_nb[k];
                if (!done[y2]) {
                    const double cand = d - grad_level * live_len[k];
                    if (cand > val[y2]) {
                        val[y2] = cand;
                        dst[y2] = dst[x] + live_len[k];
                        src[y2] = src[x];
                        heap.emplace_back(cand, y2);
                        std::push_heap(heap.begin(), heap.end());
                    }
                }
                ++k;
            }
        }
    };

    std::vector<std::uint32_t> free_list;
    for (std::uint32_t v = 0; v < n; ++v)
        if (!fixed[v]) free_list.push_back(v);

    const double gap_tol = 1e-12 * scale;
    const double fix_tol = 1e-7 * scale;

    int rounds = 0;
    double g_prev = kInf;  // critical levels decrease across rounds
    while (!free_list.empty()) {
        ++rounds;
        boundary.clear();
        for (std::uint32_t v = 0; v < n; ++v) {
            if (!fixed[v]) continue;
            std::size_t k = lg.offset[v];
            prune(v, k);
            if (k < live_end[v]) boundary.push_back(v);
        }

        // Find this round's critical gradient. Sweeping first at the previous
        // level (an upper bound) usually exposes the next critical pair's
        // exact ratio, so Dinkelbach settles in about two sweeps.
        double gcrit = std::isfinite(g_prev) ? g_prev : 0.0;
        bool reachable = false;
        for (int it = 0; it < 300; ++it) {
            sweep(gcrit, +1.0, hi, dist_hi, src_hi);
            sweep(gcrit, -1.0, lo, dist_lo, src_lo);
            double best_gap = -kInf, best_ratio = 0.0;
            for (const std::uint32_t v : free_list) {
                if (hi[v] == -kInf || lo[v] == -kInf) continue;
                const double gap = hi[v] + lo[v];
                if (gap > best_gap) best_gap = gap;
                const double ratio =
                    (f[src_hi[v]] - f[src_lo[v]]) / (dist_hi[v] + dist_lo[v]);
                if (ratio > best_ratio) best_ratio = ratio;
            }
            if (best_gap == -kInf) {
                reachable = false;
                break;
            }
            reachable = true;
            if (best_gap > gap_tol) {
                // below the critical level: raise toward it
                if (!(best_ratio > gcrit)) break;
                gcrit = best_ratio;
            } else {
                // at or above the critical level: drop to the best ratio seen
                if (best_ratio < gcrit * (1.0 - 1e-15) && best_ratio > 0.0 &&
                    best_gap < -gap_tol) {
                    gcrit = best_ratio;
                } else {
                    break;
                }
            }
        }

        if (!reachable) {
            assign_nearest_terminal(lg, fixed, f);
            break;
        }

        // fix every free vertex sitting on a critical-gradient geodesic
        std::size_t kept = 0, nfixed = 0;
        for (std::size_t idx = 0; idx < free_list.size(); ++idx) {
            const std::uint32_t v = free_list[idx];
            if (hi[v] != -kInf && lo[v] != -kInf && hi[v] + lo[v] >= -fix_tol) {
                f[v] = 0.5 * (hi[v] - lo[v]);
                fixed[v] = true;
                ++nfixed;
            } else {
                free_list[kept++] = v;
            }
        }
        free_list.resize(kept);
        if (nfixed == 0) {
            // numerically stuck; finish the stragglers conservatively
            assign_nearest_terminal(lg, fixed, f);
            break;
        }
        g_prev = gcrit;
    }

    return finish_lex(g, std::move(f), rounds);
}

SolveResult solve_lex(const GeometricGraph& g, const LabelSet& labels) {
    return g.num_vertices() <= 300 ? solve_lex_sequential(g, labels) : solve_lex_bulk(g, labels);
}

}  // namespace plap
