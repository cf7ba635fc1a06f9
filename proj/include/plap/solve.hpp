#pragma once

#include "plap/graph.hpp"

namespace plap {

struct SolveOptions {
    int max_iters = 500;
    double rel_tol = 1e-9;
    /// IRLS gradient floor, relative to the label value range. Annealed by
    /// x0.1 whenever the outer objective stalls, down to 1e-12 x range.
    double smoothing_floor = 1e-8;
    double linear_solver_tol = 1e-10;
};

struct SolveResult {
    VertexFunction f;
    /// J_p at the solution; for lex, the maximum edge gradient.
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    /// w_ij |f_i - f_j| per edge, in graph edge order.
    std::vector<double> edge_gradients;
    /// objective after each outer iteration (critical gradient per round
    /// for lex); convergence-plot telemetry
    std::vector<double> objective_trace;
};

/// CSV rows `vertex,value`.
void export_solution_csv(const VertexFunction& f, const std::string& path);
/// CSV rows `iteration,objective`.
void export_trace_csv(const std::vector<double>& trace, const std::string& path);

/// Exact minimizer of sum w_ij^2 (f_i - f_j)^2 subject to the labels.
/// Unlabeled vertices satisfy f_i = sum_j w_ij^2 f_j / sum_j w_ij^2.
SolveResult solve_p2(const GeometricGraph& g, const LabelSet& labels,
                     const SolveOptions& opts = {});

/// IRLS minimizer of J_p for even p >= 2 subject to the labels; the
/// objective is nonincreasing across iterations (backtracked if needed).
SolveResult solve_even_p(const GeometricGraph& g, const LabelSet& labels, int p,
                         const SolveOptions& opts = {});

/// Lex-minimizer: minimizes the sorted vector of edge gradients
/// w_ij |f_i - f_j| lexicographically subject to the labels. Dispatches to
/// the reference steepest-path loop on small graphs and to the equivalent
/// critical-gradient sweep on large ones.
SolveResult solve_lex(const GeometricGraph& g, const LabelSet& labels);

/// Reference implementation: repeatedly fix the steepest terminal-to-terminal
/// path (free interior), interpolating linearly in path-length metric.
SolveResult solve_lex_sequential(const GeometricGraph& g, const LabelSet& labels);

/// Same fixed values, computed one critical gradient level at a time via
/// upper/lower distance envelopes; much faster on dense graphs.
SolveResult solve_lex_bulk(const GeometricGraph& g, const LabelSet& labels);

/// Minimizer of sum_{i in O} (f_i - y_i)^2 + lambda J_p(f); no hard
/// constraints. Components without any labeled vertex are set to 0.
SolveResult solve_penalized(const GeometricGraph& g, const LabelSet& labels, int p,
                            double lambda, const SolveOptions& opts = {});

}  // namespace plap
