#pragma once

// Test-only reference implementations, independent of the library's solve
// paths: brute-force lex search, 1D grid minimization, and a Nystrom
// discretization of the kernel integral operator.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "plap/density.hpp"
#include "plap/graph.hpp"
#include "plap/spectrum.hpp"

namespace plap::oracle {

inline std::vector<double> sorted_gradients(const GeometricGraph& g, const VertexFunction& f) {
    std::vector<double> grads;
    grads.reserve(g.edges.size());
    for (const Edge& e : g.edges) grads.push_back(e.w * std::abs(f[e.i] - f[e.j]));
    std::sort(grads.begin(), grads.end(), std::greater<>());
    return grads;
}

/// -1 / 0 / +1 comparison of gradient vectors in lexicographic order, with
/// entries within tol treated as equal.
inline int lex_compare(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    const std::size_t m = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < m; ++i) {
        if (a[i] < b[i] - tol) return -1;
        if (a[i] > b[i] + tol) return 1;
    }
    return 0;
}

/// Exhaustive lex minimization over a hierarchically refined value grid for
/// graphs with at most 5 free vertices. The final refinement step is below
/// 1e-3 of the label range.
inline VertexFunction brute_force_lex(const GeometricGraph& g, const LabelSet& labels) {
    const std::size_t n = g.num_vertices();
    std::vector<bool> is_lab(n, false);
    VertexFunction f(n, 0.0);
    double ylo = 1e300, yhi = -1e300;
    for (const Label& l : labels.entries) {
        is_lab[l.vertex] = true;
        f[l.vertex] = l.value;
        ylo = std::min(ylo, l.value);
        yhi = std::max(yhi, l.value);
    }
    std::vector<std::uint32_t> free;
    for (std::uint32_t v = 0; v < n; ++v)
        if (!is_lab[v]) free.push_back(v);
    if (free.size() > 5) throw std::invalid_argument("brute_force_lex: too many free vertices");
    const double range = std::max(yhi - ylo, 1e-12);

    std::vector<double> cur(free.size(), 0.5 * (ylo + yhi));
    double step = 0.5 * range;
    const auto objective = [&](const std::vector<double>& assign) {
        for (std::size_t k = 0; k < free.size(); ++k) f[free[k]] = assign[k];
        return sorted_gradients(g, f);
    };
    while (step > 2.5e-4 * range) {
        std::vector<double> best = cur;
        std::vector<double> best_obj = objective(cur);
        std::vector<std::size_t> idx(free.size(), 0);
        std::vector<double> assign(free.size());
        const double offs[5] = {-step, -0.5 * step, 0.0, 0.5 * step, step};
        while (true) {
            for (std::size_t k = 0; k < free.size(); ++k) assign[k] = cur[k] + offs[idx[k]];
            const std::vector<double> obj = objective(assign);
            if (lex_compare(obj, best_obj, 0.0) < 0) {
                best_obj = obj;
                best = assign;
            }
            std::size_t k = 0;
            for (; k < free.size(); ++k) {
                if (++idx[k] < 5) break;
                idx[k] = 0;
            }
            if (k == free.size()) break;
        }
        cur = best;
        step *= 0.5;
    }
    objective(cur);
    return f;
}

/// Hierarchical 1D grid minimizer, final resolution below `tol`.
inline double grid_search_min(const std::function<double(double)>& fn, double lo, double hi,
                              double tol) {
    double best_x = lo, best_v = fn(lo);
    const int m = 200;
    for (int i = 0; i <= m; ++i) {
        const double x = lo + (hi - lo) * i / m;
        const double v = fn(x);
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
    }
    double step = (hi - lo) / m;
    while (step > tol / 4.0) {
        for (int i = -10; i <= 10; ++i) {
            const double x = best_x + step * i / 10.0;
            const double v = fn(x);
            if (v < best_v) {
                best_v = v;
                best_x = x;
            }
        }
        step /= 10.0;
    }
    return best_x;
}

/// Odd-eigenfunction eigenvalues of the kernel integral operator
/// T f(x) = int K(x,t) f(t) mu(t) dt on [-1,1], by trapezoid Nystrom.
inline std::vector<double> nystrom_odd_eigenvalues(const DensityModel& density, int grid_n,
                                                   int how_many) {
    Eigen::VectorXd t(grid_n), w(grid_n), mu(grid_n);
    for (int i = 0; i < grid_n; ++i) {
        t(i) = -1.0 + 2.0 * i / (grid_n - 1);
        w(i) = 2.0 / (grid_n - 1);
    }
    w(0) *= 0.5;
    w(grid_n - 1) *= 0.5;
    std::vector<double> ts(t.data(), t.data() + grid_n);
    double total = 0.0;
    const std::vector<double> prof = kernel_k_profile(density, ts, total);
    for (int i = 0; i < grid_n; ++i) mu(i) = eval_density(density, {t(i)});
    Eigen::MatrixXd B(grid_n, grid_n);
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double K = 0.25 * total - 0.5 * std::abs(prof[i] - prof[j]);
            const double v = std::sqrt(w(i) * mu(i)) * K * std::sqrt(w(j) * mu(j));
            B(i, j) = v;
            B(j, i) = v;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    std::vector<double> odd;
    for (int c = grid_n - 1; c >= 0 && static_cast<int>(odd.size()) < how_many; --c) {
        Eigen::VectorXd v = es.eigenvectors().col(c);
        // undo the symmetrization weight to recover the eigenfunction shape
        for (int i = 0; i < grid_n; ++i) v(i) /= std::sqrt(w(i) * mu(i));
        double sym = 0.0, nrm = 0.0;
        for (int i = 0; i < grid_n; ++i) {
            sym += std::abs(v(i) + v(grid_n - 1 - i));
            nrm += std::abs(v(i));
        }
        if (sym / nrm < 0.05) odd.push_back(es.eigenvalues()(c));
    }
    return odd;
}

}  // namespace plap::oracle
