#include "plap/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "plap/rng.hpp"

namespace plap {

namespace {

double simpson(double fa, double fm, double fb, double h) { return (fa + 4.0 * fm + fb) * h / 6.0; }

double simpson_adapt(const std::function<double(double)>& f, double a, double m, double b,
                     double fa, double fm, double fb, double whole, double tol, int depth,
                     double& err_acc) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        err_acc += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return simpson_adapt(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err_acc) +
           simpson_adapt(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err_acc);
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, int max_depth) {
    if (a == b) return {0.0, 0.0};
    // an odd, non-dyadic initial panel count keeps kinks at dyadic abscissae
    // from aligning with sample points and stalling the refinement
    constexpr int kPanels = 11;
    QuadResult out;
    for (int k = 0; k < kPanels; ++k) {
        const double pa = a + (b - a) * k / kPanels;
        const double pb = a + (b - a) * (k + 1) / kPanels;
        const double m = 0.5 * (pa + pb);
        const double fa = f(pa), fm = f(m), fb = f(pb);
        const double whole = simpson(fa, fm, fb, pb - pa);
        out.value += simpson_adapt(f, pa, m, pb, fa, fm, fb, whole, abs_tol / kPanels, max_depth,
                                   out.error);
    }
    return out;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton from the Chebyshev-like initial guess
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

QuadResult integrate_tensor(const std::function<double(const std::vector<double>&)>& f,
                            const std::vector<double>& lo, const std::vector<double>& hi,
                            int points_per_axis) {
    const std::size_t d = lo.size();
    if (hi.size() != d) throw std::invalid_argument("integrate_tensor: box dimension mismatch");
    std::vector<double> g, w;
    gauss_legendre(points_per_axis, g, w);
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> x(d);
    double scale = 1.0;
    for (std::size_t k = 0; k < d; ++k) scale *= 0.5 * (hi[k] - lo[k]);
    double sum = 0.0;
    while (true) {
        double wp = 1.0;
        for (std::size_t k = 0; k < d; ++k) {
            x[k] = lo[k] + 0.5 * (hi[k] - lo[k]) * (g[idx[k]] + 1.0);
            wp *= w[idx[k]];
        }
        sum += wp * f(x);
        std::size_t k = 0;
        for (; k < d; ++k) {
            if (++idx[k] < static_cast<std::size_t>(points_per_axis)) break;
            idx[k] = 0;
        }
        if (k == d) break;
    }
    return {sum * scale, 0.0};
}

QuadResult integrate_monte_carlo(const std::function<double(const std::vector<double>&)>& f,
                                 const std::vector<double>& lo, const std::vector<double>& hi,
                                 std::size_t samples, std::uint64_t seed) {
    const std::size_t d = lo.size();
    if (hi.size() != d) throw std::invalid_argument("integrate_monte_carlo: box dimension mismatch");
    if (samples == 0) throw std::invalid_argument("integrate_monte_carlo: samples must be positive");
    double vol = 1.0;
    for (std::size_t k = 0; k < d; ++k) vol *= hi[k] - lo[k];
    Rng rng(seed);
    std::vector<double> x(d);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        for (std::size_t k = 0; k < d; ++k) x[k] = rng.uniform(lo[k], hi[k]);
        const double v = f(x);
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    const double var = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
    return {vol * mean, vol * std::sqrt(var / static_cast<double>(samples))};
}

}  // namespace plap
