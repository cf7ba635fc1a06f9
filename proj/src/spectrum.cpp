#include "plap/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plap/quadrature.hpp"

namespace plap {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// int dt / mu^2 over [-1, t], analytic for piecewise-constant densities.
double inv_mu2_cumulative(const DensityModel& density, double t) {
    if (std::holds_alternative<PiecewiseConstant1D>(density)) {
        const auto& pc = std::get<PiecewiseConstant1D>(density);
        if (pc.breakpoints.front() > -1.0 + 1e-12 || pc.breakpoints.back() < 1.0 - 1e-12)
            throw std::invalid_argument("kernel_k: density support must cover [-1,1]");
        double s = 0.0;
        for (std::size_t c = 0; c + 1 < pc.breakpoints.size(); ++c) {
            const double l = std::max(-1.0, pc.breakpoints[c]);
            const double r = std::min(t, pc.breakpoints[c + 1]);
            if (r > l) s += (r - l) / (pc.values[c] * pc.values[c]);
            if (t <= pc.breakpoints[c + 1]) break;
        }
        return s;
    }
    return integrate_adaptive(
               [&](double u) {
                   const double mu = eval_density(density, {u});
                   if (!(mu > 0.0))
                       throw std::invalid_argument("kernel_k: density vanishes inside [-1,1]");
                   return 1.0 / (mu * mu);
               },
               -1.0, t, 1e-11)
        .value;
}

}  // namespace

double kernel_k(const DensityModel& density, double x, double y) {
    if (dimension(density) != 1) throw std::invalid_argument("kernel_k: density must be 1D");
    if (x < -1.0 || x > 1.0 || y < -1.0 || y > 1.0)
        throw std::invalid_argument("kernel_k: arguments must lie in [-1,1]");
    const double total = inv_mu2_cumulative(density, 1.0);
    const double fx = inv_mu2_cumulative(density, x);
    const double fy = inv_mu2_cumulative(density, y);
    return 0.25 * total - 0.5 * std::abs(fy - fx);
}

std::vector<double> kernel_k_profile(const DensityModel& density, const std::vector<double>& xs,
                                     double& total) {
    if (dimension(density) != 1)
        throw std::invalid_argument("kernel_k_profile: density must be 1D");
    total = inv_mu2_cumulative(density, 1.0);
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] < -1.0 || xs[i] > 1.0)
            throw std::invalid_argument("kernel_k_profile: points must lie in [-1,1]");
        out[i] = inv_mu2_cumulative(density, xs[i]);
    }
    return out;
}

double Spectrum::gamma(std::size_t k, int j) const {
    if (k >= 2 * k0) throw std::invalid_argument("Spectrum::gamma: k out of range");
    if (j < 0) throw std::invalid_argument("Spectrum::gamma: j must be >= 0");
    const double base = k < k0 ? roots[k] : period - roots[2 * k0 - k - 1];
    const double x = base + static_cast<double>(j) * period;
    return 1.0 / (x * x);
}

std::vector<double> Spectrum::all_gammas() const {
    std::vector<double> out;
    out.reserve(2 * k0 * static_cast<std::size_t>(j_max + 1));
    for (std::size_t k = 0; k < 2 * k0; ++k)
        for (int j = 0; j <= j_max; ++j) out.push_back(gamma(k, j));
    return out;
}

Spectrum eigenvalues(double epsilon, int j_max) {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw std::invalid_argument("eigenvalues: epsilon must be in (0, 1/2)");
    if (j_max < 0) throw std::invalid_argument("eigenvalues: j_max must be >= 0");

    Spectrum sp;
    sp.epsilon = epsilon;
    sp.b = std::sqrt(epsilon);
    sp.a = (0.5 - epsilon * sp.b) / (1.0 - epsilon);
    sp.j_max = j_max;

    const double alpha = (1.0 - epsilon) / std::sqrt(sp.a);  // fast tangent coefficient
    const double beta = epsilon / std::sqrt(sp.b);           // slow tangent coefficient
    const double level = std::pow(sp.b / sp.a, 1.5);
    sp.period = kPi / beta;
    sp.period_ratio = alpha / beta;
    sp.ratio_is_integral = std::abs(sp.period_ratio - std::round(sp.period_ratio)) <= 1e-3;

    const double half = 0.5 * sp.period;
    const auto phi = [&](double x) { return std::tan(beta * x) * std::tan(alpha * x); };

    // On (0, period/2) the slow tangent is positive, so roots of phi = level
    // live exactly where the fast tangent is also positive: the branches
    // (k pi/alpha, k pi/alpha + pi/(2 alpha)), i.e. intervals I_{2k}. On each
    // branch phi increases from 0 to +infinity, giving one root.
    const double branch = kPi / alpha;
    for (std::size_t k = 0;; ++k) {
        double lo = static_cast<double>(k) * branch;
        if (lo >= half * (1.0 - 1e-15)) break;
        double hi = std::min(lo + 0.5 * branch, half);
        // shrink away from the pole/zero endpoints before bisecting
        const double margin = 1e-12 * (hi - lo);
        double a0 = lo + margin, b0 = hi - margin;
        // the value at a0 may already exceed the level for coarse margins;
        // expand toward the zero endpoint until we bracket
        double fa = phi(a0) - level;
        int guard = 0;
        while (fa > 0.0 && guard++ < 60) {
            a0 = lo + (a0 - lo) * 0.125;
            fa = phi(a0) - level;
        }
        double fb = phi(b0) - level;
        guard = 0;
        while (fb < 0.0 && guard++ < 60) {
            b0 = hi - (hi - b0) * 0.125;
            fb = phi(b0) - level;
        }
        if (fa > 0.0 || fb < 0.0)
            throw std::runtime_error("eigenvalues: bracketing failed on branch [" +
                                     std::to_string(lo) + ", " + std::to_string(hi) + ")");
        // bisection to relative tolerance 1e-12
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a0 + b0);
            const double fm = phi(mid) - level;
            if (fm >= 0.0)
                b0 = mid;
            else
                a0 = mid;
            if (b0 - a0 <= 1e-12 * b0) break;
        }
        // Newton polish drives the function residual to rounding level even
        // where phi is steep near a pole
        double x = 0.5 * (a0 + b0);
        for (int it = 0; it < 4; ++it) {
            const double tb = std::tan(beta * x), ta = std::tan(alpha * x);
            const double cb = std::cos(beta * x), ca = std::cos(alpha * x);
            const double deriv = beta * ta / (cb * cb) + alpha * tb / (ca * ca);
            if (!(deriv > 0.0)) break;
            const double step = (tb * ta - level) / deriv;
            const double xn = std::min(std::max(x - step, a0), b0);
            if (xn == x) break;
            x = xn;
        }
        sp.roots.push_back(x);
    }
    sp.k0 = sp.roots.size();
    if (sp.k0 == 0) throw std::runtime_error("eigenvalues: no roots found");
    return sp;
}

double eigen_bound(double epsilon, std::size_t k, int j) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("eigen_bound: epsilon must be positive");
    if (j < 0) throw std::invalid_argument("eigen_bound: j must be >= 0");
    const std::size_t two_k0 =
        2 * static_cast<std::size_t>(std::floor(std::sqrt(2.0) * std::pow(epsilon, -0.75)));
    if (k >= two_k0) throw std::invalid_argument("eigen_bound: k out of range");
    if (k == 0 && j == 0) return 1.26;
    const double t = static_cast<double>(k) / (2.0 * std::sqrt(2.0)) +
                     static_cast<double>(j) * std::pow(epsilon, -0.75);
    return 1.0 / (t * t * kPi * kPi);
}

std::vector<double> lemma3_bound_sequence(double epsilon, double trunc) {
    const std::size_t two_k0 =
        2 * static_cast<std::size_t>(std::floor(std::sqrt(2.0) * std::pow(epsilon, -0.75)));
    std::vector<double> out;
    for (std::size_t k = 0; k < two_k0; ++k) {
        for (int j = 0;; ++j) {
            const double b = eigen_bound(epsilon, k, j);
            if (b < trunc) break;
            out.push_back(b);
        }
    }
    return out;
}

double critical_radius(const std::vector<double>& gammas, double n, double sigma, double R) {
    if (!(n >= 1.0)) throw std::invalid_argument("critical_radius: n must be >= 1");
    if (!(sigma > 0.0) || !(R > 0.0))
        throw std::invalid_argument("critical_radius: sigma and R must be positive");
    const auto satisfied = [&](double delta) {
        const double d2 = delta * delta;
        double s = 0.0;
        for (double g : gammas) s += std::min(g, d2);
        return (R / sigma) * d2 >= std::sqrt(2.0 * s / n);
    };
    double lo = 1e-8, hi = 10.0;
    if (satisfied(lo)) return lo;
    if (!satisfied(hi))
        throw std::runtime_error("critical_radius: no crossing inside [1e-8, 10]");
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (satisfied(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

RateReport rate_bounds(double n, double sigma, double epsilon) {
    if (!(n > 0.0) || !(sigma > 0.0) || !(epsilon > 0.0))
        throw std::invalid_argument("rate_bounds: arguments must be positive");
    RateReport r;
    r.n = n;
    r.sigma = sigma;
    r.epsilon = epsilon;
    r.l2_rate = std::pow(sigma * sigma / n, 2.0 / 3.0);
    r.linf_rate = std::pow(sigma * sigma / (epsilon * n), 2.0 / 3.0);
    r.delta_n = critical_radius(lemma3_bound_sequence(epsilon), n, sigma, 2.0);
    return r;
}

}  // namespace plap
